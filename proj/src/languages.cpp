#include "pcfg/languages.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pcfg {

ToyLanguage toy_language_from_name(const std::string& name) {
    if (name == "L1" || name == "l1") return ToyLanguage::L1;
    if (name == "L2" || name == "l2") return ToyLanguage::L2;
    throw std::invalid_argument("unknown toy language: " + name);
}

const Alphabet& toy_alphabet() {
    static const Alphabet abc("abc");
    return abc;
}

bool contains(ToyLanguage lang, const Sentence& x) {
    size_t i = 0;
    if (lang == ToyLanguage::L1) {
        // a^n b^n c^m, n,m >= 1
        size_t na = 0, nb = 0, nc = 0;
        while (i < x.size() && x[i] == 'a') ++na, ++i;
        while (i < x.size() && x[i] == 'b') ++nb, ++i;
        while (i < x.size() && x[i] == 'c') ++nc, ++i;
        return i == x.size() && na >= 1 && na == nb && nc >= 1;
    }
    // (a|b) c^m, m >= 1
    if (x.empty() || (x[0] != 'a' && x[0] != 'b')) return false;
    for (i = 1; i < x.size(); ++i)
        if (x[i] != 'c') return false;
    return x.size() >= 2;
}

RuleSet reference_grammar(ToyLanguage lang) {
    if (lang == ToyLanguage::L1) {
        // lexical A,B,C (ids 0,1,2); structural S,T,V (ids 3,4,5)
        VariableSet vars(3, 3, {"A", "B", "C", "S", "T", "V"});
        const VarId A = 0, B = 1, C = 2, S = 3, T = 4, V = 5;
        std::vector<Rule> rules = {
            Rule::structural(S, T, C), Rule::structural(S, S, C),
            Rule::structural(T, A, V), Rule::structural(T, A, B),
            Rule::structural(V, T, B),
            Rule::lexical(A, 0), Rule::lexical(B, 1), Rule::lexical(C, 2),
        };
        return RuleSet(toy_alphabet(), vars, std::move(rules));
    }
    // lexical A,B (ids 0,1); structural S (id 2)
    VariableSet vars(2, 1, {"A", "B", "S"});
    const VarId A = 0, B = 1, S = 2;
    std::vector<Rule> rules = {
        Rule::structural(S, A, B), Rule::structural(S, S, B),
        Rule::lexical(A, 0), Rule::lexical(A, 1), Rule::lexical(B, 2),
    };
    return RuleSet(toy_alphabet(), vars, std::move(rules));
}

Corpus builtin_training_set(ToyLanguage lang, bool verbatim) {
    Corpus c;
    if (lang == ToyLanguage::L1) {
        c.sentences = {"abc", "aabbc", "aaabbbc", "abcc", "abccc", "aabbcc", "aaabbbcc",
                       verbatim ? "aaaabbbcc" : "aaaabbbbcc"};
    } else {
        c.sentences = {"ac", "bc", "acc", "bcc", "accc"};
    }
    return c;
}

namespace {

Sentence l1_sentence(int n, int m) {
    return Sentence(n, 'a') + Sentence(n, 'b') + Sentence(m, 'c');
}

}  // namespace

Corpus sample_positive(ToyLanguage lang, int count, int max_len, Rng& rng) {
    if (count < 1 || max_len < 3)
        throw std::invalid_argument("sample_positive needs count >= 1 and max_len >= 3");
    std::vector<Sentence> members;
    if (lang == ToyLanguage::L1) {
        for (int n = 1; 2 * n + 1 <= max_len; ++n)
            for (int m = 1; 2 * n + m <= max_len; ++m)
                members.push_back(l1_sentence(n, m));
    } else {
        for (char first : {'a', 'b'})
            for (int m = 1; 1 + m <= max_len; ++m)
                members.push_back(Sentence(1, first) + Sentence(m, 'c'));
    }
    if (count > static_cast<int>(members.size()))
        throw std::invalid_argument("requested " + std::to_string(count) + " positives but only " +
                                    std::to_string(members.size()) + " distinct members fit max_len");
    std::shuffle(members.begin(), members.end(), rng);
    Corpus c;
    c.sentences.assign(members.begin(), members.begin() + count);
    return c;
}

Corpus sample_negative(ToyLanguage lang, int count, const std::vector<int>& length_dist, Rng& rng) {
    if (count < 1)
        throw std::invalid_argument("sample_negative needs count >= 1");
    if (length_dist.empty())
        throw std::invalid_argument("sample_negative needs a non-empty length distribution");
    std::uniform_int_distribution<size_t> pick_len(0, length_dist.size() - 1);
    std::uniform_int_distribution<int> pick_sym(0, 2);
    std::set<Sentence> seen;
    Corpus c;
    constexpr int kMaxAttempts = 1000000;
    int attempts = 0;
    while (static_cast<int>(c.size()) < count) {
        if (++attempts > kMaxAttempts)
            throw std::runtime_error("negative sampling exhausted 10^6 attempts");
        int len = length_dist[pick_len(rng)];
        Sentence s;
        s.reserve(len);
        for (int i = 0; i < len; ++i) s += "abc"[pick_sym(rng)];
        if (contains(lang, s) || !seen.insert(s).second) continue;
        c.sentences.push_back(std::move(s));
    }
    return c;
}

}  // namespace pcfg
