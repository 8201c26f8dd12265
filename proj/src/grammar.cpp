#include "pcfg/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pcfg {

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols) {
    if (symbols_.empty())
        throw std::invalid_argument("alphabet must be non-empty");
    index_.fill(-1);
    for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
        unsigned char c = static_cast<unsigned char>(symbols_[i]);
        if (index_[c] != -1)
            throw std::invalid_argument(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
        index_[c] = i;
    }
}

namespace {

std::string default_name(int i, bool lexical) {
    if (lexical)
        return i < 18 ? std::string(1, static_cast<char>('A' + i)) : "L" + std::to_string(i);
    return i < 8 ? std::string(1, static_cast<char>('S' + i)) : "N" + std::to_string(i);
}

}  // namespace

VariableSet::VariableSet(int n_lex, int n_struct, std::vector<std::string> names)
    : n_lex_(n_lex), n_struct_(n_struct), names_(std::move(names)) {
    if (n_lex < 1 || n_struct < 1)
        throw std::invalid_argument("need at least one lexical and one structural variable");
    if (names_.empty()) {
        names_.reserve(total());
        for (int i = 0; i < n_lex_; ++i) names_.push_back(default_name(i, true));
        for (int i = 0; i < n_struct_; ++i) names_.push_back(default_name(i, false));
    }
    if (static_cast<int>(names_.size()) != total())
        throw std::invalid_argument("variable name count does not match variable count");
    for (size_t i = 0; i < names_.size(); ++i)
        for (size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j])
                throw std::invalid_argument("duplicate variable name: " + names_[i]);
}

VarId VariableSet::id_of(std::string_view name) const {
    for (int v = 0; v < total(); ++v)
        if (names_[v] == name) return v;
    return -1;
}

bool VariableSet::operator==(const VariableSet& o) const {
    return n_lex_ == o.n_lex_ && n_struct_ == o.n_struct_ && names_ == o.names_;
}

namespace {

// Canonical order: lhs id, then terminal index, then (left, right).
bool rule_less(const Rule& a, const Rule& b) {
    if (a.lhs != b.lhs) return a.lhs < b.lhs;
    if (a.terminal != b.terminal) return a.terminal < b.terminal;
    if (a.left != b.left) return a.left < b.left;
    return a.right < b.right;
}

}  // namespace

RuleSet::RuleSet(Alphabet alphabet, VariableSet vars, std::vector<Rule> rules)
    : alphabet_(std::move(alphabet)), vars_(std::move(vars)), rules_(std::move(rules)) {
    if (rules_.empty())
        throw std::invalid_argument("rule set must be non-empty");

    // One character per terminal; variable names must not collide with them.
    for (int v = 0; v < vars_.total(); ++v) {
        const std::string& n = vars_.name(v);
        if (n.size() == 1 && alphabet_.index(n[0]) >= 0)
            throw std::invalid_argument("variable name collides with terminal: " + n);
    }

    for (const Rule& r : rules_) {
        if (r.lhs < 0 || r.lhs >= vars_.total())
            throw std::invalid_argument("rule lhs out of range");
        if (r.is_lexical()) {
            if (!vars_.is_lexical(r.lhs))
                throw std::invalid_argument("lexical rule headed by structural variable");
            if (r.terminal >= alphabet_.size())
                throw std::invalid_argument("rule terminal out of range");
        } else {
            if (vars_.is_lexical(r.lhs))
                throw std::invalid_argument("structural rule headed by lexical variable");
            if (r.left < 0 || r.left >= vars_.total() || r.right < 0 || r.right >= vars_.total())
                throw std::invalid_argument("rule child out of range");
        }
    }

    std::sort(rules_.begin(), rules_.end(), rule_less);
    for (size_t i = 1; i < rules_.size(); ++i)
        if (rules_[i] == rules_[i - 1])
            throw std::invalid_argument("duplicate rule");

    lhs_ranges_.assign(vars_.total(), {0, 0});
    size_t i = 0;
    for (VarId v = 0; v < vars_.total(); ++v) {
        int begin = static_cast<int>(i);
        while (i < rules_.size() && rules_[i].lhs == v) ++i;
        lhs_ranges_[v] = {begin, static_cast<int>(i)};
        if (begin == static_cast<int>(i))
            throw std::invalid_argument("variable heads no rule: " + vars_.name(v));
    }
}

RuleSet build_covering_ruleset(const Alphabet& alphabet, int n_lex, int n_struct) {
    if (n_lex < 1 || n_struct < 1)
        throw std::invalid_argument("covering set needs n_lex >= 1 and n_struct >= 1");
    // Single-letter default names clash with large alphabets (e.g. amino
    // acids); switch to indexed names when any default would be a terminal.
    std::vector<std::string> names;
    bool collision = false;
    for (int i = 0; i < n_lex && !collision; ++i)
        collision = alphabet.index(static_cast<char>('A' + i)) >= 0;
    for (int j = 0; j < n_struct && !collision; ++j)
        collision = alphabet.index(static_cast<char>('S' + j)) >= 0;
    if (collision) {
        for (int i = 0; i < n_lex; ++i) names.push_back("L" + std::to_string(i));
        for (int j = 0; j < n_struct; ++j) names.push_back("S" + std::to_string(j));
    }
    VariableSet vars(n_lex, n_struct, std::move(names));
    std::vector<Rule> rules;
    rules.reserve(static_cast<size_t>(n_lex) * alphabet.size() +
                  static_cast<size_t>(n_struct) * vars.total() * vars.total());
    for (VarId a = 0; a < n_lex; ++a)
        for (int t = 0; t < alphabet.size(); ++t)
            rules.push_back(Rule::lexical(a, t));
    for (VarId b = n_lex; b < vars.total(); ++b)
        for (VarId c = 0; c < vars.total(); ++c)
            for (VarId d = 0; d < vars.total(); ++d)
                rules.push_back(Rule::structural(b, c, d));
    return RuleSet(alphabet, vars, std::move(rules));
}

Pcfg::Pcfg(RuleSet rs, ProbabilityAssignment th, double properness_tol)
    : ruleset(std::move(rs)), theta(std::move(th)) {
    if (theta.probs.size() != static_cast<size_t>(ruleset.size()))
        throw std::invalid_argument("theta length does not match rule count");
    for (double p : theta.probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("rule probability outside [0,1]");
    for (VarId v = 0; v < ruleset.vars().total(); ++v) {
        auto [b, e] = ruleset.lhs_range(v);
        double sum = 0.0;
        for (int i = b; i < e; ++i) sum += theta.probs[i];
        if (std::abs(sum - 1.0) > properness_tol)
            throw std::invalid_argument("improper grammar: probabilities for " +
                                        ruleset.vars().name(v) + " sum to " + std::to_string(sum));
    }
}

ProbabilityAssignment normalize_to_proper(const Genome& z, const RuleSet& rs) {
    if (z.genes.size() != static_cast<size_t>(rs.size()))
        throw std::invalid_argument("genome length does not match rule count");
    ProbabilityAssignment theta;
    theta.probs.resize(z.genes.size());
    for (VarId v = 0; v < rs.vars().total(); ++v) {
        auto [b, e] = rs.lhs_range(v);
        double sum = 0.0;
        for (int i = b; i < e; ++i) sum += z.genes[i];
        if (sum > 0.0) {
            for (int i = b; i < e; ++i) theta.probs[i] = z.genes[i] / sum;
        } else {
            double u = 1.0 / (e - b);
            for (int i = b; i < e; ++i) theta.probs[i] = u;
        }
    }
    return theta;
}

int active_rule_count(const ProbabilityAssignment& theta, double threshold) {
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw std::invalid_argument("threshold must be in [0,1)");
    int n = 0;
    for (double p : theta.probs)
        if (p > threshold) ++n;
    return n;
}

void dump_grammar(const Pcfg& g, std::ostream& os) {
    const RuleSet& rs = g.ruleset;
    char buf[64];
    for (int i = 0; i < rs.size(); ++i) {
        const Rule& r = rs.rule(i);
        std::snprintf(buf, sizeof(buf), "%.17g", g.theta.probs[i]);
        os << rs.vars().name(r.lhs) << " -> ";
        if (r.is_lexical())
            os << rs.alphabet().symbol(r.terminal);
        else
            os << rs.vars().name(r.left) << ' ' << rs.vars().name(r.right);
        os << "  p=" << buf << '\n';
    }
}

std::string dump_grammar(const Pcfg& g) {
    std::ostringstream os;
    dump_grammar(g, os);
    return os.str();
}

namespace {

struct ParsedLine {
    std::string lhs;
    std::vector<std::string> rhs;  // one terminal token or two variable tokens
    double prob;
};

}  // namespace

Pcfg parse_grammar_dump(std::istream& is, double properness_tol) {
    std::vector<ParsedLine> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        ParsedLine pl;
        std::string tok, arrow;
        if (!(ls >> pl.lhs >> arrow) || arrow != "->")
            throw std::invalid_argument("malformed grammar line: " + line);
        bool have_prob = false;
        while (ls >> tok) {
            if (tok.rfind("p=", 0) == 0) {
                pl.prob = std::stod(tok.substr(2));
                have_prob = true;
                break;
            }
            pl.rhs.push_back(tok);
        }
        if (!have_prob)
            throw std::invalid_argument("grammar line missing probability: " + line);
        if (pl.rhs.size() != 1 && pl.rhs.size() != 2)
            throw std::invalid_argument("grammar rhs must have 1 or 2 symbols: " + line);
        lines.push_back(std::move(pl));
    }
    if (lines.empty())
        throw std::invalid_argument("empty grammar dump");

    // Recover variable partition and alphabet from rule forms.
    std::vector<std::string> lex_names, struct_names;
    std::string terminals;
    auto add_unique = [](std::vector<std::string>& v, const std::string& n) {
        if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
    };
    for (const auto& pl : lines) {
        if (pl.rhs.size() == 1) {
            if (pl.rhs[0].size() != 1)
                throw std::invalid_argument("terminal must be a single character: " + pl.rhs[0]);
            add_unique(lex_names, pl.lhs);
            if (terminals.find(pl.rhs[0][0]) == std::string::npos) terminals += pl.rhs[0][0];
        } else {
            add_unique(struct_names, pl.lhs);
        }
    }
    std::sort(terminals.begin(), terminals.end());
    Alphabet alphabet(terminals);
    std::vector<std::string> names = lex_names;
    names.insert(names.end(), struct_names.begin(), struct_names.end());
    VariableSet vars(static_cast<int>(lex_names.size()), static_cast<int>(struct_names.size()),
                     std::move(names));

    std::vector<std::pair<Rule, double>> weighted;
    for (const auto& pl : lines) {
        VarId lhs = vars.id_of(pl.lhs);
        Rule r;
        if (pl.rhs.size() == 1) {
            r = Rule::lexical(lhs, alphabet.index(pl.rhs[0][0]));
        } else {
            VarId l = vars.id_of(pl.rhs[0]), rr = vars.id_of(pl.rhs[1]);
            if (l < 0 || rr < 0)
                throw std::invalid_argument("unknown variable in rhs: " + pl.rhs[0] + " " + pl.rhs[1]);
            r = Rule::structural(lhs, l, rr);
        }
        weighted.emplace_back(r, pl.prob);
    }

    std::vector<Rule> rules;
    rules.reserve(weighted.size());
    for (const auto& [r, p] : weighted) rules.push_back(r);
    RuleSet rs(alphabet, vars, std::move(rules));

    // Re-align probabilities with the canonical order.
    ProbabilityAssignment theta;
    theta.probs.assign(rs.size(), -1.0);
    for (const auto& [r, p] : weighted) {
        for (int i = 0; i < rs.size(); ++i) {
            if (rs.rule(i) == r) {
                theta.probs[i] = p;
                break;
            }
        }
    }
    return Pcfg(std::move(rs), std::move(theta), properness_tol);
}

Pcfg parse_grammar_dump(const std::string& text, double properness_tol) {
    std::istringstream is(text);
    return parse_grammar_dump(is, properness_tol);
}

}  // namespace pcfg
