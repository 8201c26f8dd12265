#ifndef PCFG_LANGUAGES_HPP
#define PCFG_LANGUAGES_HPP

#include <random>

#include "pcfg/corpus.hpp"
#include "pcfg/grammar.hpp"

namespace pcfg {

using Rng = std::mt19937_64;

// Toy languages over {a,b,c}:
//   L1 = { a^n b^n c^m : n,m >= 1 }
//   L2 = { a c^m } u { b c^m }, m >= 1
enum class ToyLanguage { L1, L2 };

ToyLanguage toy_language_from_name(const std::string& name);  // "L1" / "L2"

const Alphabet& toy_alphabet();  // {a,b,c}

bool contains(ToyLanguage lang, const Sentence& x);

// L1: { S -> TC | SC, T -> AV | AB, V -> TB, A -> a, B -> b, C -> c }
// L2: { S -> AB | SB, A -> a | b, B -> c }
RuleSet reference_grammar(ToyLanguage lang);

// The published 8-sentence (L1) and 5-sentence (L2) training sets. The L1
// set as printed contains "aaaabbbcc", which is not in L1; by default it is
// corrected to "aaaabbbbcc". Pass verbatim=true to keep the printed string.
Corpus builtin_training_set(ToyLanguage lang, bool verbatim = false);

struct LabeledSample {
    Corpus train;
    Corpus test_pos;
    Corpus test_neg;
};

// count distinct members with length <= max_len, drawn uniformly over the
// admissible (n, m) parameter grid.
Corpus sample_positive(ToyLanguage lang, int count, int max_len, Rng& rng);

// count distinct non-members over {a,b,c}; lengths drawn from length_dist
// (with replacement), membership rejected by the exact oracle.
Corpus sample_negative(ToyLanguage lang, int count, const std::vector<int>& length_dist, Rng& rng);

}  // namespace pcfg

#endif
