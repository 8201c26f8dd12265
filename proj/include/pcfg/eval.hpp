#ifndef PCFG_EVAL_HPP
#define PCFG_EVAL_HPP

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pcfg/corpus.hpp"
#include "pcfg/grammar.hpp"
#include "pcfg/inside.hpp"
#include "pcfg/languages.hpp"

namespace pcfg {

// Classification score for no-parse sentences: strictly below any finite
// log-probability a parse can produce, but still JSON-serializable.
inline constexpr double kNoParseScore = -1e300;

enum class ScoreMode { Normalized, Raw };

// Normalized: ln P(x) / |x| (nats per letter); Raw: ln P(x).
double sentence_score(const Pcfg& g, const Sentence& x, ScoreMode mode = ScoreMode::Normalized);
double sentence_score(InsideEvaluator& ev, const Sentence& x, ScoreMode mode = ScoreMode::Normalized);

// P(random positive outranks random negative), ties counted 1/2
// (Mann-Whitney), computed by sort-and-rank.
double auroc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // sentence index -> fold id
};

// Random partition into k folds with sizes balanced within 1.
FoldPlan kfold_split(const Corpus& X, int k, Rng& rng);

// Up to max_count complete derivations of x from the start symbol; each
// derivation is the list of rule indices used (with multiplicity).
std::vector<std::vector<int>> enumerate_derivations(const RuleSet& rs, const Sentence& x,
                                                    size_t max_count = 8);

// Maximum-likelihood theta from rule-usage counts. Requires every sentence
// to have exactly one complete derivation (PreconditionError otherwise,
// naming the offending sentence). Unused lhs groups get uniform theta.
ProbabilityAssignment mle_theta_by_derivation_counting(const RuleSet& rs, const Corpus& X);

struct EvalReport {
    double perplexity_nats_per_letter = 0.0;
    std::optional<double> auroc;  // absent when a test set is missing
    std::map<double, int> active_rules;
    std::vector<double> scores_pos;
    std::vector<double> scores_neg;
    int fold = -1;  // -1 when not cross-validated

    std::string to_json() const;
};

EvalReport evaluate_grammar(const Pcfg& g, const LabeledSample& sample,
                            const std::vector<double>& thresholds,
                            ScoreMode mode = ScoreMode::Normalized);

}  // namespace pcfg

#endif
