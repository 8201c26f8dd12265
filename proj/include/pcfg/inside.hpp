#ifndef PCFG_INSIDE_HPP
#define PCFG_INSIDE_HPP

#include <limits>
#include <vector>

#include "pcfg/corpus.hpp"
#include "pcfg/grammar.hpp"

namespace pcfg {

// Log-probability sentinel for "no parse".
inline constexpr double kNoParse = -std::numeric_limits<double>::infinity();
inline bool is_no_parse(double logp) { return logp == kNoParse; }

// Per-sentence log-probability floor used by the GA objective so fitness
// stays finite when zero-clipped genomes make a sentence unparseable.
inline constexpr double kLogProbFloor = -700.0;

// Full Inside table: cell(start, length, var) = ln P[var =>* x[start, start+length)],
// kNoParse when the span is underivable from var.
struct InsideChart {
    int length = 0;
    int n_vars = 0;
    std::vector<double> cells;  // [(len-1)*length + start]*n_vars + var

    double cell(int start, int span_len, VarId v) const {
        return cells[(static_cast<size_t>(span_len - 1) * length + start) * n_vars + v];
    }
};

// Reusable Inside evaluator bound to one rule set. set_theta() installs a
// probability assignment; scoring reuses scratch buffers, so one evaluator
// serves one thread at a time (create one per worker for parallel scoring).
//
// Cells are kept as a per-cell max log plus linear residuals, which is the
// log-sum-exp recursion with the exp/log calls hoisted out of the inner
// rule loop. Handles 27-letter amino-acid sentences without underflow.
class InsideEvaluator {
public:
    explicit InsideEvaluator(const RuleSet& rs);

    void set_theta(const ProbabilityAssignment& theta);

    // ln P(x | grammar); kNoParse when the derivation sum is 0.
    // Throws std::invalid_argument on symbols outside the alphabet.
    double log_probability(const Sentence& x);

    InsideChart chart(const Sentence& x);

    const RuleSet& ruleset() const { return *rs_; }

private:
    void run(const Sentence& x);

    const RuleSet* rs_;
    int n_vars_;
    int n_lex_;
    // theta in matrix form: lex_prob_[t*n_lex + A], struct_prob_[(B-n_lex)*V*V + C*V + D]
    std::vector<double> lex_prob_;
    std::vector<double> struct_prob_;
    // scratch: per cell a max log and linear residuals lin[v] = exp(log_v - max)
    std::vector<double> cell_max_;
    std::vector<double> cell_lin_;
    std::vector<double> pair_weight_;  // V*V accumulator per target cell
    std::vector<int> terms_;
};

// One-shot helpers (build an evaluator per call).
double inside_log_probability(const Pcfg& g, const Sentence& x);

// f = (1/|X|) sum_x ln P(x), each term floored at kLogProbFloor.
double corpus_mean_log_likelihood(const Pcfg& g, const Corpus& X);
double corpus_mean_log_likelihood(InsideEvaluator& ev, const Corpus& X);

// -(sum_x ln P(x)) / (sum_x |x|), nats per terminal symbol; per-sentence
// terms floored at kLogProbFloor.
double perplexity_per_letter(const Pcfg& g, const Corpus& X);
double perplexity_per_letter(InsideEvaluator& ev, const Corpus& X);

}  // namespace pcfg

#endif
