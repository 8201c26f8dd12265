#include "pcfg/inside.hpp"

#include <cmath>
#include <stdexcept>

namespace pcfg {

InsideEvaluator::InsideEvaluator(const RuleSet& rs)
    : rs_(&rs), n_vars_(rs.vars().total()), n_lex_(rs.vars().n_lexical()) {
    lex_prob_.assign(static_cast<size_t>(rs.alphabet().size()) * n_lex_, 0.0);
    struct_prob_.assign(static_cast<size_t>(rs.vars().n_structural()) * n_vars_ * n_vars_, 0.0);
}

void InsideEvaluator::set_theta(const ProbabilityAssignment& theta) {
    if (theta.probs.size() != static_cast<size_t>(rs_->size()))
        throw std::invalid_argument("theta length does not match rule count");
    std::fill(lex_prob_.begin(), lex_prob_.end(), 0.0);
    std::fill(struct_prob_.begin(), struct_prob_.end(), 0.0);
    for (int i = 0; i < rs_->size(); ++i) {
        const Rule& r = rs_->rule(i);
        double p = theta.probs[i];
        if (r.is_lexical())
            lex_prob_[static_cast<size_t>(r.terminal) * n_lex_ + r.lhs] = p;
        else
            struct_prob_[(static_cast<size_t>(r.lhs - n_lex_) * n_vars_ + r.left) * n_vars_ + r.right] = p;
    }
}

void InsideEvaluator::run(const Sentence& x) {
    const int n = static_cast<int>(x.size());
    if (n == 0)
        throw std::invalid_argument("cannot score an empty sentence");
    terms_.resize(n);
    for (int i = 0; i < n; ++i) {
        terms_[i] = rs_->alphabet().index(x[i]);
        if (terms_[i] < 0)
            throw std::invalid_argument(std::string("symbol '") + x[i] + "' is not in the alphabet");
    }

    const int V = n_vars_;
    const size_t n_cells = static_cast<size_t>(n) * n;
    cell_max_.assign(n_cells, kNoParse);
    cell_lin_.assign(n_cells * V, 0.0);
    auto cell_index = [n](int start, int len) { return static_cast<size_t>(len - 1) * n + start; };

    // Length-1 spans: lexical rules only.
    for (int i = 0; i < n; ++i) {
        const double* lp = &lex_prob_[static_cast<size_t>(terms_[i]) * n_lex_];
        double best = 0.0;
        for (int a = 0; a < n_lex_; ++a) best = std::max(best, lp[a]);
        if (best == 0.0) continue;  // letter underivable; whole sentence will be no-parse
        size_t ci = cell_index(i, 1);
        cell_max_[ci] = std::log(best);
        double* lin = &cell_lin_[ci * V];
        for (int a = 0; a < n_lex_; ++a) lin[a] = lp[a] / best;
    }

    pair_weight_.resize(static_cast<size_t>(V) * V);
    for (int len = 2; len <= n; ++len) {
        for (int start = 0; start + len <= n; ++start) {
            // Common shift for all split contributions of this cell.
            double shift = kNoParse;
            for (int k = 1; k < len; ++k) {
                double s = cell_max_[cell_index(start, k)] + cell_max_[cell_index(start + k, len - k)];
                if (s > shift) shift = s;
            }
            size_t ci = cell_index(start, len);
            if (is_no_parse(shift)) continue;

            std::fill(pair_weight_.begin(), pair_weight_.end(), 0.0);
            for (int k = 1; k < len; ++k) {
                size_t li = cell_index(start, k);
                size_t ri = cell_index(start + k, len - k);
                double s = cell_max_[li] + cell_max_[ri];
                if (is_no_parse(s)) continue;
                double factor = std::exp(s - shift);
                const double* linL = &cell_lin_[li * V];
                const double* linR = &cell_lin_[ri * V];
                for (int c = 0; c < V; ++c) {
                    double lc = linL[c] * factor;
                    if (lc == 0.0) continue;
                    double* w = &pair_weight_[static_cast<size_t>(c) * V];
                    for (int d = 0; d < V; ++d) w[d] += lc * linR[d];
                }
            }

            // theta-weighted sums per structural lhs, then renormalize the cell.
            double* lin = &cell_lin_[ci * V];
            double best = 0.0;
            for (int b = n_lex_; b < V; ++b) {
                const double* sp = &struct_prob_[static_cast<size_t>(b - n_lex_) * V * V];
                double dot = 0.0;
                for (int cd = 0; cd < V * V; ++cd) dot += sp[cd] * pair_weight_[cd];
                lin[b] = dot;
                if (dot > best) best = dot;
            }
            if (best == 0.0) continue;
            cell_max_[ci] = shift + std::log(best);
            for (int b = n_lex_; b < V; ++b) lin[b] /= best;
        }
    }
}

double InsideEvaluator::log_probability(const Sentence& x) {
    run(x);
    const int n = static_cast<int>(x.size());
    const VarId start_var = rs_->vars().start();
    if (n == 1) {
        // Bipartite CNF: a structural start symbol cannot derive one terminal.
        return kNoParse;
    }
    size_t ci = static_cast<size_t>(n - 1) * n;  // cell (0, n)
    double m = cell_max_[ci];
    if (is_no_parse(m)) return kNoParse;
    double lin = cell_lin_[ci * n_vars_ + start_var];
    if (lin == 0.0) return kNoParse;
    return m + std::log(lin);
}

InsideChart InsideEvaluator::chart(const Sentence& x) {
    run(x);
    const int n = static_cast<int>(x.size());
    InsideChart ch;
    ch.length = n;
    ch.n_vars = n_vars_;
    ch.cells.assign(static_cast<size_t>(n) * n * n_vars_, kNoParse);
    for (int len = 1; len <= n; ++len) {
        for (int start = 0; start + len <= n; ++start) {
            size_t ci = static_cast<size_t>(len - 1) * n + start;
            double m = cell_max_[ci];
            if (is_no_parse(m)) continue;
            for (int v = 0; v < n_vars_; ++v) {
                double lin = cell_lin_[ci * n_vars_ + v];
                if (lin > 0.0) ch.cells[ci * n_vars_ + v] = m + std::log(lin);
            }
        }
    }
    return ch;
}

double inside_log_probability(const Pcfg& g, const Sentence& x) {
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    return ev.log_probability(x);
}

double corpus_mean_log_likelihood(InsideEvaluator& ev, const Corpus& X) {
    if (X.empty())
        throw std::invalid_argument("corpus must be non-empty");
    double sum = 0.0;
    for (const Sentence& x : X.sentences)
        sum += std::max(ev.log_probability(x), kLogProbFloor);
    return sum / static_cast<double>(X.size());
}

double corpus_mean_log_likelihood(const Pcfg& g, const Corpus& X) {
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    return corpus_mean_log_likelihood(ev, X);
}

double perplexity_per_letter(InsideEvaluator& ev, const Corpus& X) {
    if (X.empty())
        throw std::invalid_argument("corpus must be non-empty");
    double sum = 0.0;
    for (const Sentence& x : X.sentences)
        sum += std::max(ev.log_probability(x), kLogProbFloor);
    return -sum / static_cast<double>(X.total_letters());
}

double perplexity_per_letter(const Pcfg& g, const Corpus& X) {
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    return perplexity_per_letter(ev, X);
}

}  // namespace pcfg
