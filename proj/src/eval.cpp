#include "pcfg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pcfg/errors.hpp"

namespace pcfg {

double sentence_score(InsideEvaluator& ev, const Sentence& x, ScoreMode mode) {
    double logp = ev.log_probability(x);
    if (is_no_parse(logp)) return kNoParseScore;
    return mode == ScoreMode::Normalized ? logp / static_cast<double>(x.size()) : logp;
}

double sentence_score(const Pcfg& g, const Sentence& x, ScoreMode mode) {
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    return sentence_score(ev, x, mode);
}

double auroc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw std::invalid_argument("auroc needs non-empty positive and negative score sets");
    // Average ranks over the pooled sorted scores; tied scores share the
    // midrank, which counts tied positive/negative pairs as 1/2.
    struct Tagged {
        double score;
        bool positive;
    };
    std::vector<Tagged> all;
    all.reserve(pos_scores.size() + neg_scores.size());
    for (double s : pos_scores) all.push_back({s, true});
    for (double s : neg_scores) all.push_back({s, false});
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

    double pos_rank_sum = 0.0;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (size_t t = i; t < j; ++t)
            if (all[t].positive) pos_rank_sum += midrank;
        i = j;
    }
    double n_pos = static_cast<double>(pos_scores.size());
    double n_neg = static_cast<double>(neg_scores.size());
    double u = pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    return u / (n_pos * n_neg);
}

FoldPlan kfold_split(const Corpus& X, int k, Rng& rng) {
    if (k < 2)
        throw std::invalid_argument("kfold_split needs k >= 2");
    if (static_cast<size_t>(k) > X.size())
        throw std::invalid_argument("kfold_split needs k <= |X|");
    std::vector<int> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    FoldPlan plan;
    plan.k = k;
    plan.assignments.resize(X.size());
    for (size_t i = 0; i < order.size(); ++i)
        plan.assignments[order[i]] = static_cast<int>(i % k);
    return plan;
}

namespace {

// All derivations of x[i, j) from var, capped at max_count.
std::vector<std::vector<int>> derive(const RuleSet& rs, const std::vector<int>& terms, VarId var,
                                     int i, int j, size_t max_count) {
    std::vector<std::vector<int>> out;
    auto [rb, re] = rs.lhs_range(var);
    if (j - i == 1) {
        for (int r = rb; r < re; ++r)
            if (rs.rule(r).is_lexical() && rs.rule(r).terminal == terms[i])
                out.push_back({r});
        return out;
    }
    for (int r = rb; r < re; ++r) {
        const Rule& rule = rs.rule(r);
        if (rule.is_lexical()) continue;
        for (int k = i + 1; k < j; ++k) {
            auto left = derive(rs, terms, rule.left, i, k, max_count);
            if (left.empty()) continue;
            auto right = derive(rs, terms, rule.right, k, j, max_count);
            for (const auto& dl : left) {
                for (const auto& dr : right) {
                    std::vector<int> d;
                    d.reserve(1 + dl.size() + dr.size());
                    d.push_back(r);
                    d.insert(d.end(), dl.begin(), dl.end());
                    d.insert(d.end(), dr.begin(), dr.end());
                    out.push_back(std::move(d));
                    if (out.size() >= max_count) return out;
                }
            }
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<int>> enumerate_derivations(const RuleSet& rs, const Sentence& x,
                                                    size_t max_count) {
    if (x.empty())
        throw std::invalid_argument("cannot derive an empty sentence");
    std::vector<int> terms(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        terms[i] = rs.alphabet().index(x[i]);
        if (terms[i] < 0)
            throw std::invalid_argument(std::string("symbol '") + x[i] + "' is not in the alphabet");
    }
    if (x.size() == 1) return {};  // structural start cannot derive one terminal
    return derive(rs, terms, rs.vars().start(), 0, static_cast<int>(x.size()), max_count);
}

ProbabilityAssignment mle_theta_by_derivation_counting(const RuleSet& rs, const Corpus& X) {
    if (X.empty())
        throw std::invalid_argument("corpus must be non-empty");
    std::vector<double> counts(rs.size(), 0.0);
    for (const Sentence& x : X.sentences) {
        auto ds = enumerate_derivations(rs, x, 2);
        if (ds.size() != 1)
            throw PreconditionError("sentence '" + x + "' has " +
                                    (ds.empty() ? std::string("no") : std::string("multiple")) +
                                    " derivations; MLE counting needs exactly one");
        for (int r : ds[0]) counts[r] += 1.0;
    }
    ProbabilityAssignment theta;
    theta.probs.resize(rs.size());
    for (VarId v = 0; v < rs.vars().total(); ++v) {
        auto [b, e] = rs.lhs_range(v);
        double total = 0.0;
        for (int i = b; i < e; ++i) total += counts[i];
        for (int i = b; i < e; ++i)
            theta.probs[i] = total > 0.0 ? counts[i] / total : 1.0 / (e - b);
    }
    return theta;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["perplexity_nats_per_letter"] = perplexity_nats_per_letter;
    if (auroc)
        j["auroc"] = *auroc;
    else
        j["auroc"] = nullptr;
    nlohmann::json ar = nlohmann::json::object();
    for (const auto& [t, n] : active_rules) {
        std::ostringstream key;
        key << t;
        ar[key.str()] = n;
    }
    j["active_rules"] = ar;
    j["scores_pos"] = scores_pos;
    j["scores_neg"] = scores_neg;
    j["fold"] = fold;
    return j.dump(2) + "\n";
}

EvalReport evaluate_grammar(const Pcfg& g, const LabeledSample& sample,
                            const std::vector<double>& thresholds, ScoreMode mode) {
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    EvalReport report;
    if (!sample.train.empty())
        report.perplexity_nats_per_letter = perplexity_per_letter(ev, sample.train);
    for (const Sentence& x : sample.test_pos.sentences)
        report.scores_pos.push_back(sentence_score(ev, x, mode));
    for (const Sentence& x : sample.test_neg.sentences)
        report.scores_neg.push_back(sentence_score(ev, x, mode));
    if (!report.scores_pos.empty() && !report.scores_neg.empty())
        report.auroc = auroc(report.scores_pos, report.scores_neg);
    for (double t : thresholds)
        report.active_rules[t] = active_rule_count(g.theta, t);
    return report;
}

}  // namespace pcfg
