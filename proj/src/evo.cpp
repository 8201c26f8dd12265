#include "pcfg/evo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pcfg {

Scheme scheme_from_name(const std::string& name) {
    if (name == "PGE" || name == "pge") return Scheme::PGE;
    if (name == "MLGD" || name == "mlgd") return Scheme::MLGD;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme s) {
    return s == Scheme::PGE ? "PGE" : "MLGD";
}

void GaConfig::validate() const {
    if (population_size < 2)
        throw std::invalid_argument("population_size must be >= 2");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw std::invalid_argument("crossover_prob must be in [0,1]");
    if (mutation_prob < 0.0 || mutation_prob > 1.0)
        throw std::invalid_argument("mutation_prob must be in [0,1]");
    if (scheme == Scheme::MLGD && (mutation_scale <= 0.01 || mutation_scale > 1.0))
        throw std::invalid_argument("mutation_scale must be in (0.01, 1]");
    if (max_generations < 0)
        throw std::invalid_argument("max_generations must be >= 0");
    if (threads < 1)
        throw std::invalid_argument("threads must be >= 1");
}

double GaConfig::effective_sigma(int n_rules) const {
    return sharing_sigma > 0.0 ? sharing_sigma : 0.05 * std::sqrt(static_cast<double>(n_rules));
}

std::vector<Individual> init_population(const GaConfig& cfg, const RuleSet& rs, Rng& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Individual> pop(cfg.population_size);
    for (Individual& ind : pop) {
        ind.genome.genes.resize(rs.size());
        for (double& g : ind.genome.genes) g = u01(rng);
    }
    return pop;
}

void evaluate(std::vector<Individual>& pop, const RuleSet& rs, const Corpus& X, int threads) {
    if (X.empty())
        throw std::invalid_argument("corpus must be non-empty");
    auto worker = [&](size_t begin, size_t end) {
        InsideEvaluator ev(rs);
        for (size_t i = begin; i < end; ++i) {
            ev.set_theta(normalize_to_proper(pop[i].genome, rs));
            pop[i].raw_fitness = corpus_mean_log_likelihood(ev, X);
        }
    };
    size_t n = pop.size();
    size_t n_workers = std::min<size_t>(std::max(threads, 1), n);
    if (n_workers <= 1) {
        worker(0, n);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + n_workers - 1) / n_workers;
    for (size_t w = 0; w < n_workers; ++w) {
        size_t begin = w * chunk;
        if (begin >= n) break;
        pool.emplace_back(worker, begin, std::min(begin + chunk, n));
    }
    for (auto& t : pool) t.join();
}

void share_fitness(std::vector<Individual>& pop, const RuleSet& rs, double sigma, double intensity) {
    if (sigma <= 0.0)
        throw std::invalid_argument("sharing sigma must be > 0");
    const size_t n = pop.size();
    std::vector<std::vector<double>> thetas(n);
    for (size_t i = 0; i < n; ++i)
        thetas[i] = normalize_to_proper(pop[i].genome, rs).probs;

    std::vector<double> niche(n, 1.0);  // self-distance contributes 1
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (size_t g = 0; g < thetas[i].size(); ++g) {
                double diff = thetas[i][g] - thetas[j][g];
                d2 += diff * diff;
            }
            double d = std::sqrt(d2);
            if (d < sigma) {
                double share = 1.0 - d / sigma;
                niche[i] += share;
                niche[j] += share;
            }
        }
    }

    constexpr double kEps = 1e-6;
    double min_f = pop[0].raw_fitness;
    for (const Individual& ind : pop) min_f = std::min(min_f, ind.raw_fitness);
    for (size_t i = 0; i < n; ++i) {
        double shifted = pop[i].raw_fitness - min_f + kEps;
        double scaled = shifted * (1.0 - intensity * (1.0 - 1.0 / niche[i]));
        pop[i].shared_fitness = scaled + min_f - kEps;
    }
}

const Individual& select_tournament2(const std::vector<Individual>& pop, Rng& rng) {
    if (pop.empty())
        throw std::invalid_argument("population must be non-empty");
    std::uniform_int_distribution<size_t> pick(0, pop.size() - 1);
    const Individual& a = pop[pick(rng)];
    const Individual& b = pop[pick(rng)];
    return b.shared_fitness > a.shared_fitness ? b : a;
}

const Individual& select_roulette(const std::vector<Individual>& pop, Rng& rng) {
    if (pop.empty())
        throw std::invalid_argument("population must be non-empty");
    constexpr double kEps = 1e-6;
    double min_f = pop[0].raw_fitness;
    for (const Individual& ind : pop) min_f = std::min(min_f, ind.raw_fitness);
    double total = 0.0;
    for (const Individual& ind : pop) total += ind.raw_fitness - min_f + kEps;
    std::uniform_real_distribution<double> u(0.0, total);
    if (!(total > 0.0)) {
        std::uniform_int_distribution<size_t> pick(0, pop.size() - 1);
        return pop[pick(rng)];
    }
    double target = u(rng);
    double acc = 0.0;
    for (const Individual& ind : pop) {
        acc += ind.raw_fitness - min_f + kEps;
        if (target < acc) return ind;
    }
    return pop.back();
}

Genome crossover_blend(const Genome& a, const Genome& b, Rng& rng) {
    if (a.genes.size() != b.genes.size())
        throw std::invalid_argument("parents have different genome lengths");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Genome child;
    child.genes.resize(a.genes.size());
    constexpr double kAlpha = 0.5;
    for (size_t i = 0; i < a.genes.size(); ++i) {
        double lo = std::min(a.genes[i], b.genes[i]);
        double hi = std::max(a.genes[i], b.genes[i]);
        double d = hi - lo;
        double v = (lo - kAlpha * d) + u01(rng) * (d + 2.0 * kAlpha * d);
        child.genes[i] = std::clamp(v, 0.0, 1.0);
    }
    return child;
}

std::pair<Genome, Genome> crossover_one_point(const Genome& a, const Genome& b, Rng& rng) {
    if (a.genes.size() != b.genes.size())
        throw std::invalid_argument("parents have different genome lengths");
    if (a.genes.size() < 2)
        throw std::invalid_argument("one-point crossover needs genomes of length >= 2");
    std::uniform_int_distribution<size_t> cut(1, a.genes.size() - 1);
    size_t k = cut(rng);
    Genome ca = a, cb = b;
    for (size_t i = k; i < a.genes.size(); ++i) std::swap(ca.genes[i], cb.genes[i]);
    return {std::move(ca), std::move(cb)};
}

void mutate_uniform_redraw(Genome& g, double m, Rng& rng) {
    if (m < 0.0 || m > 1.0)
        throw std::invalid_argument("mutation probability must be in [0,1]");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double& gene : g.genes)
        if (u01(rng) < m) gene = u01(rng);
}

void mutate_delta(Genome& g, double m, double M, Rng& rng) {
    if (m < 0.0 || m > 1.0)
        throw std::invalid_argument("mutation probability must be in [0,1]");
    if (M <= 0.01)
        throw std::invalid_argument("mutation scale must exceed 0.01");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> udelta(0.01, M);
    for (double& gene : g.genes) {
        if (u01(rng) >= m) continue;
        double delta = udelta(rng);
        if (u01(rng) < 0.5) delta = -delta;
        gene = std::clamp(gene + delta, 0.0, 1.0);
    }
}

namespace {

GenerationStats collect_stats(const std::vector<Individual>& pop) {
    GenerationStats st;
    st.best_f = pop[0].raw_fitness;
    double sum = 0.0;
    for (const Individual& ind : pop) {
        st.best_f = std::max(st.best_f, ind.raw_fitness);
        sum += ind.raw_fitness;
    }
    st.mean_f = sum / static_cast<double>(pop.size());

    // Diversity: mean per-gene standard deviation across the population.
    size_t n_genes = pop[0].genome.genes.size();
    double acc = 0.0;
    for (size_t g = 0; g < n_genes; ++g) {
        double mean = 0.0;
        for (const Individual& ind : pop) mean += ind.genome.genes[g];
        mean /= static_cast<double>(pop.size());
        double var = 0.0;
        for (const Individual& ind : pop) {
            double d = ind.genome.genes[g] - mean;
            var += d * d;
        }
        acc += std::sqrt(var / static_cast<double>(pop.size()));
    }
    st.diversity = acc / static_cast<double>(n_genes);
    return st;
}

size_t best_index(const std::vector<Individual>& pop) {
    size_t best = 0;
    for (size_t i = 1; i < pop.size(); ++i)
        if (pop[i].raw_fitness > pop[best].raw_fitness) best = i;
    return best;
}

}  // namespace

void step_generation(GaState& state, const GaConfig& cfg, const RuleSet& rs, const Corpus& X,
                     Rng& rng) {
    const size_t p = state.pop.size();
    const size_t quota = (p + 1) / 2;
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    if (cfg.scheme == Scheme::PGE)
        share_fitness(state.pop, rs, cfg.effective_sigma(rs.size()), state.sharing_intensity);

    std::vector<Individual> offspring;
    offspring.reserve(quota + 1);
    while (offspring.size() < quota) {
        if (cfg.scheme == Scheme::PGE) {
            const Individual& pa = select_tournament2(state.pop, rng);
            const Individual& pb = select_tournament2(state.pop, rng);
            Individual child;
            child.genome = (u01(rng) < cfg.crossover_prob) ? crossover_blend(pa.genome, pb.genome, rng)
                                                           : pa.genome;
            mutate_uniform_redraw(child.genome, cfg.mutation_prob, rng);
            offspring.push_back(std::move(child));
        } else {
            const Individual& pa = select_roulette(state.pop, rng);
            const Individual& pb = select_roulette(state.pop, rng);
            Genome ca, cb;
            if (u01(rng) < cfg.crossover_prob) {
                std::tie(ca, cb) = crossover_one_point(pa.genome, pb.genome, rng);
            } else {
                ca = pa.genome;
                cb = pb.genome;
            }
            mutate_delta(ca, cfg.mutation_prob, cfg.mutation_scale, rng);
            mutate_delta(cb, cfg.mutation_prob, cfg.mutation_scale, rng);
            offspring.push_back(Individual{std::move(ca), 0.0, 0.0});
            if (offspring.size() < quota)
                offspring.push_back(Individual{std::move(cb), 0.0, 0.0});
        }
    }

    evaluate(offspring, rs, X, cfg.threads);

    // Merge offspring into the population and drop the quota worst of the
    // merged pool by raw fitness (stable: parents win ties over offspring).
    for (Individual& child : offspring) state.pop.push_back(std::move(child));
    std::stable_sort(state.pop.begin(), state.pop.end(),
                     [](const Individual& a, const Individual& b) {
                         return a.raw_fitness > b.raw_fitness;
                     });
    state.pop.resize(p);

    ++state.generation;
}

RunResult run(const GaConfig& cfg, const RuleSet& rs, const Corpus& X) {
    cfg.validate();
    Rng rng(cfg.seed);
    GaState state;
    state.pop = init_population(cfg, rs, rng);
    evaluate(state.pop, rs, X, cfg.threads);

    RunResult result;
    result.trace.push_back(collect_stats(state.pop));
    state.best_history.push_back(result.trace.back().best_f);

    // Sharing intensity tracks recent improvement: full sharing while the
    // run still makes progress, fading out as improvements vanish.
    constexpr int kIntensityWindow = 20;
    double max_improvement = 0.0;

    result.stop_reason = StopReason::MaxGenerations;
    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        if (cfg.scheme == Scheme::PGE) {
            if (state.generation < kIntensityWindow) {
                state.sharing_intensity = 1.0;
            } else {
                double imp = state.best_history.back() -
                             state.best_history[state.best_history.size() - 1 - kIntensityWindow];
                max_improvement = std::max(max_improvement, imp);
                state.sharing_intensity = max_improvement > 0.0 ? imp / max_improvement : 0.0;
            }
        }

        step_generation(state, cfg, rs, X, rng);
        result.trace.push_back(collect_stats(state.pop));
        state.best_history.push_back(result.trace.back().best_f);

        if (cfg.scheme == Scheme::PGE && cfg.convergence &&
            state.generation >= cfg.convergence->window) {
            double imp = state.best_history.back() -
                         state.best_history[state.best_history.size() - 1 - cfg.convergence->window];
            if (imp < cfg.convergence->min_improvement) {
                result.stop_reason = StopReason::Converged;
                break;
            }
        }
    }

    result.generations_run = state.generation;
    result.best = state.pop[best_index(state.pop)];
    result.theta_best = normalize_to_proper(result.best.genome, rs);
    return result;
}

}  // namespace pcfg
