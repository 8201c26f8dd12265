#ifndef PCFG_EVO_HPP
#define PCFG_EVO_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pcfg/corpus.hpp"
#include "pcfg/grammar.hpp"
#include "pcfg/inside.hpp"
#include "pcfg/languages.hpp"

namespace pcfg {

enum class Scheme { PGE, MLGD };

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

// PGE stop criterion: stop once best fitness improves by less than
// min_improvement nats over the trailing window generations.
struct ConvergenceCriterion {
    int window = 50;
    double min_improvement = 1e-6;
};

struct GaConfig {
    Scheme scheme = Scheme::MLGD;
    int population_size = 40;       // p
    double crossover_prob = 0.5;    // c
    double mutation_prob = 0.001;   // m, per gene
    double mutation_scale = 0.5;    // M, MLGD only; deltas drawn from U(0.01, M)
    double sharing_sigma = 0.0;     // PGE only; <= 0 means the default 0.05*sqrt(|R|)
    int max_generations = 1000;
    std::optional<ConvergenceCriterion> convergence;  // PGE only
    std::uint64_t seed = 0;
    int threads = 1;  // fitness evaluation only; results merged in index order

    void validate() const;
    double effective_sigma(int n_rules) const;
};

struct Individual {
    Genome genome;
    double raw_fitness = 0.0;     // f(z), nats, maximization sense
    double shared_fitness = 0.0;  // defined after a sharing pass (PGE)
};

struct GenerationStats {
    double best_f = 0.0;
    double mean_f = 0.0;
    double diversity = 0.0;  // mean per-gene standard deviation
};

enum class StopReason { MaxGenerations, Converged };

struct RunResult {
    Individual best;
    ProbabilityAssignment theta_best;
    std::vector<GenerationStats> trace;  // entry 0 is the initial population
    int generations_run = 0;
    StopReason stop_reason = StopReason::MaxGenerations;
};

// --- operators ---------------------------------------------------------

std::vector<Individual> init_population(const GaConfig& cfg, const RuleSet& rs, Rng& rng);

// raw_fitness = corpus mean log-likelihood of the normalized genome.
void evaluate(std::vector<Individual>& pop, const RuleSet& rs, const Corpus& X, int threads = 1);

// Triangular fitness sharing on Euclidean distances between normalized
// theta vectors. intensity 1 = full sharing, 0 = shared_fitness := raw.
void share_fitness(std::vector<Individual>& pop, const RuleSet& rs, double sigma, double intensity);

// Two uniform draws with replacement; higher shared_fitness wins, first
// drawn on ties.
const Individual& select_tournament2(const std::vector<Individual>& pop, Rng& rng);

// Probability proportional to raw_fitness shifted by the population minimum
// plus 1e-6.
const Individual& select_roulette(const std::vector<Individual>& pop, Rng& rng);

// BLX-0.5: per gene uniform on [min - d/2, max + d/2], clipped to [0,1].
Genome crossover_blend(const Genome& a, const Genome& b, Rng& rng);

// Cut point uniform in [1, len-1]; children swap suffixes.
std::pair<Genome, Genome> crossover_one_point(const Genome& a, const Genome& b, Rng& rng);

// Each gene redrawn from U(0,1) with probability m.
void mutate_uniform_redraw(Genome& g, double m, Rng& rng);

// Each gene shifted by +-U(0.01, M) with probability m; clipped to [0,1].
// Clipping at 0 conceals the rule.
void mutate_delta(Genome& g, double m, double M, Rng& rng);

// --- run loop ----------------------------------------------------------

struct GaState {
    std::vector<Individual> pop;
    int generation = 0;
    std::vector<double> best_history;  // best raw_fitness per generation
    double sharing_intensity = 1.0;    // PGE; recomputed each generation
};

// One steady-state generation: ceil(p/2) offspring via selection ->
// crossover (prob c, else copy) -> mutation, replacing the worst ceil(p/2).
void step_generation(GaState& state, const GaConfig& cfg, const RuleSet& rs, const Corpus& X,
                     Rng& rng);

RunResult run(const GaConfig& cfg, const RuleSet& rs, const Corpus& X);

}  // namespace pcfg

#endif
