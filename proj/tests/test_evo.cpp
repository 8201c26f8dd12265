#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "pcfg/evo.hpp"
#include "pcfg/inside.hpp"
#include "pcfg/languages.hpp"

using namespace pcfg;

namespace {

GaConfig toy_config(Scheme scheme) {
    GaConfig cfg;
    cfg.scheme = scheme;
    cfg.population_size = 8;
    cfg.crossover_prob = 0.5;
    cfg.mutation_prob = 0.01;
    cfg.mutation_scale = 0.5;
    cfg.max_generations = 10;
    cfg.seed = 7;
    return cfg;
}

bool in_unit_interval(const Genome& g) {
    return std::all_of(g.genes.begin(), g.genes.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
}

}  // namespace

TEST_CASE("init_population") {
    Rng rng(1);
    RuleSet rs = build_covering_ruleset(Alphabet("ab"), 1, 1);
    GaConfig cfg = toy_config(Scheme::MLGD);
    cfg.population_size = 2;
    auto pop = init_population(cfg, rs, rng);
    REQUIRE(pop.size() == 2);
    for (const auto& ind : pop) {
        CHECK(ind.genome.genes.size() == static_cast<size_t>(rs.size()));
        CHECK(in_unit_interval(ind.genome));
    }

    SUBCASE("fixed seed reproduces") {
        Rng r1(42), r2(42);
        auto p1 = init_population(cfg, rs, r1);
        auto p2 = init_population(cfg, rs, r2);
        for (size_t i = 0; i < p1.size(); ++i) CHECK(p1[i].genome.genes == p2[i].genome.genes);
    }

    SUBCASE("gene mean near 0.5 on the L1 covering set") {
        RuleSet l1 = build_covering_ruleset(Alphabet("abc"), 3, 4);
        GaConfig big = toy_config(Scheme::MLGD);
        big.population_size = 40;
        Rng r(3);
        auto pop40 = init_population(big, l1, r);
        double sum = 0.0;
        size_t n = 0;
        for (const auto& ind : pop40)
            for (double g : ind.genome.genes) sum += g, ++n;
        CHECK(n == 40u * 205u);
        CHECK(sum / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.1));
    }
}

TEST_CASE("evaluate matches the inside module") {
    RuleSet rs = reference_grammar(ToyLanguage::L2);
    Corpus X = builtin_training_set(ToyLanguage::L2);
    Rng rng(5);
    GaConfig cfg = toy_config(Scheme::MLGD);
    auto pop = init_population(cfg, rs, rng);
    pop[1] = pop[0];  // identical genomes -> identical fitness
    evaluate(pop, rs, X);
    CHECK(pop[0].raw_fitness == pop[1].raw_fitness);
    for (const auto& ind : pop) {
        Pcfg g(rs, normalize_to_proper(ind.genome, rs));
        CHECK(ind.raw_fitness == doctest::Approx(corpus_mean_log_likelihood(g, X)).epsilon(1e-12));
    }

    SUBCASE("threaded evaluation agrees with serial") {
        auto serial = pop;
        auto threaded = pop;
        evaluate(serial, rs, X, 1);
        evaluate(threaded, rs, X, 4);
        for (size_t i = 0; i < pop.size(); ++i)
            CHECK(serial[i].raw_fitness == threaded[i].raw_fitness);
    }
}

TEST_CASE("share_fitness") {
    RuleSet rs = build_covering_ruleset(Alphabet("ab"), 1, 1);
    std::vector<Individual> pop(3);
    pop[0].genome.genes = {1.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    pop[1].genome.genes = {0.0, 1.0, 0.0, 1.0, 0.0, 0.0};
    pop[2].genome.genes = {0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    pop[0].raw_fitness = -1.0;
    pop[1].raw_fitness = -2.0;
    pop[2].raw_fitness = -3.0;

    SUBCASE("all pairwise distances >= sigma: shared == raw") {
        share_fitness(pop, rs, 0.1, 1.0);
        for (const auto& ind : pop) CHECK(ind.shared_fitness == doctest::Approx(ind.raw_fitness));
    }

    SUBCASE("intensity 0 disables sharing") {
        share_fitness(pop, rs, 100.0, 0.0);
        for (const auto& ind : pop) CHECK(ind.shared_fitness == doctest::Approx(ind.raw_fitness));
    }

    SUBCASE("identical genomes share equally and are penalized") {
        pop[1] = pop[0];
        share_fitness(pop, rs, 0.5, 1.0);
        CHECK(pop[0].shared_fitness == pop[1].shared_fitness);
        CHECK(pop[0].shared_fitness < pop[0].raw_fitness + 1e-12);
    }

    SUBCASE("sigma must be positive") {
        CHECK_THROWS_AS(share_fitness(pop, rs, 0.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("select_tournament2") {
    std::vector<Individual> pop(2);
    pop[0].shared_fitness = -1.0;
    pop[1].shared_fitness = -2.0;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Individual& w = select_tournament2(pop, rng);
        CHECK(w.shared_fitness >= -2.0);
    }

    SUBCASE("population of one") {
        std::vector<Individual> solo(1);
        solo[0].shared_fitness = -5.0;
        CHECK(&select_tournament2(solo, rng) == &solo[0]);
    }

    SUBCASE("selection frequency of the best is ~ 5/9 over three candidates") {
        std::vector<Individual> three(3);
        three[0].shared_fitness = -1.0;
        three[1].shared_fitness = -2.0;
        three[2].shared_fitness = -3.0;
        Rng r(2);
        int best = 0;
        const int kDraws = 100000;
        for (int i = 0; i < kDraws; ++i)
            if (select_tournament2(three, r).shared_fitness == -1.0) ++best;
        // exact probability 1 - (2/3)^2 = 5/9; 3 sigma ~ 0.005
        CHECK(best / static_cast<double>(kDraws) == doctest::Approx(5.0 / 9.0).epsilon(0.02));
    }
}

TEST_CASE("select_roulette") {
    SUBCASE("shifted weights in ratio 1:3 give probabilities ~[0.25, 0.75]") {
        // min individual carries only the eps weight; the other two get 1 and 3.
        std::vector<Individual> pop(3);
        pop[0].raw_fitness = -6.0;
        pop[1].raw_fitness = -5.0;  // shifted weight 1 + eps
        pop[2].raw_fitness = -3.0;  // shifted weight 3 + eps
        Rng rng(3);
        int hi = 0, lo = 0;
        const int kDraws = 100000;
        for (int i = 0; i < kDraws; ++i) {
            double f = select_roulette(pop, rng).raw_fitness;
            if (f == -3.0) ++hi;
            if (f == -5.0) ++lo;
        }
        CHECK(hi / static_cast<double>(kDraws) == doctest::Approx(0.75).epsilon(0.02));
        CHECK(lo / static_cast<double>(kDraws) == doctest::Approx(0.25).epsilon(0.02));
    }

    SUBCASE("equal fitness selects uniformly") {
        std::vector<Individual> pop(3);
        pop[0].raw_fitness = pop[1].raw_fitness = pop[2].raw_fitness = -4.2;
        Rng rng(4);
        std::map<const Individual*, int> hits;
        const int kDraws = 90000;
        for (int i = 0; i < kDraws; ++i) ++hits[&select_roulette(pop, rng)];
        for (const auto& [ind, n] : hits)
            CHECK(n / static_cast<double>(kDraws) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    }

    SUBCASE("empirical frequencies match shifted-weight proportions within 3 sigma") {
        std::vector<Individual> pop(3);
        pop[0].raw_fitness = -5.0;
        pop[1].raw_fitness = -4.0;
        pop[2].raw_fitness = -2.0;
        const double eps = 1e-6;
        double w[3] = {eps, 1.0 + eps, 3.0 + eps};
        double W = w[0] + w[1] + w[2];
        Rng rng(5);
        int hits[3] = {0, 0, 0};
        const int kDraws = 100000;
        for (int i = 0; i < kDraws; ++i) {
            const Individual* s = &select_roulette(pop, rng);
            hits[s - pop.data()]++;
        }
        for (int i = 0; i < 3; ++i) {
            double expect = w[i] / W;
            double sigma = std::sqrt(expect * (1.0 - expect) / kDraws);
            CHECK(std::abs(hits[i] / static_cast<double>(kDraws) - expect) <= 3.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("crossover_blend") {
    Rng rng(6);
    SUBCASE("identical parents reproduce exactly") {
        Genome a{{0.1, 0.5, 0.9}};
        Genome child = crossover_blend(a, a, rng);
        CHECK(child.genes == a.genes);
    }

    SUBCASE("child stays in the BLX-0.5 hull, clipped to [0,1]") {
        Genome a{{0.2, 0.0}}, b{{0.4, 1.0}};
        for (int i = 0; i < 1000; ++i) {
            Genome child = crossover_blend(a, b, rng);
            CHECK(child.genes[0] >= 0.1);
            CHECK(child.genes[0] <= 0.5);
            CHECK(child.genes[1] >= 0.0);
            CHECK(child.genes[1] <= 1.0);
        }
    }

    SUBCASE("length mismatch") {
        Genome a{{0.1}}, b{{0.1, 0.2}};
        CHECK_THROWS_AS(crossover_blend(a, b, rng), std::invalid_argument);
    }
}

TEST_CASE("crossover_one_point") {
    Rng rng(7);
    Genome a{{0.1, 0.2, 0.3, 0.4}}, b{{0.5, 0.6, 0.7, 0.8}};

    SUBCASE("children swap suffixes at the cut") {
        auto [ca, cb] = crossover_one_point(a, b, rng);
        // find the cut: prefix from a, suffix from b (and vice versa)
        size_t k = 0;
        while (k < 4 && ca.genes[k] == a.genes[k]) ++k;
        CHECK(k >= 1);
        CHECK(k <= 3);
        for (size_t i = 0; i < 4; ++i) {
            CHECK(ca.genes[i] == (i < k ? a.genes[i] : b.genes[i]));
            CHECK(cb.genes[i] == (i < k ? b.genes[i] : a.genes[i]));
        }
    }

    SUBCASE("identical parents") {
        auto [ca, cb] = crossover_one_point(a, a, rng);
        CHECK(ca.genes == a.genes);
        CHECK(cb.genes == a.genes);
    }

    SUBCASE("gene multiset preserved across the pair") {
        for (int i = 0; i < 100; ++i) {
            auto [ca, cb] = crossover_one_point(a, b, rng);
            std::vector<double> merged = ca.genes;
            merged.insert(merged.end(), cb.genes.begin(), cb.genes.end());
            std::vector<double> original = a.genes;
            original.insert(original.end(), b.genes.begin(), b.genes.end());
            std::sort(merged.begin(), merged.end());
            std::sort(original.begin(), original.end());
            CHECK(merged == original);
        }
    }

    SUBCASE("length < 2") {
        Genome s{{0.5}};
        CHECK_THROWS_AS(crossover_one_point(s, s, rng), std::invalid_argument);
    }
}

TEST_CASE("mutate_uniform_redraw") {
    Rng rng(8);
    Genome g{{0.1, 0.2, 0.3}};

    SUBCASE("m = 0 leaves the genome unchanged") {
        Genome copy = g;
        mutate_uniform_redraw(copy, 0.0, rng);
        CHECK(copy.genes == g.genes);
    }

    SUBCASE("m = 1 redraws every gene into [0,1]") {
        Genome copy = g;
        mutate_uniform_redraw(copy, 1.0, rng);
        for (double v : copy.genes) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    SUBCASE("expected mutation count ~ m * len") {
        Genome big;
        big.genes.assign(205, 0.5);
        double changed = 0.0;
        const int kTrials = 10000;
        for (int t = 0; t < kTrials; ++t) {
            Genome copy = big;
            mutate_uniform_redraw(copy, 0.01, rng);
            for (size_t i = 0; i < copy.genes.size(); ++i)
                if (copy.genes[i] != big.genes[i]) changed += 1.0;
        }
        CHECK(changed / kTrials == doctest::Approx(2.05).epsilon(0.05));
    }
}

TEST_CASE("mutate_delta") {
    SUBCASE("negative results clip to zero (rule concealed)") {
        Rng rng(9);
        Genome g;
        g.genes.assign(1000, 0.005);
        mutate_delta(g, 1.0, 0.5, rng);
        int zeros = 0;
        for (double v : g.genes) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            if (v == 0.0) ++zeros;
        }
        CHECK(zeros > 0);  // any negative delta beats 0.005: about half the genes
        CHECK(zeros > 300);
    }

    SUBCASE("upper clamp at 1.0") {
        Rng rng(10);
        Genome g;
        g.genes.assign(1000, 0.95);
        mutate_delta(g, 1.0, 0.9, rng);
        for (double v : g.genes) CHECK(v <= 1.0);
        CHECK(std::count(g.genes.begin(), g.genes.end(), 1.0) > 0);
    }

    SUBCASE("deltas stay within U(0.01, M)") {
        Rng rng(11);
        Genome g;
        g.genes.assign(1000, 0.5);
        mutate_delta(g, 1.0, 0.3, rng);
        for (double v : g.genes) {
            double delta = std::abs(v - 0.5);
            CHECK(delta >= 0.01);
            CHECK(delta <= 0.3);
        }
    }
}

TEST_CASE("step_generation") {
    RuleSet rs = reference_grammar(ToyLanguage::L2);
    Corpus X = builtin_training_set(ToyLanguage::L2);

    for (Scheme scheme : {Scheme::PGE, Scheme::MLGD}) {
        CAPTURE(scheme_name(scheme));
        GaConfig cfg = toy_config(scheme);
        Rng rng(cfg.seed);
        GaState state;
        state.pop = init_population(cfg, rs, rng);
        evaluate(state.pop, rs, X);

        SUBCASE("population size is preserved and best never decreases") {
            double best = -1e300;
            for (const auto& ind : state.pop) best = std::max(best, ind.raw_fitness);
            for (int g = 0; g < 20; ++g) {
                step_generation(state, cfg, rs, X, rng);
                CHECK(state.pop.size() == static_cast<size_t>(cfg.population_size));
                double new_best = -1e300;
                for (const auto& ind : state.pop) new_best = std::max(new_best, ind.raw_fitness);
                CHECK(new_best >= best - 1e-15);
                best = new_best;
            }
        }

        SUBCASE("c = 0, m = 0 only copies existing individuals") {
            GaConfig frozen = cfg;
            frozen.crossover_prob = 0.0;
            frozen.mutation_prob = 0.0;
            std::set<std::vector<double>> before;
            for (const auto& ind : state.pop) before.insert(ind.genome.genes);
            double old_best = -1e300;
            for (const auto& ind : state.pop) old_best = std::max(old_best, ind.raw_fitness);
            step_generation(state, frozen, rs, X, rng);
            double new_best = -1e300;
            for (const auto& ind : state.pop) {
                CHECK(before.count(ind.genome.genes) == 1);
                new_best = std::max(new_best, ind.raw_fitness);
            }
            CHECK(new_best == old_best);
        }
    }
}

TEST_CASE("run") {
    RuleSet rs = reference_grammar(ToyLanguage::L2);
    Corpus X = builtin_training_set(ToyLanguage::L2);

    SUBCASE("max_generations = 0 returns the best of the initial population") {
        GaConfig cfg = toy_config(Scheme::MLGD);
        cfg.max_generations = 0;
        RunResult r = run(cfg, rs, X);
        CHECK(r.generations_run == 0);
        CHECK(r.trace.size() == 1);
        CHECK(r.best.raw_fitness == r.trace[0].best_f);
    }

    SUBCASE("fixed seed gives a bit-identical trace") {
        for (Scheme scheme : {Scheme::PGE, Scheme::MLGD}) {
            GaConfig cfg = toy_config(scheme);
            RunResult a = run(cfg, rs, X);
            RunResult b = run(cfg, rs, X);
            REQUIRE(a.trace.size() == b.trace.size());
            for (size_t i = 0; i < a.trace.size(); ++i) {
                CHECK(a.trace[i].best_f == b.trace[i].best_f);
                CHECK(a.trace[i].mean_f == b.trace[i].mean_f);
                CHECK(a.trace[i].diversity == b.trace[i].diversity);
            }
            CHECK(a.best.genome.genes == b.best.genome.genes);

            GaConfig threaded = cfg;
            threaded.threads = 4;
            RunResult c = run(threaded, rs, X);
            CHECK(a.best.genome.genes == c.best.genome.genes);
            CHECK(a.trace.back().best_f == c.trace.back().best_f);
        }
    }

    SUBCASE("best trace is monotone and genes stay in range") {
        GaConfig cfg = toy_config(Scheme::MLGD);
        cfg.max_generations = 50;
        RunResult r = run(cfg, rs, X);
        for (size_t i = 1; i < r.trace.size(); ++i)
            CHECK(r.trace[i].best_f >= r.trace[i - 1].best_f - 1e-15);
        CHECK(in_unit_interval(r.best.genome));
    }

    SUBCASE("PGE convergence stop") {
        GaConfig cfg = toy_config(Scheme::PGE);
        cfg.max_generations = 2000;
        cfg.convergence = ConvergenceCriterion{10, 1e-9};
        RunResult r = run(cfg, rs, X);
        CHECK(r.stop_reason == StopReason::Converged);
        CHECK(r.generations_run < 2000);
    }

    SUBCASE("config validation") {
        GaConfig cfg = toy_config(Scheme::MLGD);
        cfg.population_size = 1;
        CHECK_THROWS_AS(run(cfg, rs, X), std::invalid_argument);
        cfg = toy_config(Scheme::MLGD);
        cfg.mutation_scale = 0.005;
        CHECK_THROWS_AS(run(cfg, rs, X), std::invalid_argument);
    }
}

TEST_CASE("gene range preserved under random operator sequences") {
    Rng rng(13);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Genome a, b;
    a.genes.resize(20);
    b.genes.resize(20);
    for (double& v : a.genes) v = u01(rng);
    for (double& v : b.genes) v = u01(rng);
    for (int i = 0; i < 10000; ++i) {
        switch (i % 4) {
            case 0: a = crossover_blend(a, b, rng); break;
            case 1: std::tie(a, b) = crossover_one_point(a, b, rng); break;
            case 2: mutate_uniform_redraw(a, 0.3, rng); break;
            case 3: mutate_delta(b, 0.3, 0.9, rng); break;
        }
        REQUIRE(in_unit_interval(a));
        REQUIRE(in_unit_interval(b));
    }
}
