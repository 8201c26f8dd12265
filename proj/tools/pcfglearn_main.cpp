// Experiment runner: dataset generation, training, evaluation, parameter
// sweeps. See README for the config file keys.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcfg/corpus.hpp"
#include "pcfg/errors.hpp"
#include "pcfg/eval.hpp"
#include "pcfg/evo.hpp"
#include "pcfg/grammar.hpp"
#include "pcfg/inside.hpp"
#include "pcfg/languages.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pcfg;

namespace {

// ---------------------------------------------------------------------------
// Config file: flat "key = value" lines, '#' comments, brace lists for sweep
// axes, e.g.  population = {40, 80, 160}
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::vector<std::string>>;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

ConfigMap read_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open config file: " + path.string());
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::vector<std::string> values;
        if (!value.empty() && value.front() == '{') {
            if (value.back() != '}')
                throw std::invalid_argument("unterminated list for key " + key);
            std::stringstream ss(value.substr(1, value.size() - 2));
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) values.push_back(item);
            }
            if (values.empty())
                throw std::invalid_argument("empty list for key " + key);
        } else {
            values.push_back(value);
        }
        cfg[key] = std::move(values);
    }
    return cfg;
}

// One concrete experiment setup (lists already resolved to single values).
struct ExperimentConfig {
    Scheme scheme = Scheme::MLGD;
    std::string language;  // "L1", "L2", or empty when file-driven
    fs::path train_file, test_pos_file, test_neg_file;
    CorpusFormat format = CorpusFormat::Plain;
    std::string alphabet;  // empty = builtin/file-derived
    int n_lex = 3;
    int n_struct = 4;
    int population = 40;
    double crossover = 0.5;
    double mutation = 0.001;
    double mutation_scale = 0.5;
    double sharing_sigma = 0.0;
    int max_generations = 1000;
    std::optional<ConvergenceCriterion> convergence;
    int repeats = 1;
    std::vector<double> thresholds = {0.01, 0.05};
    std::uint64_t seed = 0;
    fs::path out_dir = "out";
    ScoreMode score_mode = ScoreMode::Normalized;
    bool verbatim_l1 = false;
    // builtin test-set regeneration parameters
    int test_pos_count = 0;  // 0 = language default
    int test_neg_count = 100;
    int max_len = 0;  // 0 = language default
    int threads = 1;
};

template <typename T>
T parse_number(const std::string& s, const std::string& key);

template <>
double parse_number<double>(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config field '" + key + "': not a number: " + s);
    }
}

template <>
int parse_number<int>(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config field '" + key + "': not an integer: " + s);
    }
}

std::string single(const ConfigMap& cfg, const std::string& key, const std::string& fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    if (it->second.size() != 1)
        throw std::invalid_argument("config field '" + key + "' must be a single value here");
    return it->second[0];
}

// Keys allowed to carry sweep lists.
const std::vector<std::string> kAxisKeys = {"population", "crossover", "mutation",
                                            "mutation_scale", "covering"};

void apply_scalar(ExperimentConfig& ec, const std::string& key, const std::string& v) {
    if (key == "scheme") ec.scheme = scheme_from_name(v);
    else if (key == "language") ec.language = v;
    else if (key == "train") ec.train_file = v;
    else if (key == "test_pos") ec.test_pos_file = v;
    else if (key == "test_neg") ec.test_neg_file = v;
    else if (key == "format") {
        if (v == "plain") ec.format = CorpusFormat::Plain;
        else if (v == "fasta") ec.format = CorpusFormat::Fasta;
        else throw std::invalid_argument("config field 'format': plain or fasta, got " + v);
    } else if (key == "alphabet") ec.alphabet = v;
    else if (key == "n_lex") ec.n_lex = parse_number<int>(v, key);
    else if (key == "n_struct") ec.n_struct = parse_number<int>(v, key);
    else if (key == "covering") {
        auto plus = v.find('+');
        if (plus == std::string::npos)
            throw std::invalid_argument("config field 'covering': expected n_lex+n_struct, got " + v);
        ec.n_lex = parse_number<int>(trim(v.substr(0, plus)), key);
        ec.n_struct = parse_number<int>(trim(v.substr(plus + 1)), key);
    } else if (key == "population") ec.population = parse_number<int>(v, key);
    else if (key == "crossover") ec.crossover = parse_number<double>(v, key);
    else if (key == "mutation") ec.mutation = parse_number<double>(v, key);
    else if (key == "mutation_scale") ec.mutation_scale = parse_number<double>(v, key);
    else if (key == "sharing_sigma") ec.sharing_sigma = parse_number<double>(v, key);
    else if (key == "max_generations") ec.max_generations = parse_number<int>(v, key);
    else if (key == "convergence_window") {
        if (!ec.convergence) ec.convergence = ConvergenceCriterion{};
        ec.convergence->window = parse_number<int>(v, key);
    } else if (key == "convergence_ratio") {
        if (!ec.convergence) ec.convergence = ConvergenceCriterion{};
        ec.convergence->min_improvement = parse_number<double>(v, key);
    } else if (key == "repeats") ec.repeats = parse_number<int>(v, key);
    else if (key == "seed") ec.seed = static_cast<std::uint64_t>(std::stoull(v));
    else if (key == "out_dir") ec.out_dir = v;
    else if (key == "score_mode") {
        if (v == "normalized") ec.score_mode = ScoreMode::Normalized;
        else if (v == "raw") ec.score_mode = ScoreMode::Raw;
        else throw std::invalid_argument("config field 'score_mode': normalized or raw, got " + v);
    } else if (key == "verbatim_l1") ec.verbatim_l1 = (v == "true" || v == "1");
    else if (key == "test_pos_count") ec.test_pos_count = parse_number<int>(v, key);
    else if (key == "test_neg_count") ec.test_neg_count = parse_number<int>(v, key);
    else if (key == "max_len") ec.max_len = parse_number<int>(v, key);
    else if (key == "thresholds") ec.thresholds = {parse_number<double>(v, key)};
    else throw std::invalid_argument("unknown config field '" + key + "'");
}

ExperimentConfig build_experiment(const ConfigMap& cfg) {
    ExperimentConfig ec;
    for (const auto& [key, values] : cfg) {
        if (key == "thresholds") {
            ec.thresholds.clear();
            for (const auto& v : values) ec.thresholds.push_back(parse_number<double>(v, key));
            continue;
        }
        if (values.size() > 1)
            throw std::invalid_argument("config field '" + key +
                                        "' holds a list; lists are only valid in sweep mode");
        apply_scalar(ec, key, values[0]);
    }
    if (ec.repeats < 1)
        throw std::invalid_argument("config field 'repeats' must be >= 1");
    return ec;
}

int language_default_pos(const std::string& lang) { return lang == "L2" ? 10 : 76; }
int language_default_max_len(const std::string& lang) { return lang == "L2" ? 12 : 24; }

// ---------------------------------------------------------------------------
// Dataset resolution
// ---------------------------------------------------------------------------

struct ResolvedData {
    Alphabet alphabet{"abc"};
    LabeledSample sample;
};

ResolvedData resolve_data(const ExperimentConfig& ec) {
    ResolvedData data;
    if (!ec.language.empty()) {
        ToyLanguage lang = toy_language_from_name(ec.language);
        data.alphabet = toy_alphabet();
        data.sample.train = builtin_training_set(lang, ec.verbatim_l1);
        if (!ec.test_pos_file.empty())
            data.sample.test_pos = read_corpus(ec.test_pos_file, ec.format);
        if (!ec.test_neg_file.empty())
            data.sample.test_neg = read_corpus(ec.test_neg_file, ec.format);
        if (ec.test_pos_file.empty() && ec.test_neg_file.empty()) {
            // Regenerate test sets of the published sizes from the run seed.
            Rng rng(ec.seed ^ 0x9e3779b97f4a7c15ULL);
            int pos_count = ec.test_pos_count > 0 ? ec.test_pos_count : language_default_pos(ec.language);
            int max_len = ec.max_len > 0 ? ec.max_len : language_default_max_len(ec.language);
            data.sample.test_pos = sample_positive(lang, pos_count, max_len, rng);
            std::vector<int> lengths;
            for (const auto& x : data.sample.test_pos.sentences)
                lengths.push_back(static_cast<int>(x.size()));
            data.sample.test_neg = sample_negative(lang, ec.test_neg_count, lengths, rng);
        }
        if (!ec.train_file.empty())
            data.sample.train = read_corpus(ec.train_file, ec.format);
    } else {
        if (ec.train_file.empty())
            throw std::invalid_argument("config needs either 'language' or a 'train' file");
        data.sample.train = read_corpus(ec.train_file, ec.format);
        if (!ec.test_pos_file.empty())
            data.sample.test_pos = read_corpus(ec.test_pos_file, ec.format);
        if (!ec.test_neg_file.empty())
            data.sample.test_neg = read_corpus(ec.test_neg_file, ec.format);
        data.alphabet = Alphabet(ec.alphabet.empty() ? distinct_symbols(data.sample.train)
                                                     : ec.alphabet);
    }
    return data;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot write file: " + path.string());
    os << text;
}

void write_trace_csv(const fs::path& path, const RunResult& result) {
    std::ostringstream os;
    os << "generation,best_f,mean_f,diversity\n";
    for (size_t g = 0; g < result.trace.size(); ++g)
        os << g << ',' << format_double(result.trace[g].best_f) << ','
           << format_double(result.trace[g].mean_f) << ','
           << format_double(result.trace[g].diversity) << '\n';
    write_text_file(path, os.str());
}

json config_json(const ExperimentConfig& ec) {
    json j;
    j["scheme"] = scheme_name(ec.scheme);
    j["language"] = ec.language;
    j["n_lex"] = ec.n_lex;
    j["n_struct"] = ec.n_struct;
    j["population"] = ec.population;
    j["crossover"] = ec.crossover;
    j["mutation"] = ec.mutation;
    j["mutation_scale"] = ec.mutation_scale;
    j["sharing_sigma"] = ec.sharing_sigma;
    j["max_generations"] = ec.max_generations;
    j["repeats"] = ec.repeats;
    j["seed"] = ec.seed;
    j["score_mode"] = ec.score_mode == ScoreMode::Raw ? "raw" : "normalized";
    if (ec.convergence) {
        j["convergence_window"] = ec.convergence->window;
        j["convergence_ratio"] = ec.convergence->min_improvement;
    }
    return j;
}

struct RunArtifacts {
    double best_f = 0.0;
    double perplexity = 0.0;
    std::optional<double> auroc;
    int active_rules = 0;
    int generations = 0;
};

GaConfig to_ga_config(const ExperimentConfig& ec, std::uint64_t run_seed) {
    GaConfig ga;
    ga.scheme = ec.scheme;
    ga.population_size = ec.population;
    ga.crossover_prob = ec.crossover;
    ga.mutation_prob = ec.mutation;
    ga.mutation_scale = ec.mutation_scale;
    ga.sharing_sigma = ec.sharing_sigma;
    ga.max_generations = ec.max_generations;
    ga.convergence = ec.convergence;
    if (ec.scheme == Scheme::PGE && !ga.convergence) ga.convergence = ConvergenceCriterion{};
    ga.seed = run_seed;
    ga.threads = ec.threads;
    return ga;
}

// Executes one GA run and writes report.json, trace.csv, grammar.txt.
RunArtifacts execute_run(const ExperimentConfig& ec, const ResolvedData& data, int run_index,
                         const fs::path& run_dir) {
    RuleSet rs = build_covering_ruleset(data.alphabet, ec.n_lex, ec.n_struct);
    std::uint64_t run_seed = ec.seed + static_cast<std::uint64_t>(run_index);
    GaConfig ga = to_ga_config(ec, run_seed);
    RunResult result = run(ga, rs, data.sample.train);

    Pcfg best(rs, result.theta_best);
    EvalReport report = evaluate_grammar(best, data.sample, ec.thresholds, ec.score_mode);

    fs::create_directories(run_dir);
    json j;
    j["config"] = config_json(ec);
    j["run_index"] = run_index;
    j["seed"] = run_seed;
    j["best_f"] = result.best.raw_fitness;
    j["generations_run"] = result.generations_run;
    j["stop_reason"] =
        result.stop_reason == StopReason::Converged ? "converged" : "max-generations";
    j["perplexity_nats_per_letter"] = report.perplexity_nats_per_letter;
    if (report.auroc) j["auroc"] = *report.auroc; else j["auroc"] = nullptr;
    json ar = json::object();
    for (const auto& [t, n] : report.active_rules) {
        std::ostringstream key;
        key << t;
        ar[key.str()] = n;
    }
    j["active_rules"] = ar;
    j["scores_pos"] = report.scores_pos;
    j["scores_neg"] = report.scores_neg;
    j["fold"] = report.fold;
    write_text_file(run_dir / "report.json", j.dump(2) + "\n");
    write_trace_csv(run_dir / "trace.csv", result);
    write_text_file(run_dir / "grammar.txt", dump_grammar(best));

    RunArtifacts a;
    a.best_f = result.best.raw_fitness;
    a.perplexity = report.perplexity_nats_per_letter;
    a.auroc = report.auroc;
    a.active_rules = report.active_rules.empty() ? 0 : report.active_rules.begin()->second;
    a.generations = result.generations_run;
    return a;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_gen_data(const std::string& lang_name, int pos_count, int neg_count, int max_len,
                 std::uint64_t seed, const fs::path& out_dir, bool verbatim) {
    ToyLanguage lang = toy_language_from_name(lang_name);
    if (pos_count <= 0) pos_count = language_default_pos(lang_name);
    if (max_len <= 0) max_len = language_default_max_len(lang_name);

    Rng rng(seed);
    Corpus train = builtin_training_set(lang, verbatim);
    Corpus pos = sample_positive(lang, pos_count, max_len, rng);
    std::vector<int> lengths;
    for (const auto& x : pos.sentences) lengths.push_back(static_cast<int>(x.size()));
    Corpus neg = sample_negative(lang, neg_count, lengths, rng);

    fs::create_directories(out_dir);
    write_corpus(train, out_dir / "train.txt");
    write_corpus(pos, out_dir / "test_pos.txt");
    write_corpus(neg, out_dir / "test_neg.txt");

    json manifest;
    manifest["language"] = lang_name;
    manifest["seed"] = seed;
    manifest["train_size"] = train.size();
    manifest["test_pos_size"] = pos.size();
    manifest["test_neg_size"] = neg.size();
    manifest["max_len"] = max_len;
    manifest["verbatim"] = verbatim;
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "wrote " << train.size() << " train / " << pos.size() << " pos / " << neg.size()
              << " neg sentences to " << out_dir.string() << "\n";
    return 0;
}

int cmd_train(const fs::path& config_path, std::optional<std::uint64_t> seed_override,
              std::optional<fs::path> out_override, int threads) {
    ConfigMap cfg = read_config_file(config_path);
    ExperimentConfig ec = build_experiment(cfg);
    if (seed_override) ec.seed = *seed_override;
    if (out_override) ec.out_dir = *out_override;
    ec.threads = threads;

    ResolvedData data = resolve_data(ec);
    fs::create_directories(ec.out_dir);

    std::printf("%-4s %-12s %-12s %-8s %-8s %-6s\n", "run", "best_f", "perplexity", "auroc",
                "active", "gens");
    std::ostringstream timings;
    for (int r = 0; r < ec.repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        RunArtifacts a = execute_run(ec, data, r, ec.out_dir / ("run" + std::to_string(r)));
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings << "run" << r << " " << secs << "s\n";
        std::printf("%-4d %-12.5f %-12.5f %-8.4f %-8d %-6d\n", r, a.best_f, a.perplexity,
                    a.auroc.value_or(-1.0), a.active_rules, a.generations);
    }
    write_text_file(ec.out_dir / "timings.txt", timings.str());
    return 0;
}

int cmd_evaluate(const fs::path& grammar_path, const fs::path& train_path,
                 const fs::path& pos_path, const fs::path& neg_path,
                 const std::vector<double>& thresholds, CorpusFormat format, ScoreMode mode,
                 const fs::path& out_path) {
    std::ifstream is(grammar_path);
    if (!is)
        throw IoError("cannot open grammar dump: " + grammar_path.string());
    Pcfg g = parse_grammar_dump(is);

    LabeledSample sample;
    if (!train_path.empty()) sample.train = read_corpus(train_path, format);
    if (!pos_path.empty()) sample.test_pos = read_corpus(pos_path, format);
    if (!neg_path.empty()) sample.test_neg = read_corpus(neg_path, format);

    EvalReport report = evaluate_grammar(g, sample, thresholds, mode);
    std::string out = report.to_json();
    if (out_path.empty())
        std::cout << out;
    else
        write_text_file(out_path, out);
    return 0;
}

int cmd_parse(const fs::path& grammar_path, const fs::path& input_path, CorpusFormat format,
              ScoreMode mode) {
    std::ifstream is(grammar_path);
    if (!is)
        throw IoError("cannot open grammar dump: " + grammar_path.string());
    Pcfg g = parse_grammar_dump(is);
    Corpus corpus = read_corpus(input_path, format);
    InsideEvaluator ev(g.ruleset);
    ev.set_theta(g.theta);
    for (const Sentence& x : corpus.sentences)
        std::cout << format_double(sentence_score(ev, x, mode)) << '\t' << x << '\n';
    return 0;
}

struct SweepSetup {
    ExperimentConfig ec;
    std::string tag;
};

std::string setup_tag(const ExperimentConfig& ec) {
    std::ostringstream os;
    os << scheme_name(ec.scheme) << "_cov" << ec.n_lex << "+" << ec.n_struct << "_p"
       << ec.population << "_c" << ec.crossover << "_m" << ec.mutation;
    if (ec.scheme == Scheme::MLGD) os << "_M" << ec.mutation_scale;
    return os.str();
}

std::vector<SweepSetup> build_sweep(const ConfigMap& cfg, bool full_grid) {
    // Baseline: every axis at its middle value.
    ConfigMap base = cfg;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& key : kAxisKeys) {
        auto it = cfg.find(key);
        if (it == cfg.end() || it->second.size() < 2) continue;
        axes.emplace_back(key, it->second);
        base[key] = {it->second[(it->second.size() - 1) / 2]};
    }
    if (axes.empty())
        throw std::invalid_argument("sweep config has no list-valued axis");

    std::vector<SweepSetup> setups;
    auto add_setup = [&](const ConfigMap& m) {
        SweepSetup s;
        s.ec = build_experiment(m);
        s.tag = setup_tag(s.ec);
        for (const auto& existing : setups)
            if (existing.tag == s.tag) return;
        setups.push_back(std::move(s));
    };

    if (full_grid) {
        std::vector<size_t> idx(axes.size(), 0);
        while (true) {
            ConfigMap m = base;
            for (size_t a = 0; a < axes.size(); ++a) m[axes[a].first] = {axes[a].second[idx[a]]};
            add_setup(m);
            size_t a = 0;
            while (a < axes.size() && ++idx[a] == axes[a].second.size()) idx[a++] = 0;
            if (a == axes.size()) break;
        }
    } else {
        // Baseline-anchored: vary one axis at a time.
        for (const auto& [key, values] : axes) {
            for (const auto& v : values) {
                ConfigMap m = base;
                m[key] = {v};
                add_setup(m);
            }
        }
    }
    return setups;
}

int cmd_sweep(const fs::path& config_path, bool full_grid, std::optional<fs::path> out_override,
              int threads) {
    ConfigMap cfg = read_config_file(config_path);
    std::vector<SweepSetup> setups = build_sweep(cfg, full_grid);

    fs::path out_dir = out_override.value_or(fs::path(single(cfg, "out_dir", "sweep_out")));
    fs::create_directories(out_dir);

    std::ostringstream timings;
    for (auto& setup : setups) {
        setup.ec.threads = threads;
        ResolvedData data = resolve_data(setup.ec);
        for (int r = 0; r < setup.ec.repeats; ++r) {
            fs::path run_dir = out_dir / setup.tag / ("run" + std::to_string(r));
            if (fs::exists(run_dir / "report.json")) continue;  // resumable
            auto t0 = std::chrono::steady_clock::now();
            execute_run(setup.ec, data, r, run_dir);
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            timings << setup.tag << " run" << r << " " << secs << "s\n";
        }
    }

    // Summary assembled from reports in deterministic setup order.
    std::ostringstream csv;
    csv << "scheme,n_lex,n_struct,population,crossover,mutation,mutation_scale,repeat,"
           "best_f,perplexity,auroc,active_rules,generations\n";
    for (const auto& setup : setups) {
        for (int r = 0; r < setup.ec.repeats; ++r) {
            fs::path report_path = out_dir / setup.tag / ("run" + std::to_string(r)) / "report.json";
            std::ifstream is(report_path);
            if (!is)
                throw IoError("missing sweep report: " + report_path.string());
            json j = json::parse(is);
            const ExperimentConfig& ec = setup.ec;
            csv << scheme_name(ec.scheme) << ',' << ec.n_lex << ',' << ec.n_struct << ','
                << ec.population << ',' << format_double(ec.crossover) << ','
                << format_double(ec.mutation) << ',' << format_double(ec.mutation_scale) << ','
                << r << ',' << format_double(j["best_f"].get<double>()) << ','
                << format_double(j["perplexity_nats_per_letter"].get<double>()) << ','
                << (j["auroc"].is_null() ? std::string("")
                                         : format_double(j["auroc"].get<double>()))
                << ',';
            const json& ar = j["active_rules"];
            csv << (ar.empty() ? 0 : ar.begin().value().get<int>()) << ','
                << j["generations_run"].get<int>() << '\n';
        }
    }
    write_text_file(out_dir / "summary.csv", csv.str());
    write_text_file(out_dir / "timings.txt", timings.str());
    std::cout << "sweep complete: " << setups.size() << " setups, summary at "
              << (out_dir / "summary.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCFG probability learning via genetic algorithms"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate toy-language train/test files");
    std::string gen_lang = "L1";
    int gen_pos = 0, gen_neg = 100, gen_max_len = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "data";
    bool gen_verbatim = false;
    gen->add_option("--lang", gen_lang, "L1 or L2");
    gen->add_option("--pos", gen_pos, "positive test-set size (default: language standard)");
    gen->add_option("--neg", gen_neg, "negative test-set size");
    gen->add_option("--max-len", gen_max_len, "maximum positive sentence length");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_flag("--verbatim", gen_verbatim, "keep the published L1 training set misprint");

    // train
    auto* train = app.add_subcommand("train", "run GA training from a config file");
    std::string train_config;
    std::uint64_t train_seed = 0;
    bool train_seed_set = false;
    std::string train_out;
    int train_threads = 1;
    train->add_option("--config", train_config)->required();
    train->add_option("--seed", train_seed)->each([&](const std::string&) { train_seed_set = true; });
    train->add_option("--out", train_out);
    train->add_option("--threads", train_threads);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a grammar dump against corpora");
    std::string eval_grammar, eval_train, eval_pos, eval_neg, eval_out, eval_format = "plain",
                              eval_score = "normalized";
    std::vector<double> eval_thresholds = {0.01, 0.05};
    eval_cmd->add_option("--grammar", eval_grammar)->required();
    eval_cmd->add_option("--train", eval_train);
    eval_cmd->add_option("--pos", eval_pos);
    eval_cmd->add_option("--neg", eval_neg);
    eval_cmd->add_option("--thresholds", eval_thresholds);
    eval_cmd->add_option("--format", eval_format, "plain or fasta");
    eval_cmd->add_option("--score", eval_score, "normalized or raw");
    eval_cmd->add_option("--out", eval_out, "report path (default: stdout)");

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "score sentences from a file");
    std::string parse_grammar, parse_input, parse_format = "plain", parse_score = "normalized";
    parse_cmd->add_option("--grammar", parse_grammar)->required();
    parse_cmd->add_option("--input", parse_input)->required();
    parse_cmd->add_option("--format", parse_format);
    parse_cmd->add_option("--score", parse_score);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "parameter sweep from a config with lists");
    std::string sweep_config, sweep_out;
    bool sweep_full = false;
    int sweep_threads = 1;
    sweep->add_option("--config", sweep_config)->required();
    sweep->add_flag("--full-grid", sweep_full, "cartesian product instead of one-axis-at-a-time");
    sweep->add_option("--out", sweep_out);
    sweep->add_option("--threads", sweep_threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto to_format = [](const std::string& f) {
        if (f == "plain") return CorpusFormat::Plain;
        if (f == "fasta") return CorpusFormat::Fasta;
        throw std::invalid_argument("--format must be plain or fasta");
    };
    auto to_mode = [](const std::string& s) {
        if (s == "normalized") return ScoreMode::Normalized;
        if (s == "raw") return ScoreMode::Raw;
        throw std::invalid_argument("--score must be normalized or raw");
    };

    try {
        if (*gen)
            return cmd_gen_data(gen_lang, gen_pos, gen_neg, gen_max_len, gen_seed, gen_out,
                                gen_verbatim);
        if (*train)
            return cmd_train(train_config,
                             train_seed_set ? std::optional<std::uint64_t>(train_seed) : std::nullopt,
                             train_out.empty() ? std::nullopt : std::optional<fs::path>(train_out),
                             train_threads);
        if (*eval_cmd)
            return cmd_evaluate(eval_grammar, eval_train, eval_pos, eval_neg, eval_thresholds,
                                to_format(eval_format), to_mode(eval_score), eval_out);
        if (*parse_cmd)
            return cmd_parse(parse_grammar, parse_input, to_format(parse_format),
                             to_mode(parse_score));
        if (*sweep)
            return cmd_sweep(sweep_config, sweep_full,
                             sweep_out.empty() ? std::nullopt : std::optional<fs::path>(sweep_out),
                             sweep_threads);
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violation: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
