// SPDX-License-Identifier: Apache-2.0

#include "qalign/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qalign/experiments.hpp"
#include "qalign/gasp.hpp"
#include "qalign/qsa.hpp"
#include "qalign/registers.hpp"
#include "qalign/rng.hpp"
#include "qalign/verify.hpp"

namespace qalign {

namespace {

/// Input problems that should exit with the usage code.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string db_path;
    std::string target;
    std::string alphabet_path;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 0;
    std::string layer_policy = "paper";
    unsigned repeats = QsaConfig{}.repeats;
    double fidelity = 1.0;
    bool full = false;
    bool blind = false;
    bool strict = false;
    std::string out_path;
    unsigned ga_population = GaConfig{}.population_size;
    unsigned ga_generations = GaConfig{}.max_generations;
};

struct SweepOptions {
    std::vector<unsigned> qubits{3, 4, 5, 6};
    double fidelity_step = 0.05;
    unsigned trials = 10;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 0;
    std::string rule = "floor";
    std::string layer_policy = "paper";
    unsigned repeats = QsaConfig{}.repeats;
    bool full = false;
    unsigned jobs = 1;
    std::string out_dir;
};

struct LayersOptions {
    unsigned n = 5;
    unsigned p_max = 8;
    std::uint64_t seed = 0;
    std::uint64_t shots = 4096;
    std::string rule = "ceil";
};

struct GaspOptions {
    std::string db_path;
    double fidelity = 1.0;
    std::uint64_t seed = 0;
    unsigned population = GaConfig{}.population_size;
    unsigned generations = GaConfig{}.max_generations;
    double fidelity_target = GaConfig{}.fidelity_target;
    std::string out_path;
};

struct VerifyCliOptions {
    std::string level = "quick";
    std::uint64_t seed = 0;
    std::string inject_fault;
};

Database load_db_or_usage(const std::string& path) {
    try {
        return load_database(path);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

TargetSequence resolve_target(const RunOptions& opts, unsigned width) {
    std::string bits = opts.target;
    if (!opts.alphabet_path.empty()) {
        try {
            bits = encode_sequence(opts.target, load_alphabet(opts.alphabet_path));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (bits.empty() || !std::all_of(bits.begin(), bits.end(), [](char c) { return c == '0' || c == '1'; })) {
        throw UsageError("target must be a bitstring (or symbols with --alphabet)");
    }
    if (bits.size() != width) {
        throw UsageError("target has " + std::to_string(bits.size()) + " bits but the database width is " +
                         std::to_string(width));
    }
    return TargetSequence::from_bitstring(bits);
}

LayerPolicy policy_or_usage(const std::string& name) {
    try {
        return parse_policy(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const Database db = load_db_or_usage(opts.db_path);
    const TargetSequence target = resolve_target(opts, db.width());
    if (!(opts.fidelity > 0.0 && opts.fidelity <= 1.0)) {
        throw UsageError("--fidelity must lie in (0, 1]");
    }

    QsaConfig config;
    config.shots = opts.shots;
    config.seed = opts.seed;
    config.repeats = opts.repeats;
    config.blind = opts.blind;
    config.layer_policy = policy_or_usage(opts.layer_policy);

    Circuit loader = exact_loader(db);
    double loader_fidelity = 1.0;
    if (opts.fidelity < 1.0 || opts.full) {
        const Statevector ideal = database_state(db);
        if (opts.full) {
            GaConfig ga;
            ga.seed = derive_seed(opts.seed, {101});
            ga.population_size = opts.ga_population;
            ga.max_generations = opts.ga_generations;
            CalibratedLoader calibrated = fidelity_calibrated_loader(db, opts.fidelity, ga);
            loader = std::move(calibrated.circuit);
            loader_fidelity = calibrated.fidelity_to_database;
        } else {
            const PerturbedState perturbed = perturb_state(ideal, opts.fidelity, derive_seed(opts.seed, {102}));
            loader = state_preparation(perturbed.state);
            loader_fidelity = fidelity(ideal, run(loader));
        }
    }

    const QsaResult result = run_qsa(loader, db, target, config);
    nlohmann::json record = result_record(result, db, target, config);
    record["loader_fidelity"] = loader_fidelity;
    out << record.dump() << '\n';

    err << "match " << to_bitstring(result.match, result.n) << " at distance " << result.distance << " (classical d_min "
        << result.d_min_classical << "), " << result.layers_used << " layer(s), accuracy " << std::fixed
        << std::setprecision(4) << result.accuracy << (result.degraded ? ", DEGRADED" : "") << '\n';

    if (!opts.out_path.empty()) {
        std::ofstream file(opts.out_path);
        if (!file) {
            throw std::runtime_error("cannot write " + opts.out_path);
        }
        file << record.dump() << '\n';
    }
    return opts.strict && result.degraded ? kExitRuntime : kExitOk;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
    SweepConfig config;
    config.qubit_sizes = opts.qubits;
    config.fidelities.clear();
    if (!(opts.fidelity_step > 0.0 && opts.fidelity_step <= 1.0)) {
        throw UsageError("--fidelity-step must lie in (0, 1]");
    }
    const auto steps = static_cast<int>(std::llround(1.0 / opts.fidelity_step));
    for (int i = 1; i <= steps; ++i) {
        config.fidelities.push_back(std::min(1.0, std::round(i * opts.fidelity_step * 1e9) / 1e9));
    }
    config.trials = opts.trials;
    config.shots = opts.shots;
    config.seed = opts.seed;
    config.repeats = opts.repeats;
    config.jobs = opts.jobs;
    config.mode = opts.full ? LoaderMode::full : LoaderMode::fast;
    try {
        config.rule = parse_db_size_rule(opts.rule);
        config.layer_policy = parse_policy(opts.layer_policy);
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const std::filesystem::path dir(opts.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto records_path = dir / "records.jsonl";
    const auto summary_path = dir / "summary.csv";
    std::ofstream records_file(records_path);
    std::ofstream summary_file(summary_path);
    if (ec || !records_file || !summary_file) {
        throw std::runtime_error("cannot write to output directory " + dir.string());
    }

    err << "sweep: n=";
    for (std::size_t i = 0; i < config.qubit_sizes.size(); ++i) {
        err << (i ? "," : "") << config.qubit_sizes[i];
    }
    err << ", " << config.fidelities.size() << " fidelities, " << config.trials << " trials, "
        << (config.mode == LoaderMode::fast ? "fast" : "full") << " mode\n";

    const SweepOutput result = fidelity_sweep(config, &err);
    write_records(records_file, result.records);
    write_summary_csv(summary_file, result.summary);
    write_plot_files(dir, result.summary);

    const auto failures = std::count_if(result.records.begin(), result.records.end(),
                                        [](const SweepRecord& r) { return r.error.has_value(); });
    out << nlohmann::json{{"records", result.records.size()},
                          {"failed_trials", failures},
                          {"records_file", records_path.string()},
                          {"summary_file", summary_path.string()}}
               .dump()
        << '\n';
    return kExitOk;
}

int cmd_layers(const LayersOptions& opts, std::ostream& out) {
    DbSizeRule rule;
    try {
        rule = parse_db_size_rule(opts.rule);
        if (opts.n < 3 || opts.n > 8) {
            throw std::invalid_argument("--n must lie in [3, 8]");
        }
        if (opts.p_max == 0) {
            throw std::invalid_argument("--p-max must be at least 1");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const LayerStudy study = layer_study(opts.n, opts.p_max, opts.seed, opts.shots, rule);
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : study.points) {
        points.push_back({{"p", p.layers},
                          {"marked_probability", p.marked_probability},
                          {"predicted_probability", p.predicted_probability},
                          {"accuracy", p.accuracy}});
    }
    std::vector<std::string> entries;
    for (auto e : study.db.entries()) {
        entries.push_back(to_bitstring(e, opts.n));
    }
    out << nlohmann::json{{"n", opts.n},
                          {"N", study.db.size()},
                          {"database", entries},
                          {"target", study.target.to_string()},
                          {"optimal_layers", optimal_layers(study.db.size(), 1)},
                          {"best_integer_layers", best_integer_layers(study.db.size(), 1)},
                          {"seed", opts.seed},
                          {"points", points}}
               .dump()
        << '\n';
    return kExitOk;
}

int cmd_gasp(const GaspOptions& opts, std::ostream& out, std::ostream& err) {
    const Database db = load_db_or_usage(opts.db_path);
    if (!(opts.fidelity > 0.0 && opts.fidelity <= 1.0)) {
        throw UsageError("--fidelity must lie in (0, 1]");
    }
    GaConfig ga;
    ga.seed = opts.seed;
    ga.population_size = opts.population;
    ga.max_generations = opts.generations;
    ga.fidelity_target = opts.fidelity_target;
    try {
        ga.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const CalibratedLoader loader = fidelity_calibrated_loader(db, opts.fidelity, ga);
    const CircuitStats stats = circuit_stats(loader.circuit);
    const nlohmann::json summary{{"n", db.width()},
                                 {"N", db.size()},
                                 {"requested_fidelity", opts.fidelity},
                                 {"fidelity_to_database", loader.fidelity_to_database},
                                 {"fidelity_to_perturbed", loader.fidelity_to_perturbed},
                                 {"converged", loader.converged},
                                 {"epsilon", loader.perturbation.epsilon},
                                 {"gates", stats.gates},
                                 {"cnots", stats.multi_qubit_gates},
                                 {"depth", stats.depth},
                                 {"seed", opts.seed}};
    if (opts.out_path.empty()) {
        write_circuit(out, loader.circuit);
        err << summary.dump() << '\n';
    } else {
        std::ofstream file(opts.out_path);
        if (!file) {
            throw std::runtime_error("cannot write " + opts.out_path);
        }
        write_circuit(file, loader.circuit);
        out << summary.dump() << '\n';
    }
    return kExitOk;
}

int cmd_verify(const VerifyCliOptions& opts, std::ostream& out) {
    VerifyOptions options;
    if (opts.level == "quick") {
        options.level = VerifyLevel::quick;
    } else if (opts.level == "full") {
        options.level = VerifyLevel::full;
    } else {
        throw UsageError("--level must be quick or full");
    }
    options.seed = opts.seed;
    options.inject_fault = opts.inject_fault;
    bool all = true;
    for (const auto& check : run_verification(options)) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
        all = all && check.passed;
    }
    return all ? kExitOk : kExitRuntime;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grover-based sequence alignment on a statevector simulator", "qalign"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Align one target against a database");
    run->add_option("--db", run_opts.db_path, "Database file (n=<width> header, one bitstring per line)")->required();
    run->add_option("--target", run_opts.target, "Target bitstring, or symbols when --alphabet is given")->required();
    run->add_option("--alphabet", run_opts.alphabet_path, "Alphabet file, one symbol per line");
    run->add_option("--shots", run_opts.shots, "Shots per attempt")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_opts.seed, "Master seed");
    run->add_option("--layer-policy", run_opts.layer_policy, "paper or best")->check(CLI::IsMember({"paper", "best"}));
    run->add_option("--repeats", run_opts.repeats, "Attempts per Hamming distance")->check(CLI::PositiveNumber);
    run->add_option("--fidelity", run_opts.fidelity, "Data-register preparation fidelity in (0, 1]");
    auto* run_fast = run->add_flag("--fast", "Load the perturbed state exactly (default)");
    run->add_flag("--full", run_opts.full, "Synthesize the loader with GASP")->excludes(run_fast);
    run->add_flag("--blind", run_opts.blind, "Ignore classical match counts: one layer per distance, no skipping");
    run->add_flag("--strict", run_opts.strict, "Exit 2 when no distance level accepted a candidate");
    run->add_option("--out", run_opts.out_path, "Also write the JSON record here");
    run->add_option("--ga-population", run_opts.ga_population, "GASP population size (--full)");
    run->add_option("--ga-generations", run_opts.ga_generations, "GASP generation budget (--full)");

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "Accuracy against preparation fidelity");
    sweep->add_option("--qubits", sweep_opts.qubits, "Data-register sizes (3..8)")->delimiter(',');
    sweep->add_option("--fidelity-step", sweep_opts.fidelity_step, "Fidelity grid step; the grid is step..1");
    sweep->add_option("--trials", sweep_opts.trials, "Trials per point")->check(CLI::PositiveNumber);
    sweep->add_option("--shots", sweep_opts.shots, "Shots per attempt")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_opts.seed, "Master seed");
    sweep->add_option("--db-size-rule", sweep_opts.rule, "floor or ceil of 2^n/n")->check(CLI::IsMember({"floor", "ceil"}));
    sweep->add_option("--layer-policy", sweep_opts.layer_policy, "paper or best")->check(CLI::IsMember({"paper", "best"}));
    sweep->add_option("--repeats", sweep_opts.repeats, "Attempts per Hamming distance")->check(CLI::PositiveNumber);
    auto* sweep_fast = sweep->add_flag("--fast", "Load perturbed states exactly (default)");
    sweep->add_flag("--full", sweep_opts.full, "Synthesize every loader with GASP")->excludes(sweep_fast);
    sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_opts.out_dir, "Output directory")->required();

    LayersOptions layers_opts;
    auto* layers = app.add_subcommand("layers", "Accuracy against Grover layer count");
    layers->add_option("--n", layers_opts.n, "Data-register size");
    layers->add_option("--p-max", layers_opts.p_max, "Largest layer count");
    layers->add_option("--seed", layers_opts.seed, "Seed");
    layers->add_option("--shots", layers_opts.shots, "Shots per layer count")->check(CLI::PositiveNumber);
    layers->add_option("--db-size-rule", layers_opts.rule, "floor or ceil of 2^n/n")->check(CLI::IsMember({"floor", "ceil"}));

    GaspOptions gasp_opts;
    auto* gasp = app.add_subcommand("gasp", "Synthesize a database loader circuit");
    gasp->add_option("--db", gasp_opts.db_path, "Database file")->required();
    gasp->add_option("--fidelity", gasp_opts.fidelity, "Perturb the database state to this fidelity first");
    gasp->add_option("--seed", gasp_opts.seed, "Seed");
    gasp->add_option("--population", gasp_opts.population, "Population size");
    gasp->add_option("--generations", gasp_opts.generations, "Generation budget");
    gasp->add_option("--target-fidelity", gasp_opts.fidelity_target, "Stop once this fidelity is reached");
    gasp->add_option("--out", gasp_opts.out_path, "Circuit output file (stdout when omitted)");

    VerifyCliOptions verify_opts;
    auto* verify = app.add_subcommand("verify", "Run the invariant checks");
    verify->add_option("--level", verify_opts.level, "quick or full");
    verify->add_option("--seed", verify_opts.seed, "Seed");
    verify->add_option("--inject-fault", verify_opts.inject_fault, "Corrupt a circuit (popcount, entangler, oracle)")
        ->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_opts, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_opts, out, err);
        }
        if (layers->parsed()) {
            return cmd_layers(layers_opts, out);
        }
        if (gasp->parsed()) {
            return cmd_gasp(gasp_opts, out, err);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_opts, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace qalign
