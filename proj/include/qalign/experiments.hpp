// SPDX-License-Identifier: Apache-2.0

// Random instances and the two studies: accuracy against Grover layer count
// and accuracy against data-register preparation fidelity.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qalign/gasp.hpp"
#include "qalign/qsa.hpp"
#include "qalign/registers.hpp"

namespace qalign {

enum class DbSizeRule { floor, ceil };

DbSizeRule parse_db_size_rule(const std::string& name);
std::string rule_name(DbSizeRule rule);

/// floor(2^n / n) or ceil(2^n / n).
std::size_t database_size(unsigned n, DbSizeRule rule);

/// database_size(n, rule) distinct uniformly drawn n-bit strings.
Database random_database(unsigned n, DbSizeRule rule, std::uint64_t seed);

/// Uniform n-bit string, independent of any database.
TargetSequence random_target(unsigned n, std::uint64_t seed);

struct LayerPoint {
    unsigned layers;
    double marked_probability;
    double predicted_probability;  // sin^2((2p + 1) theta)
    /// Cosine similarity between sampled counts and the solution
    /// distribution (all weight on the target's branch).
    double accuracy;
};

struct LayerStudy {
    Database db;
    TargetSequence target;
    std::vector<LayerPoint> points;
};

/// Picks a random database (ceil rule by default, giving N = 7 at n = 5) and
/// a target drawn from it, then runs the fixed delta = 0 search for
/// p = 0..p_max layers (p = 0 is the unamplified baseline) with the exact loader.
LayerStudy layer_study(unsigned n, unsigned p_max, std::uint64_t seed, std::uint64_t shots = 4096,
                       DbSizeRule rule = DbSizeRule::ceil);

enum class LoaderMode {
    fast,  // exact preparation of the perturbed state
    full,  // GASP synthesis against the perturbed state
};

struct SweepConfig {
    std::vector<unsigned> qubit_sizes{3, 4, 5, 6};
    std::vector<double> fidelities = default_fidelities();
    unsigned trials = 10;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 0;
    DbSizeRule rule = DbSizeRule::floor;
    LoaderMode mode = LoaderMode::fast;
    LayerPolicy layer_policy = LayerPolicy::paper_ceil;
    unsigned repeats = QsaConfig{}.repeats;
    unsigned jobs = 1;
    GaConfig ga{};

    /// 0.05, 0.10, ..., 1.00.
    static std::vector<double> default_fidelities();
    void validate() const;
};

struct SweepRecord {
    unsigned n = 0;
    std::size_t database_size = 0;
    double target_fidelity = 0.0;
    double achieved_fidelity = 0.0;
    unsigned trial = 0;
    double accuracy = 0.0;
    unsigned distance_found = 0;
    unsigned d_min_classical = 0;
    unsigned layers = 0;
    unsigned layers_paper = 0;
    unsigned layers_best = 0;
    bool degraded = false;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::uint64_t hermitian_seed = 0;
    std::optional<std::string> error;
};

struct SummaryRow {
    unsigned n;
    std::size_t database_size;
    double fidelity;
    double mean_accuracy;
    double std_accuracy;  // sample standard deviation; 0 for a single trial
    std::size_t trials;   // successful trials only
};

struct SweepOutput {
    std::vector<SweepRecord> records;
    std::vector<SummaryRow> summary;
};

/// Seed of one (n, fidelity index, trial) work item.
std::uint64_t trial_seed(std::uint64_t master, unsigned n, std::size_t fidelity_index, unsigned trial);

/// Runs one sweep point.
SweepRecord run_trial(const SweepConfig& config, unsigned n, std::size_t fidelity_index, unsigned trial);

/// Every (n, fidelity, trial) point on a pool of config.jobs workers. Records
/// come back in (n, fidelity, trial) order regardless of scheduling. Progress
/// lines go to `log` when given.
SweepOutput fidelity_sweep(const SweepConfig& config, std::ostream* log = nullptr);

std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records);

nlohmann::json to_json(const SweepRecord& record);
void write_records(std::ostream& out, const std::vector<SweepRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
/// One whitespace-separated `fidelity mean std` file per n, plot_n<n>.dat.
void write_plot_files(const std::filesystem::path& dir, const std::vector<SummaryRow>& summary);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qalign
