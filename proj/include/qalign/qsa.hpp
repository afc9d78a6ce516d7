// SPDX-License-Identifier: Apache-2.0

// End-to-end alignment driver: walk delta = 0, 1, ... and run a Grover search
// for database entries at exactly that Hamming distance from the target,
// accepting the first candidate that checks out classically.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qalign/grover.hpp"
#include "qalign/registers.hpp"
#include "qalign/simcore.hpp"

namespace qalign {

enum class LayerPolicy {
    paper_ceil,    // ceil((pi / 4) sqrt(N / c))
    best_integer,  // argmax_p sin^2((2p + 1) theta)
};

struct QsaConfig {
    std::uint64_t shots = 4096;
    /// Attempts per delta before moving on. Each attempt resamples the same
    /// final state with a fresh seed.
    unsigned repeats = 6;
    LayerPolicy layer_policy = LayerPolicy::paper_ceil;
    std::uint64_t seed = 0;
    /// No classical match counts: one layer per delta and no skipping.
    bool blind = false;
};

struct QsaResult {
    unsigned n = 0;
    std::uint64_t match = 0;
    unsigned distance = 0;
    unsigned layers_used = 0;
    std::vector<unsigned> delta_trace;
    Counts counts;
    double accuracy = 0.0;
    /// Set when no delta produced an accepted candidate; `match` is then the
    /// closest candidate seen.
    bool degraded = false;
    unsigned d_min_classical = 0;
};

struct MinHamming {
    unsigned distance;
    std::vector<std::uint64_t> matches;
};

/// Brute force over the database. Throws on an empty database.
MinHamming classical_min_hamming(const Database& db, const TargetSequence& target);

std::uint64_t count_matches(const Database& db, const TargetSequence& target, unsigned delta);

/// Cosine similarity between the normalised counts vector and the outcome
/// distribution |<i|ideal>|^2 over every basis outcome.
double accuracy(const Counts& counts, const Statevector& ideal);

/// Most frequent outcome; ties go to the smallest index.
std::uint64_t most_frequent(const Counts& counts);

unsigned choose_layers(LayerPolicy policy, std::uint64_t database_size, std::uint64_t matches);

/// Runs the search with `db_loader` preparing the data register. Accuracy is
/// scored against the final state the same circuit produces with the exact
/// database loader, so an approximate loader lowers it.
QsaResult run_qsa(const Circuit& db_loader, const Database& db, const TargetSequence& target,
                  const QsaConfig& config);

nlohmann::json result_record(const QsaResult& result, const Database& db,
                             const TargetSequence& target, const QsaConfig& config);

std::string policy_name(LayerPolicy policy);
LayerPolicy parse_policy(const std::string& name);

}  // namespace qalign
