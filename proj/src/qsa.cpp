// SPDX-License-Identifier: Apache-2.0

#include "qalign/qsa.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "qalign/rng.hpp"

namespace qalign {

MinHamming classical_min_hamming(const Database& db, const TargetSequence& target) {
    if (db.size() == 0) {
        throw std::invalid_argument("database is empty");
    }
    MinHamming best{target.n + 1, {}};
    for (auto entry : db.entries()) {
        const unsigned d = hamming_distance(entry, target.bits);
        if (d < best.distance) {
            best.distance = d;
            best.matches.clear();
        }
        if (d == best.distance) {
            best.matches.push_back(entry);
        }
    }
    return best;
}

std::uint64_t count_matches(const Database& db, const TargetSequence& target, unsigned delta) {
    std::uint64_t c = 0;
    for (auto entry : db.entries()) {
        c += hamming_distance(entry, target.bits) == delta ? 1 : 0;
    }
    return c;
}

double accuracy(const Counts& counts, const Statevector& ideal) {
    std::uint64_t total = 0;
    for (const auto& [outcome, count] : counts) {
        if (outcome >= ideal.dimension()) {
            throw std::invalid_argument("outcome outside the ideal state's basis");
        }
        total += count;
    }
    if (total == 0) {
        throw std::invalid_argument("accuracy needs at least one count");
    }
    double dot = 0.0;
    double u_norm2 = 0.0;
    for (const auto& [outcome, count] : counts) {
        const double u = static_cast<double>(count) / static_cast<double>(total);
        dot += u * ideal.probability(outcome);
        u_norm2 += u * u;
    }
    double v_norm2 = 0.0;
    for (const auto& a : ideal.amplitudes()) {
        const double v = std::norm(a);
        v_norm2 += v * v;
    }
    return std::clamp(dot / std::sqrt(u_norm2 * v_norm2), 0.0, 1.0);
}

std::uint64_t most_frequent(const Counts& counts) {
    if (counts.empty()) {
        throw std::invalid_argument("empty counts");
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) {
            best = it;
        }
    }
    return best->first;
}

unsigned choose_layers(LayerPolicy policy, std::uint64_t database_size, std::uint64_t matches) {
    return policy == LayerPolicy::paper_ceil ? optimal_layers(database_size, matches)
                                             : best_integer_layers(database_size, matches);
}

namespace {

std::uint64_t nearest_entry(const Database& db, std::uint64_t value) {
    std::uint64_t best = db.entries().front();
    for (auto entry : db.entries()) {
        const auto d = hamming_distance(entry, value);
        const auto bd = hamming_distance(best, value);
        if (d < bd || (d == bd && entry < best)) {
            best = entry;
        }
    }
    return best;
}

struct Attempt {
    unsigned delta;
    unsigned layers;
    Counts counts;
    Statevector state;
};

}  // namespace

QsaResult run_qsa(const Circuit& db_loader, const Database& db, const TargetSequence& target,
                  const QsaConfig& config) {
    const unsigned n = db.width();
    if (db_loader.num_qubits() != n || target.n != n) {
        throw std::invalid_argument("loader, database and target widths must agree");
    }
    if (config.shots == 0 || config.repeats == 0) {
        throw std::invalid_argument("shots and repeats must be at least 1");
    }
    const RegisterLayout layout(n);
    const Circuit exact = exact_loader(db);
    const Circuit u = initialisation_unitary(db_loader, target, layout);

    QsaResult result;
    result.n = n;
    result.d_min_classical = classical_min_hamming(db, target).distance;

    std::optional<Attempt> last;
    std::optional<std::uint64_t> closest;
    std::optional<std::uint64_t> first_unverified;
    bool accepted = false;

    for (unsigned delta = 0; delta <= n && !accepted; ++delta) {
        unsigned layers = 1;
        if (!config.blind) {
            const auto c = count_matches(db, target, delta);
            if (c == 0) {
                continue;
            }
            layers = choose_layers(config.layer_policy, db.size(), c);
        }
        result.delta_trace.push_back(delta);
        Statevector state = run(grover_circuit(u, OracleSpec{delta, layout}, layers));

        for (unsigned rep = 0; rep < config.repeats; ++rep) {
            Counts counts = sample_counts(state, config.shots, derive_seed(config.seed, {delta, rep}));
            const std::uint64_t candidate = layout.data_value(most_frequent(counts));
            const unsigned d = hamming_distance(candidate, target.bits);
            // Only database entries count as verified; an approximate loader
            // can put weight on strings outside the database.
            const bool verified = db.contains(candidate);
            if (verified && (!closest || d < hamming_distance(*closest, target.bits))) {
                closest = candidate;
            }
            if (!verified && !first_unverified) {
                first_unverified = candidate;
            }
            last = Attempt{delta, layers, std::move(counts), state};
            if (verified && d == delta) {
                accepted = true;
                result.match = candidate;
                break;
            }
        }
    }

    if (!last) {
        throw std::logic_error("no delta level was attempted");
    }
    if (!accepted) {
        result.degraded = true;
        // Nothing sampled was a database entry: fall back to the entry nearest
        // the first unverified candidate (smallest index on ties).
        result.match = closest ? *closest : nearest_entry(db, *first_unverified);
    }
    result.distance = hamming_distance(result.match, target.bits);
    result.layers_used = last->layers;
    result.counts = std::move(last->counts);

    if (db_loader == exact) {
        result.accuracy = accuracy(result.counts, last->state);
    } else {
        const Circuit ideal_u = initialisation_unitary(exact, target, layout);
        const Statevector ideal =
            run(grover_circuit(ideal_u, OracleSpec{last->delta, layout}, last->layers));
        result.accuracy = accuracy(result.counts, ideal);
    }
    return result;
}

nlohmann::json result_record(const QsaResult& result, const Database& db,
                             const TargetSequence& target, const QsaConfig& config) {
    return nlohmann::json{
        {"n", result.n},
        {"N", db.size()},
        {"target", target.to_string()},
        {"d_min_classical", result.d_min_classical},
        {"match", to_bitstring(result.match, result.n)},
        {"distance", result.distance},
        {"layers", result.layers_used},
        {"shots", config.shots},
        {"accuracy", result.accuracy},
        {"seed", config.seed},
        {"degraded", result.degraded},
        {"delta_trace", result.delta_trace},
    };
}

std::string policy_name(LayerPolicy policy) {
    return policy == LayerPolicy::paper_ceil ? "paper" : "best";
}

LayerPolicy parse_policy(const std::string& name) {
    if (name == "paper" || name == "paper_ceil") {
        return LayerPolicy::paper_ceil;
    }
    if (name == "best" || name == "best_integer") {
        return LayerPolicy::best_integer;
    }
    throw std::invalid_argument("unknown layer policy '" + name + "'");
}

}  // namespace qalign
