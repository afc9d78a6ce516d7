// SPDX-License-Identifier: Apache-2.0

#include "qalign/grover.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qalign {

Circuit phase_oracle(const OracleSpec& spec) {
    const auto& layout = spec.layout;
    if (spec.delta >> layout.k) {
        throw std::invalid_argument("delta " + std::to_string(spec.delta) + " does not fit in " +
                                    std::to_string(layout.k) + " hamming qubits");
    }
    Circuit circuit(layout.total);
    const unsigned top = layout.k - 1;
    std::vector<Control> controls;
    for (unsigned b = 0; b < top; ++b) {
        controls.push_back({layout.hamming_qubit(b), ((spec.delta >> b) & 1U) != 0});
    }
    const bool top_set = ((spec.delta >> top) & 1U) != 0;
    const unsigned target = layout.hamming_qubit(top);
    if (!top_set) {
        circuit.append(Gate::x(target));
    }
    circuit.append(Gate::mcz(std::move(controls), target));
    if (!top_set) {
        circuit.append(Gate::x(target));
    }
    return circuit;
}

Circuit diffusion(const Circuit& u) {
    const unsigned q = u.num_qubits();
    Circuit circuit(q);
    circuit.append(invert(u));
    for (unsigned i = 0; i < q; ++i) {
        circuit.append(Gate::x(i));
    }
    std::vector<Control> controls;
    for (unsigned i = 0; i + 1 < q; ++i) {
        controls.push_back({i, true});
    }
    circuit.append(Gate::mcz(std::move(controls), q - 1));
    for (unsigned i = 0; i < q; ++i) {
        circuit.append(Gate::x(i));
    }
    circuit.append(u);
    return circuit;
}

Circuit grover_layer(const Circuit& u, const OracleSpec& spec) {
    Circuit layer = phase_oracle(spec);
    layer.append(diffusion(u));
    return layer;
}

Circuit grover_circuit(const Circuit& u, const OracleSpec& spec, unsigned layers) {
    Circuit circuit = u;
    const Circuit layer = grover_layer(u, spec);
    for (unsigned p = 0; p < layers; ++p) {
        circuit.append(layer);
    }
    return circuit;
}

double marked_probability(const Statevector& state, const RegisterLayout& layout, unsigned delta) {
    if (state.num_qubits() != layout.total) {
        throw std::invalid_argument("state does not match the register layout");
    }
    double total = 0.0;
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if (layout.hamming_value(i) == delta) {
            total += state.probability(i);
        }
    }
    return total;
}

namespace {

void check_counts(std::uint64_t database_size, std::uint64_t matches) {
    if (matches == 0) {
        throw std::invalid_argument("no matches: a Grover plan needs c >= 1");
    }
    if (matches > database_size) {
        throw std::invalid_argument("more matches than database entries");
    }
}

}  // namespace

double rotation_angle(std::uint64_t database_size, std::uint64_t matches) {
    check_counts(database_size, matches);
    return std::asin(std::sqrt(static_cast<double>(matches) / static_cast<double>(database_size)));
}

unsigned optimal_layers(std::uint64_t database_size, std::uint64_t matches) {
    check_counts(database_size, matches);
    const double ratio = static_cast<double>(database_size) / static_cast<double>(matches);
    return static_cast<unsigned>(std::ceil(std::numbers::pi / 4.0 * std::sqrt(ratio)));
}

double success_probability(unsigned layers, std::uint64_t database_size, std::uint64_t matches) {
    const double theta = rotation_angle(database_size, matches);
    const double s = std::sin((2.0 * layers + 1.0) * theta);
    return s * s;
}

unsigned best_integer_layers(std::uint64_t database_size, std::uint64_t matches) {
    const double theta = rotation_angle(database_size, matches);
    // The first peak lies at pi/(4 theta) - 1/2, so scanning one step past
    // ceil(pi/(4 theta)) covers it.
    const auto limit = static_cast<unsigned>(std::ceil(std::numbers::pi / (4.0 * theta))) + 1;
    unsigned best = 1;
    double best_prob = success_probability(1, database_size, matches);
    for (unsigned p = 2; p <= limit; ++p) {
        const double prob = success_probability(p, database_size, matches);
        if (prob > best_prob + 1e-12) {
            best = p;
            best_prob = prob;
        }
    }
    return best;
}

GroverPlan make_plan(std::uint64_t database_size, std::uint64_t matches) {
    return {database_size, matches, rotation_angle(database_size, matches),
            optimal_layers(database_size, matches), best_integer_layers(database_size, matches)};
}

}  // namespace qalign
