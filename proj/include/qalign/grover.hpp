// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "qalign/registers.hpp"
#include "qalign/simcore.hpp"

namespace qalign {

struct OracleSpec {
    unsigned delta;
    RegisterLayout layout;
};

/// Phase flip on every branch whose hamming register reads `delta`: one MCZ
/// on the hamming register whose control polarities spell delta, with the
/// MCZ target X-conjugated when delta's top bit is 0.
Circuit phase_oracle(const OracleSpec& spec);

/// U^dagger, then the zero-state reflection (X on all qubits, MCZ, X on all
/// qubits), then U. Equals 2|psi><psi| - I, psi = U|0>, up to global phase.
Circuit diffusion(const Circuit& u);

/// Oracle followed by diffusion.
Circuit grover_layer(const Circuit& u, const OracleSpec& spec);

/// `u` followed by `layers` Grover layers.
Circuit grover_circuit(const Circuit& u, const OracleSpec& spec, unsigned layers);

/// Total probability on basis states whose hamming register equals delta.
double marked_probability(const Statevector& state, const RegisterLayout& layout, unsigned delta);

struct GroverPlan {
    std::uint64_t database_size;
    std::uint64_t matches;
    double theta;           // arcsin(sqrt(c / N))
    unsigned optimal;       // ceil((pi / 4) sqrt(N / c))
    unsigned best_integer;  // argmax over p >= 1 of success_probability
};

/// Throws std::invalid_argument unless 1 <= c <= N.
GroverPlan make_plan(std::uint64_t database_size, std::uint64_t matches);

double rotation_angle(std::uint64_t database_size, std::uint64_t matches);
unsigned optimal_layers(std::uint64_t database_size, std::uint64_t matches);
unsigned best_integer_layers(std::uint64_t database_size, std::uint64_t matches);

/// sin^2((2p + 1) theta): marked-subspace probability after p exact layers.
double success_probability(unsigned layers, std::uint64_t database_size, std::uint64_t matches);

}  // namespace qalign
