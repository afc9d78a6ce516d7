// SPDX-License-Identifier: Apache-2.0

// Genetic-algorithm state preparation and the fidelity-controlled state
// perturbation used to build loaders of a chosen a-priori fidelity.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qalign/registers.hpp"
#include "qalign/simcore.hpp"

namespace qalign {

struct Gene {
    GateKind kind;  // RX, RY, RZ or CNOT
    unsigned target;
    unsigned control = 0;  // CNOT only
    double angle = 0.0;    // rotations only

    friend bool operator==(const Gene&, const Gene&) = default;
};

struct Genome {
    std::vector<Gene> genes;
    double fitness = 0.0;
};

Circuit to_circuit(const std::vector<Gene>& genes, unsigned num_qubits);

struct GaConfig {
    unsigned population_size = 100;
    unsigned max_generations = 200;
    double crossover_rate = 0.7;
    double mutation_rate = 0.2;
    unsigned elitism_count = 2;
    double fidelity_target = 0.99;
    unsigned max_genes = 64;
    unsigned tournament_size = 3;
    double angle_sigma = 0.1;
    /// Probability that an angle mutation redraws from U(0, 2 pi) instead of
    /// taking a Gaussian step.
    double angle_resample_rate = 0.1;
    /// Exact coordinate-ascent passes over the rotation angles of every
    /// offspring before it is scored; 0 gives a pure genetic search.
    unsigned local_sweeps = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GaspResult {
    Circuit circuit;
    double fidelity = 0.0;
    bool converged = false;
    unsigned generations = 0;
    /// Best fitness after each generation (index 0 is the initial population).
    std::vector<double> best_history;
};

/// Evolves a {RX, RY, RZ, CNOT} circuit whose output on |0...0> approaches
/// `target`. Stops once the best fidelity reaches config.fidelity_target or
/// after max_generations; `converged` tells which.
GaspResult gasp_prepare(const Statevector& target, const GaConfig& config);

/// H = (A + A^dagger) / 2 with A's entries independent standard complex
/// Gaussians (real and imaginary parts each of variance 1/2).
Eigen::MatrixXcd random_hermitian(std::size_t dim, std::uint64_t seed);

struct PerturbationSpec {
    double target_fidelity = 1.0;
    std::uint64_t hermitian_seed = 0;
    double epsilon = 0.0;
    double achieved_fidelity = 1.0;
};

struct PerturbedState {
    Statevector state;
    PerturbationSpec spec;
};

/// exp(-i eps H)|target> with eps solved so that the overlap with `target`
/// equals target_fidelity to within 1e-4. eps is bracketed by doubling from
/// 1e-3 and refined by bisection; if no bracket exists below eps_max a new H
/// is drawn from a derived seed (at most five times).
PerturbedState perturb_state(const Statevector& target, double target_fidelity, std::uint64_t seed);

struct CalibratedLoader {
    Circuit circuit;
    double fidelity_to_database = 0.0;
    double fidelity_to_perturbed = 0.0;
    bool converged = false;
    PerturbationSpec perturbation;
};

/// Perturbs the database state to `target_fidelity`, then runs GASP against
/// the perturbed state. The loader's fidelity to the true database state
/// therefore lands near target_fidelity.
CalibratedLoader fidelity_calibrated_loader(const Database& db, double target_fidelity,
                                            const GaConfig& config);

}  // namespace qalign
