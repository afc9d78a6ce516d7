// SPDX-License-Identifier: Apache-2.0

#include "qalign/gasp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qalign/rng.hpp"

namespace qalign {

Circuit to_circuit(const std::vector<Gene>& genes, unsigned num_qubits) {
    Circuit circuit(num_qubits);
    for (const auto& g : genes) {
        switch (g.kind) {
            case GateKind::RX:
                circuit.append(Gate::rx(g.target, g.angle));
                break;
            case GateKind::RY:
                circuit.append(Gate::ry(g.target, g.angle));
                break;
            case GateKind::RZ:
                circuit.append(Gate::rz(g.target, g.angle));
                break;
            case GateKind::CNOT:
                circuit.append(Gate::cnot(g.control, g.target));
                break;
            default:
                throw std::invalid_argument("gene kind outside the GASP gate set");
        }
    }
    return circuit;
}

void GaConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("population_size must be at least 2");
    }
    if (elitism_count >= population_size) {
        throw std::invalid_argument("elitism_count must be below population_size");
    }
    if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 || mutation_rate > 1.0) {
        throw std::invalid_argument("crossover and mutation rates must lie in [0, 1]");
    }
    if (!(fidelity_target > 0.0 && fidelity_target <= 1.0)) {
        throw std::invalid_argument("fidelity_target must lie in (0, 1]");
    }
    if (max_genes == 0 || tournament_size == 0) {
        throw std::invalid_argument("max_genes and tournament_size must be positive");
    }
}

// ---------------------------------------------------------------------------
// Genetic search

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Evolver {
public:
    Evolver(const Statevector& target, const GaConfig& config)
        : target_(target), config_(config), n_(target.num_qubits()), rng_(config.seed) {}

    GaspResult run() {
        std::vector<Genome> population;
        population.reserve(config_.population_size);
        population.push_back(Genome{});
        while (population.size() < config_.population_size) {
            population.push_back(random_genome());
        }
        for (auto& g : population) {
            evaluate(g);
        }
        rank(population);

        GaspResult result{Circuit(n_), 0.0, false, 0, {}};
        result.best_history.push_back(population.front().fitness);
        unsigned generation = 0;
        while (population.front().fitness < config_.fidelity_target &&
               generation < config_.max_generations) {
            ++generation;
            population = next_generation(population);
            rank(population);
            result.best_history.push_back(population.front().fitness);
        }
        const Genome& best = population.front();
        result.circuit = to_circuit(best.genes, n_);
        result.fidelity = best.fitness;
        result.converged = best.fitness >= config_.fidelity_target;
        result.generations = generation;
        return result;
    }

private:
    Gene random_gene() {
        const unsigned kinds = n_ >= 2 ? 4 : 3;
        const auto pick = rng_.below(kinds);
        Gene g{GateKind::RX, static_cast<unsigned>(rng_.below(n_))};
        if (pick == 3) {
            g.kind = GateKind::CNOT;
            g.control = static_cast<unsigned>(rng_.below(n_ - 1));
            if (g.control >= g.target) {
                ++g.control;
            }
        } else {
            g.kind = pick == 0 ? GateKind::RX : pick == 1 ? GateKind::RY : GateKind::RZ;
            g.angle = rng_.uniform(0.0, kTwoPi);
        }
        return g;
    }

    Genome random_genome() {
        Genome g;
        const auto cap = std::min<std::uint64_t>(config_.max_genes, 4 * n_);
        const auto length = 1 + rng_.below(cap);
        for (std::uint64_t i = 0; i < length; ++i) {
            g.genes.push_back(random_gene());
        }
        return g;
    }

    void evaluate(Genome& g) const {
        for (unsigned sweep = 0; sweep < config_.local_sweeps; ++sweep) {
            refine_angles(g);
        }
        Statevector state(n_);
        apply_circuit(state, to_circuit(g.genes, n_));
        g.fitness = fidelity(target_, state);
    }

    static Gate gate_of(const Gene& g) {
        switch (g.kind) {
            case GateKind::RX:
                return Gate::rx(g.target, g.angle);
            case GateKind::RY:
                return Gate::ry(g.target, g.angle);
            case GateKind::RZ:
                return Gate::rz(g.target, g.angle);
            default:
                return Gate::cnot(g.control, g.target);
        }
    }

    // One pass of exact coordinate ascent over the rotation angles. With every
    // other gene fixed, the overlap as a function of one angle t is
    // cos(t/2) a + sin(t/2) b, where b uses the rotation at t = pi. Its squared
    // modulus is m + u cos t + v sin t, maximised at t = atan2(v, u).
    void refine_angles(Genome& g) const {
        auto& genes = g.genes;
        if (genes.empty()) {
            return;
        }
        Statevector forward(n_);
        Statevector backward = target_;
        for (std::size_t i = genes.size(); i-- > 1;) {
            apply_gate(backward, invert(gate_of(genes[i])));
        }
        for (std::size_t i = 0; i < genes.size(); ++i) {
            Gene& gene = genes[i];
            if (gene.kind != GateKind::CNOT) {
                Gene half_turn = gene;
                half_turn.angle = std::numbers::pi;
                Statevector turned = forward;
                apply_gate(turned, gate_of(half_turn));
                const Complex a = inner_product(backward, forward);
                const Complex b = inner_product(backward, turned);
                const double u = 0.5 * (std::norm(a) - std::norm(b));
                const double v = std::real(std::conj(a) * b);
                if (u != 0.0 || v != 0.0) {
                    gene.angle = std::atan2(v, u);
                }
            }
            apply_gate(forward, gate_of(gene));
            if (i + 1 < genes.size()) {
                apply_gate(backward, gate_of(genes[i + 1]));
            }
        }
    }

    // Fitness descending; equal fitness prefers shorter genomes. stable_sort
    // keeps the result independent of the sort implementation.
    static void rank(std::vector<Genome>& population) {
        std::stable_sort(population.begin(), population.end(), [](const Genome& a, const Genome& b) {
            if (a.fitness != b.fitness) {
                return a.fitness > b.fitness;
            }
            return a.genes.size() < b.genes.size();
        });
    }

    const Genome& tournament(const std::vector<Genome>& population) {
        // The population is ranked, so the lowest index drawn wins.
        std::uint64_t best = population.size();
        for (unsigned i = 0; i < config_.tournament_size; ++i) {
            best = std::min(best, rng_.below(population.size()));
        }
        return population[best];
    }

    Genome crossover(const Genome& a, const Genome& b) {
        const auto cut_a = rng_.below(a.genes.size() + 1);
        const auto cut_b = rng_.below(b.genes.size() + 1);
        Genome child;
        child.genes.assign(a.genes.begin(), a.genes.begin() + static_cast<std::ptrdiff_t>(cut_a));
        child.genes.insert(child.genes.end(), b.genes.begin() + static_cast<std::ptrdiff_t>(cut_b),
                           b.genes.end());
        if (child.genes.size() > config_.max_genes) {
            child.genes.resize(config_.max_genes);
        }
        return child;
    }

    void mutate(Genome& g) {
        auto& genes = g.genes;
        const auto op = rng_.below(4);
        if (genes.empty() || (op == 2 && genes.size() < config_.max_genes)) {
            if (genes.size() < config_.max_genes) {
                const auto at = rng_.below(genes.size() + 1);
                genes.insert(genes.begin() + static_cast<std::ptrdiff_t>(at), random_gene());
            }
            return;
        }
        const auto at = rng_.below(genes.size());
        switch (op) {
            case 0: {
                // Angle step on a rotation; CNOTs fall through to replacement.
                Gene& gene = genes[at];
                if (gene.kind != GateKind::CNOT) {
                    if (rng_.bernoulli(config_.angle_resample_rate)) {
                        gene.angle = rng_.uniform(0.0, kTwoPi);
                    } else {
                        gene.angle = std::remainder(gene.angle + config_.angle_sigma * rng_.normal(), kTwoPi);
                    }
                    break;
                }
                gene = random_gene();
                break;
            }
            case 1:
                genes[at] = random_gene();
                break;
            case 3:
                genes.erase(genes.begin() + static_cast<std::ptrdiff_t>(at));
                break;
            default:
                genes[at] = random_gene();
                break;
        }
    }

    std::vector<Genome> next_generation(const std::vector<Genome>& population) {
        std::vector<Genome> next(population.begin(),
                                 population.begin() + static_cast<std::ptrdiff_t>(config_.elitism_count));
        while (next.size() < config_.population_size) {
            const Genome& a = tournament(population);
            Genome child;
            if (rng_.bernoulli(config_.crossover_rate)) {
                child = crossover(a, tournament(population));
            } else {
                child.genes = a.genes;
            }
            if (rng_.bernoulli(config_.mutation_rate)) {
                mutate(child);
            }
            evaluate(child);
            next.push_back(std::move(child));
        }
        return next;
    }

    const Statevector& target_;
    const GaConfig& config_;
    unsigned n_;
    Rng rng_;
};

}  // namespace

GaspResult gasp_prepare(const Statevector& target, const GaConfig& config) {
    config.validate();
    if (target.num_qubits() > 8) {
        throw std::invalid_argument("GASP supports at most 8 qubits");
    }
    return Evolver(target, config).run();
}

// ---------------------------------------------------------------------------
// Fidelity perturbation

Eigen::MatrixXcd random_hermitian(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    const double scale = std::sqrt(0.5);
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index col = 0; col < a.cols(); ++col) {
        for (Eigen::Index row = 0; row < a.rows(); ++row) {
            const double re = scale * rng.normal();
            const double im = scale * rng.normal();
            a(row, col) = {re, im};
        }
    }
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    // Exact Hermiticity: mirror the upper triangle and zero the diagonal's
    // imaginary part.
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        h(i, i) = h(i, i).real();
        for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

namespace {

constexpr double kEpsilonStart = 1e-3;
constexpr double kEpsilonMax = 1e4;
constexpr int kMaxResamples = 5;

struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXcd coefficients;  // target in the eigenbasis

    double overlap(double eps) const {
        Complex sum{0.0, 0.0};
        for (Eigen::Index j = 0; j < values.size(); ++j) {
            sum += std::norm(coefficients(j)) * std::polar(1.0, -eps * values(j));
        }
        return std::norm(sum);
    }
};

}  // namespace

PerturbedState perturb_state(const Statevector& target, double target_fidelity, std::uint64_t seed) {
    if (!(target_fidelity > 0.0 && target_fidelity <= 1.0)) {
        throw std::invalid_argument("target fidelity must lie in (0, 1]");
    }
    if (target.num_qubits() > 8) {
        throw std::invalid_argument("perturbation supports at most 8 qubits");
    }
    const auto dim = static_cast<Eigen::Index>(target.dimension());
    Eigen::VectorXcd psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        psi(i) = target[static_cast<std::size_t>(i)];
    }

    if (target_fidelity == 1.0) {
        return {target, PerturbationSpec{1.0, seed, 0.0, 1.0}};
    }

    for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
        const std::uint64_t h_seed =
            attempt == 0 ? seed : derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
            random_hermitian(static_cast<std::size_t>(dim), h_seed));
        if (solver.info() != Eigen::Success) {
            continue;
        }
        Spectrum spec{solver.eigenvalues(), solver.eigenvectors(), solver.eigenvectors().adjoint() * psi};
        auto f = [&](double eps) { return spec.overlap(eps) - target_fidelity; };

        // f(0) = 1 - F > 0. Walk [lo, hi] outward until f(hi) <= 0.
        double lo = 0.0;
        double hi = kEpsilonStart;
        while (f(hi) > 0.0 && hi <= kEpsilonMax) {
            lo = hi;
            hi *= 2.0;
        }
        if (hi > kEpsilonMax) {
            continue;
        }
        for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
        }
        const double eps = hi;

        Eigen::VectorXcd phases(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            phases(j) = std::polar(1.0, -eps * spec.values(j));
        }
        const Eigen::VectorXcd evolved = spec.vectors * phases.asDiagonal() * spec.coefficients;
        std::vector<Complex> amps(evolved.data(), evolved.data() + dim);
        Statevector out = Statevector::from_amplitudes(target.num_qubits(), std::move(amps));
        const double achieved = fidelity(target, out);
        if (std::abs(achieved - target_fidelity) > 1e-4) {
            continue;
        }
        return {std::move(out), PerturbationSpec{target_fidelity, h_seed, eps, achieved}};
    }
    throw std::runtime_error("could not bracket a perturbation strength for fidelity " +
                             std::to_string(target_fidelity));
}

CalibratedLoader fidelity_calibrated_loader(const Database& db, double target_fidelity,
                                            const GaConfig& config) {
    const Statevector ideal = database_state(db);
    const PerturbedState perturbed = perturb_state(ideal, target_fidelity, derive_seed(config.seed, {1}));
    GaConfig ga = config;
    ga.seed = derive_seed(config.seed, {2});
    GaspResult synthesized = gasp_prepare(perturbed.state, ga);
    const Statevector prepared = run(synthesized.circuit);
    return {std::move(synthesized.circuit), fidelity(ideal, prepared), synthesized.fidelity,
            synthesized.converged, perturbed.spec};
}

}  // namespace qalign
