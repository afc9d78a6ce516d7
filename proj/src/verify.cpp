// SPDX-License-Identifier: Apache-2.0

#include "qalign/verify.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qalign/experiments.hpp"
#include "qalign/grover.hpp"
#include "qalign/qsa.hpp"
#include "qalign/registers.hpp"
#include "qalign/rng.hpp"

namespace qalign {

namespace {

Circuit maybe_corrupt(Circuit circuit, const std::string& name, const VerifyOptions& options) {
    if (options.inject_fault != name || circuit.empty()) {
        return circuit;
    }
    Circuit broken(circuit.num_qubits());
    for (std::size_t i = 0; i + 1 < circuit.size(); ++i) {
        broken.append(circuit.gates()[i]);
    }
    return broken;
}

Statevector random_state(unsigned qubits, Rng& rng) {
    std::vector<Complex> amps(std::size_t{1} << qubits);
    for (auto& a : amps) {
        a = {rng.normal(), rng.normal()};
    }
    return Statevector::from_amplitudes(qubits, std::move(amps));
}

// Built directly from the definition (1/sqrt N) sum_i |D_i>|S xor D_i>|d_i>,
// independent of any circuit.
Statevector analytic_prepared_state(const Database& db, const TargetSequence& target) {
    const RegisterLayout layout(db.width());
    std::vector<Complex> amps(std::size_t{1} << layout.total);
    for (auto entry : db.entries()) {
        const auto sample = entry ^ target.bits;
        amps[layout.compose(entry, sample, static_cast<std::uint64_t>(std::popcount(sample)))] = 1.0;
    }
    return Statevector::from_amplitudes(layout.total, std::move(amps));
}

CheckResult check_popcount(const std::vector<unsigned>& sizes, const VerifyOptions& options) {
    for (unsigned n : sizes) {
        const RegisterLayout layout(n);
        const Circuit t = maybe_corrupt(popcount_operator(layout), "popcount", options);
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
            Statevector state = Statevector::basis(layout.total, layout.compose(0, s, 0));
            apply_circuit(state, t);
            const auto expected = layout.compose(0, s, static_cast<std::uint64_t>(std::popcount(s)));
            if (std::abs(state[expected] - Complex{1.0, 0.0}) > 1e-12) {
                std::ostringstream why;
                why << "n=" << n << " sample=" << to_bitstring(s, n) << " does not map to popcount "
                    << std::popcount(s);
                return {"popcount_exhaustive", false, why.str()};
            }
        }
    }
    return {"popcount_exhaustive", true, "n=" + std::to_string(sizes.front()) + ".." + std::to_string(sizes.back())};
}

CheckResult check_entangler(const VerifyOptions& options) {
    for (unsigned n = 1; n <= 4; ++n) {
        const RegisterLayout layout(n);
        const Circuit e = maybe_corrupt(entangler(layout), "entangler", options);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
                Statevector state = Statevector::basis(layout.total, layout.compose(x, y, 0));
                apply_circuit(state, e);
                if (std::norm(state[layout.compose(x, x ^ y, 0)]) < 1.0 - 1e-12) {
                    return {"entangler_exhaustive", false,
                            "n=" + std::to_string(n) + " x=" + to_bitstring(x, n) + " y=" + to_bitstring(y, n)};
                }
            }
        }
    }
    return {"entangler_exhaustive", true, "n=1..4"};
}

CheckResult check_initialisation(const std::vector<unsigned>& sizes, unsigned instances,
                                 const VerifyOptions& options) {
    for (unsigned n : sizes) {
        const RegisterLayout layout(n);
        for (unsigned i = 0; i < instances; ++i) {
            const auto seed = derive_seed(options.seed, {11, n, i});
            const Database db = random_database(n, DbSizeRule::floor, derive_seed(seed, {1}));
            const TargetSequence target = random_target(n, derive_seed(seed, {2}));
            Circuit u(layout.total);
            u.append(exact_loader(db));
            u.append(target_loader(target, layout));
            u.append(maybe_corrupt(entangler(layout), "entangler", options));
            u.append(maybe_corrupt(popcount_operator(layout), "popcount", options));
            const double f = fidelity(run(u), analytic_prepared_state(db, target));
            if (f < 1.0 - 1e-10) {
                return {"initialisation_analytic", false,
                        "n=" + std::to_string(n) + " instance " + std::to_string(i) + " fidelity " + std::to_string(f)};
            }
        }
    }
    return {"initialisation_analytic", true,
            std::to_string(instances) + " instances per n=" + std::to_string(sizes.front()) + ".." +
                std::to_string(sizes.back())};
}

CheckResult check_grover(const std::vector<unsigned>& sizes, unsigned instances, const VerifyOptions& options) {
    for (unsigned n : sizes) {
        const RegisterLayout layout(n);
        for (unsigned i = 0; i < instances; ++i) {
            const auto seed = derive_seed(options.seed, {12, n, i});
            const Database db = random_database(n, DbSizeRule::floor, derive_seed(seed, {1}));
            const TargetSequence target = random_target(n, derive_seed(seed, {2}));
            const unsigned delta = classical_min_hamming(db, target).distance;
            const auto c = count_matches(db, target, delta);
            const Circuit u = initialisation_unitary(exact_loader(db), target, layout);
            const OracleSpec spec{delta, layout};
            Circuit layer(layout.total);
            layer.append(maybe_corrupt(phase_oracle(spec), "oracle", options));
            layer.append(diffusion(u));
            Statevector state = run(u);
            for (unsigned p = 0; p <= 8; ++p) {
                if (p > 0) {
                    apply_circuit(state, layer);
                }
                const double sim = marked_probability(state, layout, delta);
                const double theory = success_probability(p, db.size(), c);
                if (std::abs(sim - theory) > 1e-9) {
                    std::ostringstream why;
                    why << "n=" << n << " N=" << db.size() << " c=" << c << " p=" << p << ": simulated " << sim
                        << " vs " << theory;
                    return {"grover_closed_form", false, why.str()};
                }
            }
        }
    }
    return {"grover_closed_form", true, "p=0..8"};
}

CheckResult check_reflections(const VerifyOptions& options) {
    Rng rng(derive_seed(options.seed, {13}));
    for (unsigned n = 3; n <= 4; ++n) {
        const RegisterLayout layout(n);
        const Database db = random_database(n, DbSizeRule::floor, rng.next());
        const TargetSequence target = random_target(n, rng.next());
        const Circuit u = initialisation_unitary(exact_loader(db), target, layout);
        for (unsigned delta = 0; delta <= n; ++delta) {
            const Circuit oracle = maybe_corrupt(phase_oracle({delta, layout}), "oracle", options);
            const Statevector before = random_state(layout.total, rng);
            Statevector twice = before;
            apply_circuit(twice, oracle);
            apply_circuit(twice, oracle);
            if (fidelity(before, twice) < 1.0 - 1e-10) {
                return {"reflection_algebra", false, "oracle^2 != I at n=" + std::to_string(n)};
            }
            // The oracle must flip exactly the delta branch of a basis state.
            for (std::uint64_t h = 0; h < (std::uint64_t{1} << layout.k); ++h) {
                Statevector basis = Statevector::basis(layout.total, layout.compose(0, 0, h));
                apply_circuit(basis, oracle);
                const double expected = h == delta ? -1.0 : 1.0;
                if (std::abs(basis[layout.compose(0, 0, h)] - Complex{expected, 0.0}) > 1e-12) {
                    return {"reflection_algebra", false,
                            "oracle sign wrong for hamming=" + std::to_string(h) + " delta=" + std::to_string(delta)};
                }
            }
        }
        const Circuit d = diffusion(u);
        const Statevector before = random_state(layout.total, rng);
        Statevector twice = before;
        apply_circuit(twice, d);
        apply_circuit(twice, d);
        if (fidelity(before, twice) < 1.0 - 1e-10) {
            return {"reflection_algebra", false, "diffusion^2 != I at n=" + std::to_string(n)};
        }
    }
    return {"reflection_algebra", true, "oracle^2 = diffusion^2 = I"};
}

CheckResult check_end_to_end(unsigned instances, const VerifyOptions& options) {
    unsigned hits = 0;
    for (unsigned i = 0; i < instances; ++i) {
        const unsigned n = 3 + i % 4;
        const auto seed = derive_seed(options.seed, {14, i});
        const Database db = random_database(n, DbSizeRule::floor, derive_seed(seed, {1}));
        const TargetSequence target = random_target(n, derive_seed(seed, {2}));
        QsaConfig config;
        config.layer_policy = LayerPolicy::best_integer;
        config.seed = derive_seed(seed, {3});
        const auto result = run_qsa(exact_loader(db), db, target, config);
        hits += result.distance == result.d_min_classical ? 1 : 0;
    }
    const bool ok = hits * 100 >= 95 * instances;
    return {"end_to_end_optimality", ok, std::to_string(hits) + "/" + std::to_string(instances) + " found d_min"};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    const bool full = options.level == VerifyLevel::full;
    std::vector<CheckResult> results;
    results.push_back(check_popcount(full ? std::vector<unsigned>{3, 4, 5, 6} : std::vector<unsigned>{3, 4}, options));
    results.push_back(check_entangler(options));
    results.push_back(check_initialisation(full ? std::vector<unsigned>{3, 4, 5} : std::vector<unsigned>{3, 4},
                                           full ? 50 : 10, options));
    results.push_back(check_grover(full ? std::vector<unsigned>{3, 4, 5} : std::vector<unsigned>{3, 4},
                                   full ? 20 : 5, options));
    results.push_back(check_reflections(options));
    if (full) {
        results.push_back(check_end_to_end(100, options));
    }
    return results;
}

}  // namespace qalign
