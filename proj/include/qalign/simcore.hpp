// SPDX-License-Identifier: Apache-2.0

// Dense statevector simulator.
//
// Qubit 0 is the least-significant bit of a basis-state index. Bitstrings are
// rendered most-significant qubit first, so the basis index 6 on three qubits
// prints as "110".

#pragma once

#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qalign {

using Complex = std::complex<double>;

/// Outcome histogram keyed by basis-state index. Iteration order is ascending
/// index, which coincides with lexicographic order of the rendered bitstrings.
using Counts = std::map<std::uint64_t, std::uint64_t>;

std::string to_bitstring(std::uint64_t value, unsigned width);
std::uint64_t parse_bitstring(std::string_view bits);

class Statevector {
public:
    /// |0...0> on num_qubits qubits.
    explicit Statevector(unsigned num_qubits);

    static Statevector basis(unsigned num_qubits, std::uint64_t index);

    /// Takes ownership of the amplitudes and renormalizes them. Throws if the
    /// length is not 2^num_qubits or the vector is zero.
    static Statevector from_amplitudes(unsigned num_qubits, std::vector<Complex> amplitudes);

    unsigned num_qubits() const { return num_qubits_; }
    std::size_t dimension() const { return amplitudes_.size(); }

    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<Complex> amplitudes() { return amplitudes_; }

    const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
    Complex& operator[](std::size_t i) { return amplitudes_[i]; }

    double probability(std::uint64_t index) const { return std::norm(amplitudes_[index]); }
    std::vector<double> probabilities() const;
    double norm() const;

private:
    Statevector(unsigned num_qubits, std::vector<Complex> amplitudes);

    unsigned num_qubits_;
    std::vector<Complex> amplitudes_;
};

enum class GateKind { X, H, Z, RX, RY, RZ, CNOT, MCX, MCZ };

std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_name(std::string_view name);
bool is_rotation(GateKind kind);

struct Control {
    unsigned qubit;
    bool polarity = true;

    friend bool operator==(const Control&, const Control&) = default;
};

/// A single-target gate with an arbitrary list of (qubit, polarity) controls.
/// CNOT carries exactly one control; any other kind may carry zero or more,
/// which is how controlled rotations are expressed.
struct Gate {
    GateKind kind;
    std::vector<unsigned> targets;
    std::vector<Control> controls;
    std::optional<double> angle;

    static Gate x(unsigned q) { return {GateKind::X, {q}, {}, std::nullopt}; }
    static Gate h(unsigned q) { return {GateKind::H, {q}, {}, std::nullopt}; }
    static Gate z(unsigned q) { return {GateKind::Z, {q}, {}, std::nullopt}; }
    static Gate rx(unsigned q, double theta) { return {GateKind::RX, {q}, {}, theta}; }
    static Gate ry(unsigned q, double theta) { return {GateKind::RY, {q}, {}, theta}; }
    static Gate rz(unsigned q, double theta) { return {GateKind::RZ, {q}, {}, theta}; }
    static Gate cnot(unsigned control, unsigned target) {
        return {GateKind::CNOT, {target}, {{control, true}}, std::nullopt};
    }
    static Gate mcx(std::vector<Control> controls, unsigned target) {
        return {GateKind::MCX, {target}, std::move(controls), std::nullopt};
    }
    static Gate mcz(std::vector<Control> controls, unsigned target) {
        return {GateKind::MCZ, {target}, std::move(controls), std::nullopt};
    }

    /// Same gate with extra controls appended.
    Gate controlled_by(std::vector<Control> extra) const;

    /// Throws std::invalid_argument / std::out_of_range on malformed gates.
    void validate(unsigned num_qubits) const;

    friend bool operator==(const Gate&, const Gate&) = default;
};

class Circuit {
public:
    explicit Circuit(unsigned num_qubits) : num_qubits_(num_qubits) {}

    unsigned num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& append(Gate gate);
    /// Appends every gate of `other`, which may act on fewer qubits; indices
    /// are kept as-is so a narrower circuit lands on the low qubits.
    Circuit& append(const Circuit& other);

    friend bool operator==(const Circuit&, const Circuit&) = default;

private:
    unsigned num_qubits_;
    std::vector<Gate> gates_;
};

void apply_gate(Statevector& state, const Gate& gate);
void apply_circuit(Statevector& state, const Circuit& circuit);

/// Runs `circuit` on |0...0>.
Statevector run(const Circuit& circuit);

Gate invert(const Gate& gate);
Circuit invert(const Circuit& circuit);

/// Draws `shots` outcomes from |amplitude|^2. Deterministic for a given seed.
Counts sample_counts(const Statevector& state, std::uint64_t shots, std::uint64_t seed);

/// |<a|b>|^2.
double fidelity(const Statevector& a, const Statevector& b);
Complex inner_product(const Statevector& a, const Statevector& b);

struct CircuitStats {
    std::size_t gates = 0;
    std::size_t multi_qubit_gates = 0;
    std::size_t depth = 0;
};
CircuitStats circuit_stats(const Circuit& circuit);

// Text serialization: a `qubits=<q>` header, then one gate per line as
// `KIND targets=[...] controls=[(q,pol),...] angle=<radians>`. The angle field
// is present only for rotations.
void write_circuit(std::ostream& out, const Circuit& circuit);
std::string format_circuit(const Circuit& circuit);
Circuit read_circuit(std::istream& in);
Circuit parse_circuit(std::string_view text);

}  // namespace qalign
