// SPDX-License-Identifier: Apache-2.0

#include "qalign/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qalign/rng.hpp"

namespace qalign {

std::string to_bitstring(std::uint64_t value, unsigned width) {
    std::string bits(width, '0');
    for (unsigned i = 0; i < width; ++i) {
        if ((value >> i) & 1U) {
            bits[width - 1 - i] = '1';
        }
    }
    return bits;
}

std::uint64_t parse_bitstring(std::string_view bits) {
    if (bits.size() > 63) {
        throw std::invalid_argument("bitstring too long");
    }
    std::uint64_t value = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("not a bitstring: '" + std::string(bits) + "'");
        }
        value = (value << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return value;
}

// ---------------------------------------------------------------------------
// Statevector

Statevector::Statevector(unsigned num_qubits)
    : Statevector(num_qubits, {}) {}

Statevector::Statevector(unsigned num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    if (num_qubits == 0 || num_qubits > 30) {
        throw std::invalid_argument("qubit count must be in [1, 30]");
    }
    if (amplitudes_.empty()) {
        amplitudes_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }
}

Statevector Statevector::basis(unsigned num_qubits, std::uint64_t index) {
    Statevector s(num_qubits);
    if (index >= s.dimension()) {
        throw std::out_of_range("basis index out of range");
    }
    s.amplitudes_[0] = 0.0;
    s.amplitudes_[index] = 1.0;
    return s;
}

Statevector Statevector::from_amplitudes(unsigned num_qubits, std::vector<Complex> amplitudes) {
    if (num_qubits == 0 || num_qubits > 30 || amplitudes.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("amplitude count must be 2^num_qubits");
    }
    double total = 0.0;
    for (const auto& a : amplitudes) {
        total += std::norm(a);
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw std::invalid_argument("amplitudes must have nonzero finite norm");
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& a : amplitudes) {
        a *= scale;
    }
    return Statevector(num_qubits, std::move(amplitudes));
}

std::vector<double> Statevector::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                   [](const Complex& a) { return std::norm(a); });
    return p;
}

double Statevector::norm() const {
    double total = 0.0;
    for (const auto& a : amplitudes_) {
        total += std::norm(a);
    }
    return std::sqrt(total);
}

// ---------------------------------------------------------------------------
// Gates

namespace {

constexpr std::pair<GateKind, std::string_view> kNames[] = {
    {GateKind::X, "X"},     {GateKind::H, "H"},     {GateKind::Z, "Z"},
    {GateKind::RX, "RX"},   {GateKind::RY, "RY"},   {GateKind::RZ, "RZ"},
    {GateKind::CNOT, "CNOT"}, {GateKind::MCX, "MCX"}, {GateKind::MCZ, "MCZ"},
};

}  // namespace

std::string_view kind_name(GateKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<GateKind> kind_from_name(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

bool is_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

Gate Gate::controlled_by(std::vector<Control> extra) const {
    Gate g = *this;
    g.controls.insert(g.controls.end(), extra.begin(), extra.end());
    return g;
}

void Gate::validate(unsigned num_qubits) const {
    if (targets.size() != 1) {
        throw std::invalid_argument(std::string(kind_name(kind)) + " takes exactly one target");
    }
    if (is_rotation(kind) != angle.has_value()) {
        throw std::invalid_argument(is_rotation(kind)
                                        ? std::string(kind_name(kind)) + " requires an angle"
                                        : std::string(kind_name(kind)) + " does not take an angle");
    }
    if (angle && !std::isfinite(*angle)) {
        throw std::invalid_argument("rotation angle must be finite");
    }
    if (kind == GateKind::CNOT && controls.size() != 1) {
        throw std::invalid_argument("CNOT takes exactly one control");
    }
    const unsigned t = targets.front();
    if (t >= num_qubits) {
        throw std::out_of_range("target qubit " + std::to_string(t) + " out of range");
    }
    std::uint64_t seen = std::uint64_t{1} << t;
    for (const auto& c : controls) {
        if (c.qubit >= num_qubits) {
            throw std::out_of_range("control qubit " + std::to_string(c.qubit) + " out of range");
        }
        const std::uint64_t bit = std::uint64_t{1} << c.qubit;
        if (seen & bit) {
            throw std::invalid_argument("controls and targets must be distinct qubits");
        }
        seen |= bit;
    }
}

Circuit& Circuit::append(Gate gate) {
    gate.validate(num_qubits_);
    gates_.push_back(std::move(gate));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.num_qubits_ > num_qubits_) {
        throw std::invalid_argument("cannot append a wider circuit");
    }
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
    return *this;
}

// ---------------------------------------------------------------------------
// Application

namespace {

struct Matrix2 {
    Complex m00, m01, m10, m11;
};

Matrix2 matrix_of(const Gate& gate) {
    const double theta = gate.angle.value_or(0.0);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (gate.kind) {
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {r, r, r, -r};
        }
        case GateKind::RX:
            return {c, Complex{0.0, -s}, Complex{0.0, -s}, c};
        case GateKind::RY:
            return {c, -s, s, c};
        case GateKind::RZ:
            return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
        default:
            throw std::logic_error("no dense matrix needed for this kind");
    }
}

// Calls fn(i0, i1) for every amplitude pair (target bit 0 / 1) whose controls
// are satisfied. Free bits are enumerated as subsets of a mask, so the loop
// visits exactly 2^(q - 1 - |controls|) pairs.
template <class Fn>
void for_each_pair(unsigned num_qubits, const Gate& gate, Fn&& fn) {
    const std::uint64_t all = (std::uint64_t{1} << num_qubits) - 1;
    const std::uint64_t target_bit = std::uint64_t{1} << gate.targets.front();
    std::uint64_t control_mask = 0;
    std::uint64_t control_value = 0;
    for (const auto& c : gate.controls) {
        control_mask |= std::uint64_t{1} << c.qubit;
        if (c.polarity) {
            control_value |= std::uint64_t{1} << c.qubit;
        }
    }
    const std::uint64_t free = all & ~(control_mask | target_bit);
    std::uint64_t s = 0;
    do {
        const std::uint64_t i0 = s | control_value;
        fn(i0, i0 | target_bit);
        s = (s - free) & free;
    } while (s != 0);
}

}  // namespace

void apply_gate(Statevector& state, const Gate& gate) {
    gate.validate(state.num_qubits());
    auto amps = state.amplitudes();
    const unsigned q = state.num_qubits();
    switch (gate.kind) {
        case GateKind::X:
        case GateKind::CNOT:
        case GateKind::MCX:
            for_each_pair(q, gate, [&](std::uint64_t i0, std::uint64_t i1) {
                std::swap(amps[i0], amps[i1]);
            });
            break;
        case GateKind::Z:
        case GateKind::MCZ:
            for_each_pair(q, gate, [&](std::uint64_t, std::uint64_t i1) { amps[i1] = -amps[i1]; });
            break;
        case GateKind::RZ: {
            const Complex p0 = std::polar(1.0, -*gate.angle / 2.0);
            const Complex p1 = std::polar(1.0, *gate.angle / 2.0);
            for_each_pair(q, gate, [&](std::uint64_t i0, std::uint64_t i1) {
                amps[i0] *= p0;
                amps[i1] *= p1;
            });
            break;
        }
        default: {
            const Matrix2 m = matrix_of(gate);
            for_each_pair(q, gate, [&](std::uint64_t i0, std::uint64_t i1) {
                const Complex a0 = amps[i0];
                const Complex a1 = amps[i1];
                amps[i0] = m.m00 * a0 + m.m01 * a1;
                amps[i1] = m.m10 * a0 + m.m11 * a1;
            });
            break;
        }
    }
}

void apply_circuit(Statevector& state, const Circuit& circuit) {
    if (state.num_qubits() != circuit.num_qubits()) {
        throw std::invalid_argument("circuit acts on " + std::to_string(circuit.num_qubits()) +
                                    " qubits, state has " + std::to_string(state.num_qubits()));
    }
    for (const auto& gate : circuit.gates()) {
        apply_gate(state, gate);
    }
}

Statevector run(const Circuit& circuit) {
    Statevector state(circuit.num_qubits());
    apply_circuit(state, circuit);
    return state;
}

Gate invert(const Gate& gate) {
    Gate inv = gate;
    if (inv.angle) {
        *inv.angle = -*inv.angle;
    }
    return inv;
}

Circuit invert(const Circuit& circuit) {
    Circuit inv(circuit.num_qubits());
    const auto& gates = circuit.gates();
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        inv.append(invert(*it));
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Measurement and overlaps

Counts sample_counts(const Statevector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be at least 1");
    }
    const auto amps = state.amplitudes();
    std::vector<double> cdf(amps.size());
    double running = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        running += std::norm(amps[i]);
        cdf[i] = running;
    }
    Rng rng(seed);
    Counts counts;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto index = static_cast<std::uint64_t>(it - cdf.begin());
        if (it == cdf.end()) {
            // Rounding at the top of the cdf: fall back to the last outcome
            // with nonzero probability.
            index = amps.size() - 1;
            while (index > 0 && std::norm(amps[index]) == 0.0) {
                --index;
            }
        }
        ++counts[index];
    }
    return counts;
}

Complex inner_product(const Statevector& a, const Statevector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("inner product of states with different qubit counts");
    }
    Complex acc{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::conj(x[i]) * y[i];
    }
    return acc;
}

double fidelity(const Statevector& a, const Statevector& b) {
    return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

CircuitStats circuit_stats(const Circuit& circuit) {
    CircuitStats stats;
    std::vector<std::size_t> level(circuit.num_qubits(), 0);
    for (const auto& gate : circuit.gates()) {
        ++stats.gates;
        if (!gate.controls.empty()) {
            ++stats.multi_qubit_gates;
        }
        std::size_t layer = level[gate.targets.front()];
        for (const auto& c : gate.controls) {
            layer = std::max(layer, level[c.qubit]);
        }
        ++layer;
        level[gate.targets.front()] = layer;
        for (const auto& c : gate.controls) {
            level[c.qubit] = layer;
        }
        stats.depth = std::max(stats.depth, layer);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Serialization

void write_circuit(std::ostream& out, const Circuit& circuit) {
    out << "qubits=" << circuit.num_qubits() << '\n';
    for (const auto& gate : circuit.gates()) {
        out << kind_name(gate.kind) << " targets=[";
        for (std::size_t i = 0; i < gate.targets.size(); ++i) {
            out << (i ? "," : "") << gate.targets[i];
        }
        out << "] controls=[";
        for (std::size_t i = 0; i < gate.controls.size(); ++i) {
            out << (i ? "," : "") << '(' << gate.controls[i].qubit << ','
                << (gate.controls[i].polarity ? 1 : 0) << ')';
        }
        out << ']';
        if (gate.angle) {
            std::ostringstream angle;
            angle << std::setprecision(17) << *gate.angle;
            out << " angle=" << angle.str();
        }
        out << '\n';
    }
}

std::string format_circuit(const Circuit& circuit) {
    std::ostringstream out;
    write_circuit(out, circuit);
    return out.str();
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    throw std::invalid_argument("circuit line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

unsigned parse_unsigned(std::string_view s, std::size_t line) {
    s = trim(s);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        parse_error(line, "expected an unsigned integer, got '" + std::string(s) + "'");
    }
    return static_cast<unsigned>(std::stoul(std::string(s)));
}

// Extracts the bracketed body following `key=` in `rest`.
std::string_view bracket_field(std::string_view rest, std::string_view key, std::size_t line) {
    const auto start = rest.find(std::string(key) + "=[");
    if (start == std::string_view::npos) {
        parse_error(line, "missing " + std::string(key));
    }
    const auto open = start + key.size() + 2;
    const auto close = rest.find(']', open);
    if (close == std::string_view::npos) {
        parse_error(line, "unterminated " + std::string(key));
    }
    return rest.substr(open, close - open);
}

}  // namespace

Circuit read_circuit(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::optional<Circuit> circuit;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!circuit) {
            if (line.substr(0, 7) != "qubits=") {
                parse_error(line_no, "expected 'qubits=<q>' header");
            }
            circuit.emplace(parse_unsigned(line.substr(7), line_no));
            continue;
        }
        const auto space = line.find(' ');
        const auto kind = kind_from_name(line.substr(0, space));
        if (!kind) {
            parse_error(line_no, "unknown gate kind '" + std::string(line.substr(0, space)) + "'");
        }
        const std::string_view rest = space == std::string_view::npos ? "" : line.substr(space);
        Gate gate{*kind, {}, {}, std::nullopt};

        std::string_view targets = bracket_field(rest, "targets", line_no);
        while (!trim(targets).empty()) {
            const auto comma = targets.find(',');
            gate.targets.push_back(parse_unsigned(targets.substr(0, comma), line_no));
            targets = comma == std::string_view::npos ? "" : targets.substr(comma + 1);
        }

        std::string_view controls = bracket_field(rest, "controls", line_no);
        while (!trim(controls).empty()) {
            const auto open = controls.find('(');
            const auto close = controls.find(')');
            if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
                parse_error(line_no, "malformed control list");
            }
            const std::string_view pair = controls.substr(open + 1, close - open - 1);
            const auto comma = pair.find(',');
            if (comma == std::string_view::npos) {
                parse_error(line_no, "control needs (qubit,polarity)");
            }
            const unsigned pol = parse_unsigned(pair.substr(comma + 1), line_no);
            if (pol > 1) {
                parse_error(line_no, "control polarity must be 0 or 1");
            }
            gate.controls.push_back({parse_unsigned(pair.substr(0, comma), line_no), pol == 1});
            controls = controls.substr(close + 1);
            const auto next = controls.find(',');
            controls = next == std::string_view::npos ? "" : controls.substr(next + 1);
        }

        const auto angle_pos = rest.find("angle=");
        if (angle_pos != std::string_view::npos) {
            const std::string text(trim(rest.substr(angle_pos + 6)));
            std::size_t used = 0;
            try {
                gate.angle = std::stod(text, &used);
            } catch (const std::exception&) {
                parse_error(line_no, "bad angle '" + text + "'");
            }
            if (used != text.size()) {
                parse_error(line_no, "bad angle '" + text + "'");
            }
        }
        try {
            circuit->append(std::move(gate));
        } catch (const std::exception& e) {
            parse_error(line_no, e.what());
        }
    }
    if (!circuit) {
        throw std::invalid_argument("circuit text is missing the 'qubits=<q>' header");
    }
    return std::move(*circuit);
}

Circuit parse_circuit(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_circuit(in);
}

}  // namespace qalign
