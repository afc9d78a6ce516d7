// SPDX-License-Identifier: Apache-2.0

#include "qalign/registers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <stdexcept>

namespace qalign {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical encoding

Alphabet::Alphabet(std::vector<char> letters) : letters_(std::move(letters)) {
    if (letters_.size() < 2) {
        throw std::invalid_argument("alphabet needs at least two letters");
    }
    std::set<char> unique(letters_.begin(), letters_.end());
    if (unique.size() != letters_.size()) {
        throw std::invalid_argument("alphabet letters must be distinct");
    }
    bits_per_letter_ = static_cast<unsigned>(std::bit_width(letters_.size() - 1));
}

std::string Alphabet::code(char letter) const {
    const auto it = std::find(letters_.begin(), letters_.end(), letter);
    if (it == letters_.end()) {
        throw std::invalid_argument(std::string("symbol '") + letter + "' is not in the alphabet");
    }
    return to_bitstring(static_cast<std::uint64_t>(it - letters_.begin()), bits_per_letter_);
}

std::string encode_sequence(std::string_view text, const Alphabet& alphabet) {
    std::string bits;
    bits.reserve(text.size() * alphabet.bits_per_letter());
    for (char c : text) {
        bits += alphabet.code(c);
    }
    return bits;
}

std::vector<std::string> subsequence_windows(std::string_view genome, std::size_t m) {
    if (m == 0) {
        throw std::invalid_argument("window length must be at least 1");
    }
    if (m > genome.size()) {
        throw std::invalid_argument("window length exceeds sequence length");
    }
    std::vector<std::string> windows;
    windows.reserve(genome.size() - m + 1);
    for (std::size_t i = 0; i + m <= genome.size(); ++i) {
        windows.emplace_back(genome.substr(i, m));
    }
    return windows;
}

// ---------------------------------------------------------------------------
// Database and target

Database::Database(unsigned n, std::vector<std::uint64_t> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n == 0 || n > 20) {
        throw std::invalid_argument("database width must be in [1, 20]");
    }
    if (entries_.empty()) {
        throw std::invalid_argument("database is empty");
    }
    std::set<std::uint64_t> seen;
    for (auto e : entries_) {
        if (e >> n) {
            throw std::invalid_argument("entry wider than " + std::to_string(n) + " bits");
        }
        if (!seen.insert(e).second) {
            throw std::invalid_argument("duplicate database entry " + to_bitstring(e, n));
        }
    }
}

namespace {

unsigned common_width(const std::vector<std::string>& bits) {
    if (bits.empty()) {
        throw std::invalid_argument("database is empty");
    }
    const auto width = bits.front().size();
    for (const auto& b : bits) {
        if (b.size() != width) {
            throw std::invalid_argument("database entries have different widths");
        }
    }
    return static_cast<unsigned>(width);
}

}  // namespace

Database Database::from_bitstrings(const std::vector<std::string>& bits) {
    const unsigned n = common_width(bits);
    std::vector<std::uint64_t> entries;
    entries.reserve(bits.size());
    for (const auto& b : bits) {
        entries.push_back(parse_bitstring(b));
    }
    return Database(n, std::move(entries));
}

Database Database::from_bitstrings_dedup(const std::vector<std::string>& bits) {
    const unsigned n = common_width(bits);
    std::vector<std::uint64_t> entries;
    std::set<std::uint64_t> seen;
    std::size_t dropped = 0;
    for (const auto& b : bits) {
        const auto v = parse_bitstring(b);
        if (seen.insert(v).second) {
            entries.push_back(v);
        } else {
            ++dropped;
        }
    }
    if (dropped > 0) {
        std::clog << "warning: dropped " << dropped << " duplicate database entr"
                  << (dropped == 1 ? "y" : "ies") << '\n';
    }
    return Database(n, std::move(entries));
}

bool Database::contains(std::uint64_t value) const {
    return std::find(entries_.begin(), entries_.end(), value) != entries_.end();
}

TargetSequence TargetSequence::from_bitstring(std::string_view bits) {
    if (bits.empty()) {
        throw std::invalid_argument("target is empty");
    }
    return {static_cast<unsigned>(bits.size()), parse_bitstring(bits)};
}

unsigned hamming_width(unsigned n) {
    return static_cast<unsigned>(std::bit_width(n));
}

unsigned hamming_distance(std::uint64_t a, std::uint64_t b) {
    return static_cast<unsigned>(std::popcount(a ^ b));
}

RegisterLayout::RegisterLayout(unsigned data_width)
    : n(data_width), k(hamming_width(data_width)), total(2 * data_width + hamming_width(data_width)) {
    if (data_width == 0) {
        throw std::invalid_argument("data register needs at least one qubit");
    }
}

// ---------------------------------------------------------------------------
// State preparation

Statevector database_state(const Database& db) {
    std::vector<Complex> amps(std::size_t{1} << db.width(), Complex{0.0, 0.0});
    const double a = 1.0 / std::sqrt(static_cast<double>(db.size()));
    for (auto e : db.entries()) {
        amps[e] = a;
    }
    return Statevector::from_amplitudes(db.width(), std::move(amps));
}

namespace {

// Controls selecting the prefix `value` on qubits [low, n).
std::vector<Control> prefix_controls(unsigned n, unsigned low, std::uint64_t value) {
    std::vector<Control> controls;
    for (unsigned q = low; q < n; ++q) {
        controls.push_back({q, ((value >> (q - low)) & 1U) != 0});
    }
    return controls;
}

constexpr double kAngleEpsilon = 1e-14;

}  // namespace

Circuit state_preparation(const Statevector& state) {
    const unsigned n = state.num_qubits();
    Circuit circuit(n);
    const auto amps = state.amplitudes();

    // weight[level][prefix]: probability mass of basis states whose top
    // `level` qubits spell `prefix`. level = n is the per-amplitude weight.
    std::vector<std::vector<double>> weight(n + 1);
    weight[n].resize(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        weight[n][i] = std::norm(amps[i]);
    }
    for (unsigned level = n; level-- > 0;) {
        weight[level].resize(std::size_t{1} << level);
        for (std::size_t p = 0; p < weight[level].size(); ++p) {
            weight[level][p] = weight[level + 1][2 * p] + weight[level + 1][2 * p + 1];
        }
    }

    // Magnitudes: at level l the qubit n-1-l splits each prefix's mass.
    for (unsigned level = 0; level < n; ++level) {
        const unsigned q = n - 1 - level;
        for (std::uint64_t p = 0; p < weight[level].size(); ++p) {
            if (weight[level][p] <= 0.0) {
                continue;
            }
            const double w0 = weight[level + 1][2 * p];
            const double w1 = weight[level + 1][2 * p + 1];
            const double theta = 2.0 * std::atan2(std::sqrt(w1), std::sqrt(w0));
            if (std::abs(theta) < kAngleEpsilon) {
                continue;
            }
            circuit.append(Gate::ry(q, theta).controlled_by(prefix_controls(n, q + 1, p)));
        }
    }

    // Phases: each RZ on qubit q fixes the relative phase of a sibling pair
    // and leaves their mean phase for the level above.
    std::vector<double> phase(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        phase[i] = std::norm(amps[i]) > 0.0 ? std::arg(amps[i]) : 0.0;
    }
    for (unsigned level = n; level-- > 0;) {
        const unsigned q = n - 1 - level;
        std::vector<double> parent(std::size_t{1} << level);
        for (std::uint64_t p = 0; p < parent.size(); ++p) {
            const double phi0 = phase[2 * p];
            const double phi1 = phase[2 * p + 1];
            parent[p] = 0.5 * (phi0 + phi1);
            const double delta = phi1 - phi0;
            if (std::abs(delta) < kAngleEpsilon || weight[level][p] <= 0.0) {
                continue;
            }
            circuit.append(Gate::rz(q, delta).controlled_by(prefix_controls(n, q + 1, p)));
        }
        phase = std::move(parent);
    }
    return circuit;
}

Circuit exact_loader(const Database& db) {
    return state_preparation(database_state(db));
}

// ---------------------------------------------------------------------------
// Register circuits

Circuit target_loader(const TargetSequence& target, const RegisterLayout& layout) {
    if (target.n != layout.n) {
        throw std::invalid_argument("target has " + std::to_string(target.n) +
                                    " bits, layout expects " + std::to_string(layout.n));
    }
    Circuit circuit(layout.total);
    for (unsigned j = 0; j < layout.n; ++j) {
        if ((target.bits >> j) & 1U) {
            circuit.append(Gate::x(layout.sample_qubit(j)));
        }
    }
    return circuit;
}

Circuit entangler(const RegisterLayout& layout) {
    Circuit circuit(layout.total);
    for (unsigned j = 0; j < layout.n; ++j) {
        circuit.append(Gate::cnot(layout.data_qubit(j), layout.sample_qubit(j)));
    }
    return circuit;
}

Circuit popcount_operator(const RegisterLayout& layout) {
    Circuit circuit(layout.total);
    for (unsigned j = 0; j < layout.n; ++j) {
        for (unsigned bit = layout.k; bit-- > 0;) {
            std::vector<Control> controls{{layout.sample_qubit(j), true}};
            for (unsigned lower = 0; lower < bit; ++lower) {
                controls.push_back({layout.hamming_qubit(lower), true});
            }
            circuit.append(Gate::mcx(std::move(controls), layout.hamming_qubit(bit)));
        }
    }
    return circuit;
}

Circuit initialisation_unitary(const Circuit& db_loader, const TargetSequence& target,
                               const RegisterLayout& layout) {
    if (db_loader.num_qubits() != layout.n) {
        throw std::invalid_argument("loader acts on " + std::to_string(db_loader.num_qubits()) +
                                    " qubits, data register has " + std::to_string(layout.n));
    }
    Circuit u(layout.total);
    u.append(db_loader);
    u.append(target_loader(target, layout));
    u.append(entangler(layout));
    u.append(popcount_operator(layout));
    return u;
}

// ---------------------------------------------------------------------------
// Files

Database read_database(std::istream& in) {
    std::string line;
    std::optional<unsigned> width;
    std::vector<std::string> entries;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (!width) {
            if (text.substr(0, 2) != "n=") {
                throw std::invalid_argument("database file must start with 'n=<width>'");
            }
            try {
                width = static_cast<unsigned>(std::stoul(std::string(text.substr(2))));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad width in database header");
            }
            continue;
        }
        if (text.size() != *width) {
            throw std::invalid_argument("database line " + std::to_string(line_no) + " has width " +
                                        std::to_string(text.size()) + ", expected " +
                                        std::to_string(*width));
        }
        entries.emplace_back(text);
    }
    if (!width) {
        throw std::invalid_argument("database file is missing the 'n=<width>' header");
    }
    return Database::from_bitstrings(entries);
}

Database load_database(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open database file " + path);
    }
    return read_database(in);
}

Alphabet read_alphabet(std::istream& in) {
    std::vector<char> letters;
    std::string line;
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        if (text.size() != 1) {
            throw std::invalid_argument("alphabet symbols must be single characters");
        }
        letters.push_back(text.front());
    }
    return Alphabet(std::move(letters));
}

Alphabet load_alphabet(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open alphabet file " + path);
    }
    return read_alphabet(in);
}

}  // namespace qalign
