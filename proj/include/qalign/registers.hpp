// SPDX-License-Identifier: Apache-2.0

// Classical sequence encoding and the circuits that load a database, a target
// and their Hamming distances into one 2n + k qubit register.
//
// Register map (qubit indices):
//   data     [0, n)        database entry D_i
//   sample   [n, 2n)       target S, overwritten with S xor D_i
//   hamming  [2n, 2n + k)  popcount(S xor D_i), k = ceil(log2(n + 1))

#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qalign/simcore.hpp"

namespace qalign {

class Alphabet {
public:
    /// Letters map to codes in listed order: the i-th letter encodes as the
    /// z-bit binary form of i.
    explicit Alphabet(std::vector<char> letters);

    static Alphabet dna() { return Alphabet({'A', 'T', 'G', 'C'}); }

    const std::vector<char>& letters() const { return letters_; }
    unsigned bits_per_letter() const { return bits_per_letter_; }
    std::string code(char letter) const;

private:
    std::vector<char> letters_;
    unsigned bits_per_letter_;
};

/// Concatenated per-symbol codes. Throws on symbols outside the alphabet.
std::string encode_sequence(std::string_view text, const Alphabet& alphabet);

/// All length-m windows of `genome`, in order. Duplicates are kept here;
/// `Database::from_bitstrings_dedup` collapses them.
std::vector<std::string> subsequence_windows(std::string_view genome, std::size_t m);

class Database {
public:
    /// Distinct n-bit entries, in the given order. Throws on duplicates,
    /// width mismatches or an empty list.
    Database(unsigned n, std::vector<std::uint64_t> entries);

    static Database from_bitstrings(const std::vector<std::string>& bits);
    /// As above but drops repeated entries, warning on stderr.
    static Database from_bitstrings_dedup(const std::vector<std::string>& bits);

    unsigned width() const { return n_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::uint64_t>& entries() const { return entries_; }
    bool contains(std::uint64_t value) const;

private:
    unsigned n_;
    std::vector<std::uint64_t> entries_;
};

struct TargetSequence {
    unsigned n;
    std::uint64_t bits;

    static TargetSequence from_bitstring(std::string_view bits);
    std::string to_string() const { return to_bitstring(bits, n); }
};

struct RegisterLayout {
    unsigned n;
    unsigned k;
    unsigned total;

    explicit RegisterLayout(unsigned data_width);

    unsigned data_qubit(unsigned j) const { return j; }
    unsigned sample_qubit(unsigned j) const { return n + j; }
    unsigned hamming_qubit(unsigned b) const { return 2 * n + b; }

    std::uint64_t data_value(std::uint64_t index) const { return index & mask(n); }
    std::uint64_t sample_value(std::uint64_t index) const { return (index >> n) & mask(n); }
    std::uint64_t hamming_value(std::uint64_t index) const { return (index >> (2 * n)) & mask(k); }
    std::uint64_t compose(std::uint64_t data, std::uint64_t sample, std::uint64_t hamming) const {
        return data | (sample << n) | (hamming << (2 * n));
    }

private:
    static std::uint64_t mask(unsigned bits) { return (std::uint64_t{1} << bits) - 1; }
};

/// ceil(log2(n + 1)): bits needed to hold a distance in [0, n].
unsigned hamming_width(unsigned n);

unsigned hamming_distance(std::uint64_t a, std::uint64_t b);

/// (1/sqrt N) sum_i |D_i> on n qubits.
Statevector database_state(const Database& db);

/// Exact preparation circuit for an arbitrary state, up to global phase.
/// Magnitudes are loaded top-down with prefix-controlled RY rotations, then
/// relative phases are fixed bottom-up with prefix-controlled RZ rotations.
Circuit state_preparation(const Statevector& state);

/// Exact database loader: state_preparation(database_state(db)).
Circuit exact_loader(const Database& db);

Circuit target_loader(const TargetSequence& target, const RegisterLayout& layout);

/// n CNOTs, data qubit j onto sample qubit j.
Circuit entangler(const RegisterLayout& layout);

/// |s>|0> -> |s>|popcount(s)> on the sample and hamming registers. Built as
/// one controlled +1 on the hamming register per sample qubit; each increment
/// is a descending chain of MCX gates (top bit first, each conditioned on all
/// lower bits being 1).
Circuit popcount_operator(const RegisterLayout& layout);

/// loader (on the data register), then target loader, entangler and popcount.
Circuit initialisation_unitary(const Circuit& db_loader, const TargetSequence& target,
                               const RegisterLayout& layout);

/// Database file: first line `n=<width>`, then one bitstring per line.
Database read_database(std::istream& in);
Database load_database(const std::string& path);

/// Alphabet file: one symbol per line.
Alphabet read_alphabet(std::istream& in);
Alphabet load_alphabet(const std::string& path);

}  // namespace qalign
