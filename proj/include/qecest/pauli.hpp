// Copyright 2026 The qecest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QECEST_PAULI_HPP
#define QECEST_PAULI_HPP

#include <bit>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "qecest/errors.hpp"

namespace qecest {

/// Largest supported qubit count. The x and z halves of a Pauli share one
/// 64-bit symplectic row during GF(2) elimination, hence 32.
inline constexpr int kMaxQubits = 32;

/// Single-qubit Pauli letters in canonical digit order.
enum PauliLetter : uint8_t { LETTER_I = 0, LETTER_X = 1, LETTER_Y = 2, LETTER_Z = 3 };

inline constexpr char kLetterChars[4] = {'I', 'X', 'Y', 'Z'};

/// Canonical digit of a letter from its (x, z) bits: I=0, X=1, Y=2, Z=3.
constexpr uint8_t letter_digit(bool x, bool z) {
    return x ? (z ? LETTER_Y : LETTER_X) : (z ? LETTER_Z : LETTER_I);
}
constexpr bool digit_x(uint8_t d) { return d == LETTER_X || d == LETTER_Y; }
constexpr bool digit_z(uint8_t d) { return d == LETTER_Z || d == LETTER_Y; }

/// An n-qubit Pauli operator i^phase * (sigma_0 (x) sigma_1 (x) ... ), where each
/// sigma_q is the Hermitian letter selected by bit q of `x` and `z` (both set = Y).
///
/// Qubit q lives in bit q. The canonical integer index uses base-4 digits with
/// qubit 0 as the most significant digit.
class PauliOperator {
   public:
    PauliOperator() = default;

    /// Identity on `num_qubits` qubits.
    explicit PauliOperator(int num_qubits) : n_(num_qubits) { check_size(num_qubits); }

    PauliOperator(int num_qubits, uint64_t x, uint64_t z, int phase_exp = 0)
        : n_(num_qubits), x_(x), z_(z), phase_(static_cast<uint8_t>(((phase_exp % 4) + 4) % 4)) {
        check_size(num_qubits);
        uint64_t mask = qubit_mask(num_qubits);
        if ((x & ~mask) || (z & ~mask)) {
            throw UsageError("Pauli bits set beyond qubit count " + std::to_string(num_qubits));
        }
    }

    /// Parses "IXYZ..." with an optional "+", "-", "+i", "-i", "i", "+1" or "-1" prefix.
    static PauliOperator from_string(std::string_view text) {
        static constexpr std::pair<std::string_view, int> kPrefixes[] = {
            {"+1", 0}, {"+i", 1}, {"-1", 2}, {"-i", 3}, {"i", 1}, {"-", 2}, {"+", 0}};
        int phase = 0;
        for (const auto &[prefix, exp] : kPrefixes) {
            if (text.starts_with(prefix)) {
                text.remove_prefix(prefix.size());
                phase = exp;
                break;
            }
        }
        if (text.empty()) {
            throw UsageError("empty Pauli string");
        }
        int n = static_cast<int>(text.size());
        check_size(n);
        uint64_t x = 0, z = 0;
        for (int q = 0; q < n; q++) {
            switch (text[q]) {
                case 'I': case '_': break;
                case 'X': x |= uint64_t{1} << q; break;
                case 'Y': x |= uint64_t{1} << q; z |= uint64_t{1} << q; break;
                case 'Z': z |= uint64_t{1} << q; break;
                default:
                    throw UsageError("bad Pauli character '" + std::string(1, text[q]) + "' in \"" +
                                     std::string(text) + "\"");
            }
        }
        return PauliOperator(n, x, z, phase);
    }

    /// Phase-free operator with the given canonical index in [0, 4^n).
    static PauliOperator from_index(int num_qubits, uint64_t index) {
        check_size(num_qubits);
        uint64_t x = 0, z = 0;
        for (int q = num_qubits - 1; q >= 0; q--) {
            uint8_t d = index & 3;
            index >>= 2;
            if (digit_x(d)) x |= uint64_t{1} << q;
            if (digit_z(d)) z |= uint64_t{1} << q;
        }
        if (index != 0) {
            throw UsageError("Pauli index out of range for " + std::to_string(num_qubits) + " qubits");
        }
        return PauliOperator(num_qubits, x, z, 0);
    }

    int num_qubits() const { return n_; }
    uint64_t x_bits() const { return x_; }
    uint64_t z_bits() const { return z_; }
    int phase_exp() const { return phase_; }

    uint8_t digit(int q) const { return letter_digit((x_ >> q) & 1, (z_ >> q) & 1); }
    char letter(int q) const { return kLetterChars[digit(q)]; }

    uint64_t index() const {
        uint64_t out = 0;
        for (int q = 0; q < n_; q++) {
            out = (out << 2) | digit(q);
        }
        return out;
    }

    bool is_identity_up_to_phase() const { return x_ == 0 && z_ == 0; }

    /// Same operator with the phase dropped.
    PauliOperator phase_free() const { return PauliOperator(n_, x_, z_, 0); }

    PauliOperator with_phase(int phase_exp) const { return PauliOperator(n_, x_, z_, phase_exp); }

    /// Letters only, qubit 0 leftmost.
    std::string letters() const {
        std::string out(n_, 'I');
        for (int q = 0; q < n_; q++) out[q] = letter(q);
        return out;
    }

    /// Letters with a sign prefix when the phase is not +1.
    std::string str() const {
        static constexpr const char *kPrefix[4] = {"", "+i", "-", "-i"};
        return kPrefix[phase_] + letters();
    }

    bool operator==(const PauliOperator &other) const = default;

   private:
    static uint64_t qubit_mask(int n) { return n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1; }
    static void check_size(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw UsageError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                             std::to_string(n));
        }
    }

    int n_ = 0;
    uint64_t x_ = 0;
    uint64_t z_ = 0;
    uint8_t phase_ = 0;
};

namespace detail {
inline void require_same_size(const PauliOperator &a, const PauliOperator &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw UsageError("Pauli size mismatch: " + std::to_string(a.num_qubits()) + " vs " +
                         std::to_string(b.num_qubits()));
    }
}
}  // namespace detail

/// Exact operator product a*b including the power of i.
inline PauliOperator multiply(const PauliOperator &a, const PauliOperator &b) {
    detail::require_same_size(a, b);
    uint64_t ax = a.x_bits() & ~a.z_bits(), ay = a.x_bits() & a.z_bits(), az = ~a.x_bits() & a.z_bits();
    uint64_t bx = b.x_bits() & ~b.z_bits(), by = b.x_bits() & b.z_bits(), bz = ~b.x_bits() & b.z_bits();
    // XY = iZ, YZ = iX, ZX = iY; the reversed orders pick up -i.
    uint64_t plus = (ax & by) | (ay & bz) | (az & bx);
    uint64_t minus = (ay & bx) | (az & by) | (ax & bz);
    int phase = a.phase_exp() + b.phase_exp() + std::popcount(plus) - std::popcount(minus);
    return PauliOperator(a.num_qubits(), a.x_bits() ^ b.x_bits(), a.z_bits() ^ b.z_bits(), phase);
}

inline PauliOperator operator*(const PauliOperator &a, const PauliOperator &b) { return multiply(a, b); }

/// Multiplicative inverse: the letters square to identity, so only the phase flips.
inline PauliOperator inverse(const PauliOperator &p) { return p.with_phase(4 - p.phase_exp()); }

/// Parity of the symplectic inner product.
inline bool symplectic_product(const PauliOperator &a, const PauliOperator &b) {
    detail::require_same_size(a, b);
    return std::popcount((a.x_bits() & b.z_bits()) ^ (a.z_bits() & b.x_bits())) & 1;
}

inline bool commutes(const PauliOperator &a, const PauliOperator &b) { return !symplectic_product(a, b); }

/// Number of qubits acted on non-trivially.
inline int weight(const PauliOperator &p) { return std::popcount(p.x_bits() | p.z_bits()); }

/// 4^n as an integer; callers keep n within the enumeration capacity.
constexpr uint64_t pauli_count(int n) { return uint64_t{1} << (2 * n); }

/// Canonical digit of qubit q inside a canonical index over n qubits.
constexpr uint8_t index_digit(uint64_t index, int n, int q) { return (index >> (2 * (n - 1 - q))) & 3; }

/// Weight of the Pauli with this canonical index.
constexpr int index_weight(uint64_t index) {
    return std::popcount((index | (index >> 1)) & 0x5555555555555555ULL);
}

inline std::ostream &operator<<(std::ostream &out, const PauliOperator &p) { return out << p.str(); }

}  // namespace qecest

#endif
