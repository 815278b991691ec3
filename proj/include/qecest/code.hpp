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

#ifndef QECEST_CODE_HPP
#define QECEST_CODE_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qecest/errors.hpp"
#include "qecest/pauli.hpp"

namespace qecest {

/// Syndrome bit vector packed into an integer; bit i is the outcome of generator i.
using Syndrome = uint32_t;

/// Largest number of stabilizer generators a code may have.
inline constexpr int kMaxChecks = 16;

namespace gf2 {

/// Symplectic row (x | z << n) of a Pauli.
inline uint64_t row(const PauliOperator &p) {
    return p.x_bits() | (p.z_bits() << p.num_qubits());
}

/// Incremental row-echelon basis over GF(2) for 64-bit rows.
class Basis {
   public:
    /// Reduces `v` against the basis; returns the residue.
    uint64_t reduce(uint64_t v) const {
        for (const auto &[pivot, r] : rows_) {
            if ((v >> pivot) & 1) v ^= r;
        }
        return v;
    }

    /// Adds `v` if independent. Returns false when `v` is already in the span.
    bool insert(uint64_t v) {
        v = reduce(v);
        if (v == 0) return false;
        int pivot = std::countr_zero(v);
        for (auto &entry : rows_) {
            if ((entry.second >> pivot) & 1) entry.second ^= v;
        }
        rows_.push_back({pivot, v});
        return true;
    }

    size_t rank() const { return rows_.size(); }

   private:
    std::vector<std::pair<int, uint64_t>> rows_;
};

/// Solves A v = b over GF(2) where row i of A is `rows[i]` (over `width` columns).
/// Returns nullopt when inconsistent.
inline std::optional<uint64_t> solve(std::vector<uint64_t> rows, std::vector<uint8_t> rhs, int width) {
    size_t m = rows.size();
    std::vector<int> pivot_col;
    size_t r = 0;
    for (int col = 0; col < width && r < m; col++) {
        size_t pick = r;
        while (pick < m && !((rows[pick] >> col) & 1)) pick++;
        if (pick == m) continue;
        std::swap(rows[pick], rows[r]);
        std::swap(rhs[pick], rhs[r]);
        for (size_t i = 0; i < m; i++) {
            if (i != r && ((rows[i] >> col) & 1)) {
                rows[i] ^= rows[r];
                rhs[i] ^= rhs[r];
            }
        }
        pivot_col.push_back(col);
        r++;
    }
    for (size_t i = r; i < m; i++) {
        if (rhs[i]) return std::nullopt;
    }
    uint64_t v = 0;
    for (size_t i = 0; i < r; i++) {
        if (rhs[i]) v |= uint64_t{1} << pivot_col[i];
    }
    return v;
}

}  // namespace gf2

/// Result of splitting a Pauli into logical * stabilizer * pure-error parts.
struct Decomposition {
    /// Logical letter per encoded qubit (0..3 = I, X, Y, Z).
    std::vector<uint8_t> logical;
    /// Bit i set when stabilizer generator i appears in the stabilizer part.
    uint32_t stabilizer_mask = 0;
    PauliOperator pure_error;

    /// Logical letter of the first encoded qubit; the only one for k = 1 codes.
    uint8_t logical_class() const { return logical.empty() ? 0 : logical[0]; }
};

/// A validated [[n, k, d]] stabilizer code.
///
/// Besides the user supplied generators and logicals, the code carries a full
/// symplectic frame: one pure error per generator that anticommutes with that
/// generator only and commutes with all logicals and all other pure errors.
class StabilizerCode {
   public:
    /// Validates and builds a code. Throws ValidationError naming the offending operator.
    static StabilizerCode create(std::string name, int n, int k, int d, std::vector<PauliOperator> stabilizers,
                                 std::vector<PauliOperator> logical_x, std::vector<PauliOperator> logical_z) {
        StabilizerCode c;
        c.name_ = std::move(name);
        c.n_ = n;
        c.k_ = k;
        c.d_ = d;
        c.stabilizers_ = std::move(stabilizers);
        c.logical_x_ = std::move(logical_x);
        c.logical_z_ = std::move(logical_z);
        c.validate();
        c.build_frame();
        return c;
    }

    static StabilizerCode create(std::string name, int n, int k, int d, const std::vector<std::string> &stabilizers,
                                 const std::vector<std::string> &logical_x,
                                 const std::vector<std::string> &logical_z) {
        auto parse = [](const std::vector<std::string> &texts) {
            std::vector<PauliOperator> out;
            for (const auto &t : texts) out.push_back(PauliOperator::from_string(t));
            return out;
        };
        return create(std::move(name), n, k, d, parse(stabilizers), parse(logical_x), parse(logical_z));
    }

    const std::string &name() const { return name_; }
    int n() const { return n_; }
    int k() const { return k_; }
    int d() const { return d_; }
    int num_checks() const { return n_ - k_; }
    uint32_t num_syndromes() const { return uint32_t{1} << num_checks(); }
    const std::vector<PauliOperator> &stabilizers() const { return stabilizers_; }
    const std::vector<PauliOperator> &logical_x() const { return logical_x_; }
    const std::vector<PauliOperator> &logical_z() const { return logical_z_; }
    const std::vector<PauliOperator> &pure_errors() const { return pure_errors_; }

    /// Hermitian logical operator for a letter of encoded qubit `j` (Y is i*X*Z).
    PauliOperator logical_operator(uint8_t letter, int j = 0) const {
        switch (letter) {
            case LETTER_I: return PauliOperator(n_);
            case LETTER_X: return logical_x_[j];
            case LETTER_Z: return logical_z_[j];
            default: return multiply(multiply(PauliOperator(n_, 0, 0, 1), logical_x_[j]), logical_z_[j]);
        }
    }

    /// Stabilizer group element for a generator mask, multiplied in generator order.
    PauliOperator stabilizer_element(uint32_t mask) const {
        PauliOperator out(n_);
        for (int i = 0; i < num_checks(); i++) {
            if ((mask >> i) & 1) out = multiply(out, stabilizers_[i]);
        }
        return out;
    }

    /// Product of the pure errors selected by a syndrome.
    PauliOperator pure_error(Syndrome s) const {
        PauliOperator out(n_);
        for (int i = 0; i < num_checks(); i++) {
            if ((s >> i) & 1) out = multiply(out, pure_errors_[i]);
        }
        return out;
    }

   private:
    void fail(const std::string &msg) const { throw ValidationError("code '" + name_ + "': " + msg); }

    void validate() const {
        if (n_ < 1 || n_ > kMaxQubits) fail("n out of range");
        if (k_ < 0 || k_ >= n_) fail("k must satisfy 0 <= k < n");
        if (n_ - k_ > kMaxChecks) {
            throw CapacityError("code '" + name_ + "': n-k = " + std::to_string(n_ - k_) + " exceeds " +
                                std::to_string(kMaxChecks) + " checks");
        }
        if (d_ < 1 || d_ > n_) fail("distance must be in [1, n]");
        if (static_cast<int>(stabilizers_.size()) != n_ - k_) {
            fail("count mismatch: expected " + std::to_string(n_ - k_) + " stabilizers, got " +
                 std::to_string(stabilizers_.size()));
        }
        if (static_cast<int>(logical_x_.size()) != k_ || static_cast<int>(logical_z_.size()) != k_) {
            fail("count mismatch: expected " + std::to_string(k_) + " logical X and Z operators");
        }
        auto check_op = [&](const PauliOperator &p, const char *what) {
            if (p.num_qubits() != n_) fail(std::string(what) + " " + p.str() + " has wrong qubit count");
            if (p.phase_exp() & 1) fail(std::string(what) + " " + p.str() + " is not Hermitian");
        };
        for (const auto &g : stabilizers_) check_op(g, "stabilizer");
        for (const auto &l : logical_x_) check_op(l, "logical X");
        for (const auto &l : logical_z_) check_op(l, "logical Z");

        for (size_t i = 0; i < stabilizers_.size(); i++) {
            for (size_t j = i + 1; j < stabilizers_.size(); j++) {
                if (!commutes(stabilizers_[i], stabilizers_[j])) {
                    fail("anticommuting generators " + stabilizers_[i].str() + " and " + stabilizers_[j].str());
                }
            }
        }
        gf2::Basis basis;
        for (const auto &g : stabilizers_) {
            if (!basis.insert(gf2::row(g))) fail("dependent generator " + g.str());
            if (g.is_identity_up_to_phase() && g.phase_exp() == 2) fail("generator " + g.str() + " is -I");
        }
        for (int j = 0; j < k_; j++) {
            for (const auto &g : stabilizers_) {
                if (!commutes(logical_x_[j], g)) {
                    fail("logical X " + logical_x_[j].str() + " is outside the normalizer (anticommutes with " +
                         g.str() + ")");
                }
                if (!commutes(logical_z_[j], g)) {
                    fail("logical Z " + logical_z_[j].str() + " is outside the normalizer (anticommutes with " +
                         g.str() + ")");
                }
            }
        }
        for (int i = 0; i < k_; i++) {
            for (int j = 0; j < k_; j++) {
                bool anti = !commutes(logical_x_[i], logical_z_[j]);
                if (anti != (i == j)) {
                    fail("logical anticommutation check fails for X " + logical_x_[i].str() + " and Z " +
                         logical_z_[j].str());
                }
                if (i < j && (!commutes(logical_x_[i], logical_x_[j]) || !commutes(logical_z_[i], logical_z_[j]))) {
                    fail("logical operators of different qubits anticommute");
                }
            }
        }
    }

    void build_frame() {
        int r = num_checks();
        // Constraint rows: <v, w> = v.x.w.z + v.z.w.x, i.e. the row of w with halves swapped.
        auto swapped = [&](const PauliOperator &w) { return w.z_bits() | (w.x_bits() << n_); };
        std::vector<uint64_t> rows;
        for (const auto &g : stabilizers_) rows.push_back(swapped(g));
        for (int j = 0; j < k_; j++) {
            rows.push_back(swapped(logical_x_[j]));
            rows.push_back(swapped(logical_z_[j]));
        }
        pure_errors_.clear();
        uint64_t lo = (n_ == 64) ? ~uint64_t{0} : (uint64_t{1} << n_) - 1;
        for (int i = 0; i < r; i++) {
            std::vector<uint8_t> rhs(rows.size(), 0);
            rhs[i] = 1;
            auto v = gf2::solve(rows, rhs, 2 * n_);
            if (!v) fail("no pure error exists for generator " + stabilizers_[i].str());
            pure_errors_.emplace_back(n_, *v & lo, *v >> n_, 0);
        }
        for (int j = 0; j < r; j++) {
            for (int i = 0; i < j; i++) {
                if (!commutes(pure_errors_[i], pure_errors_[j])) {
                    pure_errors_[j] = multiply(pure_errors_[j], stabilizers_[i]).phase_free();
                }
            }
        }
    }

    std::string name_;
    int n_ = 0, k_ = 0, d_ = 0;
    std::vector<PauliOperator> stabilizers_, logical_x_, logical_z_, pure_errors_;
};

/// Bit i set when `p` anticommutes with stabilizer generator i.
inline Syndrome syndrome_of(const StabilizerCode &code, const PauliOperator &p) {
    if (p.num_qubits() != code.n()) {
        throw UsageError("syndrome_of: Pauli has " + std::to_string(p.num_qubits()) + " qubits, code has " +
                         std::to_string(code.n()));
    }
    Syndrome s = 0;
    const auto &gens = code.stabilizers();
    for (size_t i = 0; i < gens.size(); i++) {
        if (!commutes(p, gens[i])) s |= Syndrome{1} << i;
    }
    return s;
}

/// Syndrome as a bit vector of length n-k.
inline std::vector<bool> syndrome_bits(const StabilizerCode &code, Syndrome s) {
    std::vector<bool> out(code.num_checks());
    for (int i = 0; i < code.num_checks(); i++) out[i] = (s >> i) & 1;
    return out;
}

/// Splits `p` as (logical) * (stabilizer) * (pure error), up to phase.
inline Decomposition decompose(const StabilizerCode &code, const PauliOperator &p) {
    Syndrome s = syndrome_of(code, p);
    Decomposition out;
    out.pure_error = code.pure_error(s);
    PauliOperator normal = multiply(p, out.pure_error);
    for (int j = 0; j < code.k(); j++) {
        bool has_x = !commutes(normal, code.logical_z()[j]);
        bool has_z = !commutes(normal, code.logical_x()[j]);
        out.logical.push_back(letter_digit(has_x, has_z));
    }
    const auto &pure = code.pure_errors();
    for (int i = 0; i < code.num_checks(); i++) {
        if (!commutes(normal, pure[i])) out.stabilizer_mask |= uint32_t{1} << i;
    }
    return out;
}

/// Logical class letter of an operator that is already in the normalizer (k = 1 codes).
inline uint8_t logical_class_of_normalizer_element(const StabilizerCode &code, const PauliOperator &p) {
    bool has_x = !commutes(p, code.logical_z()[0]);
    bool has_z = !commutes(p, code.logical_x()[0]);
    return letter_digit(has_x, has_z);
}

/// Builds a code from the JSON document {name, n, k, d, stabilizers, logical_x, logical_z}.
inline StabilizerCode code_from_json(const nlohmann::json &doc) {
    try {
        for (const char *key : {"n", "k", "d", "stabilizers", "logical_x", "logical_z"}) {
            if (!doc.contains(key)) throw ValidationError(std::string("code definition missing field '") + key + "'");
        }
        return StabilizerCode::create(doc.value("name", std::string("unnamed")), doc.at("n").get<int>(),
                                      doc.at("k").get<int>(), doc.at("d").get<int>(),
                                      doc.at("stabilizers").get<std::vector<std::string>>(),
                                      doc.at("logical_x").get<std::vector<std::string>>(),
                                      doc.at("logical_z").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed code definition: ") + e.what());
    } catch (const UsageError &e) {
        throw ValidationError(std::string("malformed code definition: ") + e.what());
    }
}

inline nlohmann::json code_to_json(const StabilizerCode &code) {
    auto strs = [](const std::vector<PauliOperator> &ops) {
        std::vector<std::string> out;
        for (const auto &p : ops) out.push_back(p.str());
        return out;
    };
    return {{"name", code.name()},          {"n", code.n()},
            {"k", code.k()},                {"d", code.d()},
            {"stabilizers", strs(code.stabilizers())}, {"logical_x", strs(code.logical_x())},
            {"logical_z", strs(code.logical_z())}};
}

/// Parses a code definition document.
inline StabilizerCode load_code(std::istream &in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("code definition is not valid JSON: ") + e.what());
    }
    return code_from_json(doc);
}

inline StabilizerCode load_code_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open code definition '" + path + "'");
    return load_code(in);
}

/// The [[7,1,3]] Steane code: X and Z checks from the [7,4] Hamming parity matrix.
inline StabilizerCode steane_code() {
    return StabilizerCode::create("steane", 7, 1, 3,
                                  std::vector<std::string>{"XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ",
                                                           "IIIZZZZ"},
                                  {"XXXXXXX"}, {"ZZZZZZZ"});
}

/// Cyclic [[n,1,d]] codes whose generators are the n cyclic shifts of one Pauli
/// string (one shift is redundant). Returns seed strings in canonical-index order.
///
/// Exhaustive over 4^n seeds and 4^n candidate logicals, so small n only.
inline std::vector<std::string> search_cyclic_codes(int n, int d) {
    if (n > 9) throw CapacityError("cyclic code search limited to n <= 9");
    std::vector<std::string> found;
    uint64_t total = pauli_count(n);
    for (uint64_t seed = 1; seed < total; seed++) {
        PauliOperator g = PauliOperator::from_index(n, seed);
        if (g.digit(0) == LETTER_I) continue;
        std::vector<PauliOperator> shifts;
        std::string letters = g.letters();
        for (int sh = 0; sh < n; sh++) {
            shifts.push_back(PauliOperator::from_string(letters.substr(n - sh) + letters.substr(0, n - sh)));
        }
        bool ok = true;
        for (int i = 0; i < n && ok; i++) {
            for (int j = i + 1; j < n && ok; j++) ok = commutes(shifts[i], shifts[j]);
        }
        if (!ok) continue;
        gf2::Basis basis;
        for (const auto &s : shifts) basis.insert(gf2::row(s));
        if (static_cast<int>(basis.rank()) != n - 1) continue;
        int dist = n + 1;
        for (uint64_t idx = 1; idx < total && dist > d; idx++) {
            PauliOperator p = PauliOperator::from_index(n, idx);
            if (weight(p) >= dist) continue;
            bool in_normalizer = true;
            for (const auto &s : shifts) {
                if (!commutes(p, s)) {
                    in_normalizer = false;
                    break;
                }
            }
            if (in_normalizer && basis.reduce(gf2::row(p)) != 0) dist = weight(p);
        }
        if (dist == d) found.push_back(letters);
    }
    return found;
}

/// Builds a validated [[n,1,d]] code from a cyclic seed string: the first n-1
/// shifts as generators plus a minimum-index logical pair.
inline StabilizerCode cyclic_code_from_seed(const std::string &name, const std::string &seed_letters, int d) {
    int n = static_cast<int>(seed_letters.size());
    std::vector<PauliOperator> gens;
    gf2::Basis basis;
    for (int sh = 0; sh < n && static_cast<int>(gens.size()) < n - 1; sh++) {
        auto p = PauliOperator::from_string(seed_letters.substr(n - sh) + seed_letters.substr(0, n - sh));
        if (basis.insert(gf2::row(p))) gens.push_back(p);
    }
    auto in_normalizer = [&](const PauliOperator &p) {
        for (const auto &g : gens) {
            if (!commutes(p, g)) return false;
        }
        return true;
    };
    std::optional<PauliOperator> lx, lz;
    for (uint64_t idx = 1; idx < pauli_count(n) && !(lx && lz); idx++) {
        PauliOperator p = PauliOperator::from_index(n, idx);
        if (!in_normalizer(p) || basis.reduce(gf2::row(p)) == 0) continue;
        if (!lx) {
            lx = p;
        } else if (!commutes(p, *lx)) {
            lz = p;
        }
    }
    if (!lx || !lz) throw ValidationError("seed " + seed_letters + " does not define a k=1 code");
    return StabilizerCode::create(name, n, 1, d, gens, {*lx}, {*lz});
}

}  // namespace qecest

#endif
