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

#ifndef QECEST_DECODER_HPP
#define QECEST_DECODER_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qecest/code.hpp"

namespace qecest {

/// Largest block size whose 4^n Paulis are enumerated by decoders and estimators.
inline constexpr int kMaxEnumeratedQubits = 12;

/// Per-letter costs of a lookup decoder.
struct DecoderWeights {
    double w_x = 1.0;
    double w_y = 1.0;
    double w_z = 1.0;

    /// Weights (eta, eta, 1) tuned for Z-biased noise.
    static DecoderWeights biased(double eta) { return {eta, eta, 1.0}; }

    double letter_cost(uint8_t digit) const {
        switch (digit) {
            case LETTER_X: return w_x;
            case LETTER_Y: return w_y;
            case LETTER_Z: return w_z;
            default: return 0.0;
        }
    }
};

/// Syndrome -> recovery lookup table.
struct DecoderTable {
    std::vector<PauliOperator> recoveries;
    DecoderWeights weights;
};

inline void require_enumerable(const StabilizerCode &code) {
    if (code.n() > kMaxEnumeratedQubits) {
        throw CapacityError("code '" + code.name() + "' has " + std::to_string(code.n()) +
                            " qubits; exhaustive enumeration supports at most " +
                            std::to_string(kMaxEnumeratedQubits));
    }
}

/// Weighted cost of a Pauli under decoder weights.
inline double weighted_cost(const PauliOperator &p, const DecoderWeights &w) {
    double cost = 0.0;
    for (int q = 0; q < p.num_qubits(); q++) cost += w.letter_cost(p.digit(q));
    return cost;
}

/// Minimum weighted-cost recovery for every syndrome; ties go to the smallest canonical index.
inline DecoderTable build_decoder(const StabilizerCode &code, const DecoderWeights &weights = {}) {
    if (weights.w_x < 0 || weights.w_y < 0 || weights.w_z < 0) {
        throw UsageError("decoder weights must be nonnegative");
    }
    if (weights.w_x == 0 && weights.w_y == 0 && weights.w_z == 0) {
        throw UsageError("decoder weights must not all be zero");
    }
    require_enumerable(code);
    const int n = code.n();
    const uint32_t num_syn = code.num_syndromes();
    std::vector<double> best(num_syn, std::numeric_limits<double>::infinity());
    std::vector<uint64_t> best_index(num_syn, 0);
    const double eps = 1e-12 * (weights.w_x + weights.w_y + weights.w_z);
    const uint64_t total = pauli_count(n);
    for (uint64_t idx = 0; idx < total; idx++) {
        PauliOperator p = PauliOperator::from_index(n, idx);
        Syndrome s = syndrome_of(code, p);
        double cost = weighted_cost(p, weights);
        if (cost < best[s] - eps) {
            best[s] = cost;
            best_index[s] = idx;
        }
    }
    DecoderTable table;
    table.weights = weights;
    table.recoveries.reserve(num_syn);
    for (uint32_t s = 0; s < num_syn; s++) {
        if (!std::isfinite(best[s])) {
            throw ValidationError("code '" + code.name() + "': syndrome " + std::to_string(s) + " is unreachable");
        }
        table.recoveries.push_back(PauliOperator::from_index(n, best_index[s]));
    }
    return table;
}

/// {R_s * S : S in the stabilizer group}, phase-free, in generator-mask order.
inline std::vector<PauliOperator> correctable_set(const StabilizerCode &code, const DecoderTable &decoder, Syndrome s) {
    if (s >= code.num_syndromes()) throw UsageError("syndrome index out of range");
    std::vector<PauliOperator> out;
    out.reserve(code.num_syndromes());
    for (uint32_t h = 0; h < code.num_syndromes(); h++) {
        out.push_back(multiply(decoder.recoveries[s], code.stabilizer_element(h)).phase_free());
    }
    return out;
}

/// A code paired with its decoder and per-Pauli lookup tables used by the enumeration kernels.
///
/// For every canonical index Q over n qubits: its syndrome and the logical class of
/// R_{s(Q)} * Q. For k = 1 codes also the normalizer elements L_a * G_h with their signs.
class CodeTables {
   public:
    CodeTables(StabilizerCode code, DecoderTable decoder) : code_(std::move(code)), decoder_(std::move(decoder)) {
        require_enumerable(code_);
        if (code_.k() != 1) throw UsageError("code '" + code_.name() + "': only k = 1 codes are supported here");
        n_ = code_.n();
        r_ = code_.num_checks();
        const uint64_t total = pauli_count(n_);
        syndrome_.resize(total);
        residual_.resize(total);
        for (uint64_t idx = 0; idx < total; idx++) {
            PauliOperator p = PauliOperator::from_index(n_, idx);
            Syndrome s = syndrome_of(code_, p);
            syndrome_[idx] = s;
            residual_[idx] = logical_class_of_normalizer_element(code_, multiply(decoder_.recoveries[s], p));
        }
        const uint32_t ns = code_.num_syndromes();
        element_index_.resize(4 * ns);
        element_sign_.resize(4 * ns);
        for (uint8_t a = 0; a < 4; a++) {
            PauliOperator la = code_.logical_operator(a);
            for (uint32_t h = 0; h < ns; h++) {
                PauliOperator c = multiply(la, code_.stabilizer_element(h));
                element_index_[a * ns + h] = static_cast<uint32_t>(c.index());
                element_sign_[a * ns + h] = c.phase_exp() == 0 ? 1 : -1;
                if (c.phase_exp() & 1) throw ValidationError("non-Hermitian normalizer element " + c.str());
            }
        }
        logical_sign_.resize(static_cast<size_t>(ns) * 4);
        for (uint32_t s = 0; s < ns; s++) {
            for (uint8_t a = 0; a < 4; a++) {
                logical_sign_[s * 4 + a] = commutes(decoder_.recoveries[s], code_.logical_operator(a)) ? 1 : -1;
            }
        }
    }

    const StabilizerCode &code() const { return code_; }
    const DecoderTable &decoder() const { return decoder_; }
    int n() const { return n_; }
    int num_checks() const { return r_; }
    uint32_t num_syndromes() const { return uint32_t{1} << r_; }
    uint64_t num_paulis() const { return syndrome_.size(); }

    Syndrome syndrome(uint64_t index) const { return syndrome_[index]; }
    /// Logical class left after decoding the Pauli with this canonical index.
    uint8_t residual_class(uint64_t index) const { return residual_[index]; }

    /// Canonical index of the phase-free letters of L_a * G_h.
    uint32_t element_index(uint8_t a, uint32_t h) const { return element_index_[a * num_syndromes() + h]; }
    /// Sign mu with L_a * G_h = mu * (phase-free letters).
    int element_sign(uint8_t a, uint32_t h) const { return element_sign_[a * num_syndromes() + h]; }
    /// (-1)^{<R_s, L_a>}.
    int logical_sign(Syndrome s, uint8_t a) const { return logical_sign_[s * 4 + a]; }

   private:
    StabilizerCode code_;
    DecoderTable decoder_;
    int n_ = 0, r_ = 0;
    std::vector<Syndrome> syndrome_;
    std::vector<uint8_t> residual_;
    std::vector<uint32_t> element_index_;
    std::vector<int8_t> element_sign_;
    std::vector<int8_t> logical_sign_;
};

using CodeTablesPtr = std::shared_ptr<const CodeTables>;

inline CodeTablesPtr make_tables(const StabilizerCode &code, const DecoderWeights &weights = {}) {
    return std::make_shared<const CodeTables>(code, build_decoder(code, weights));
}

}  // namespace qecest

#endif
