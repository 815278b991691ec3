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

#ifndef QECEST_ENGINE_HPP
#define QECEST_ENGINE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qecest/channels.hpp"
#include "qecest/decoder.hpp"

namespace qecest {

/// Noise on one code block: a channel per qubit, or one explicit joint Pauli distribution.
struct FactoredInput {
    std::vector<ChiMatrix1Q> per_qubit;
    std::optional<PauliDist> joint;

    static FactoredInput from_chi(std::vector<ChiMatrix1Q> chis) {
        FactoredInput in;
        in.per_qubit = std::move(chis);
        return in;
    }

    static FactoredInput iid(int n, const ChiMatrix1Q &chi) { return from_chi(std::vector<ChiMatrix1Q>(n, chi)); }

    static FactoredInput from_pauli(const PauliDist &dist) {
        FactoredInput in;
        if (dist.is_factored()) {
            for (const auto &f : dist.factors()) in.per_qubit.push_back(ChiMatrix1Q::from_pauli(f));
        } else {
            in.joint = dist;
        }
        return in;
    }

    int n() const { return joint ? joint->n() : static_cast<int>(per_qubit.size()); }

    bool is_pauli() const {
        if (joint) return true;
        for (const auto &c : per_qubit) {
            if (!c.is_pauli()) return false;
        }
        return true;
    }

    /// Per-qubit Pauli factors; only meaningful when is_pauli() and there is no joint form.
    std::vector<Prob4> pauli_factors() const {
        std::vector<Prob4> out;
        for (const auto &c : per_qubit) out.push_back(c.diagonal());
        return out;
    }

    /// Twirled counterpart: every chi replaced by its diagonal.
    FactoredInput twirled() const {
        if (joint) return *this;
        FactoredInput out;
        for (const auto &c : per_qubit) out.per_qubit.push_back(ChiMatrix1Q::from_pauli(pauli_twirl(c)));
        return out;
    }

    void validate() const {
        if (joint) {
            joint->validate();
            return;
        }
        for (size_t q = 0; q < per_qubit.size(); q++) {
            validate_chi(per_qubit[q].entries, "qubit " + std::to_string(q) + " channel");
        }
    }
};

/// Logical chi matrix conditioned on one syndrome, with that syndrome's probability.
struct ConditionalChannel {
    Mat4c logical_chi = Mat4c::Zero();
    double prob = 0.0;
    /// False when prob = 0 and the normalized channel does not exist.
    bool defined = false;
};

/// Syndrome x logical-class probabilities of Pauli noise on one block, laid out as [s * 4 + l].
///
/// The identity pattern is left out of the table and returned separately so that
/// small entries never get absorbed into a value close to one.
struct ClassTable {
    std::vector<double> table;
    double identity = 0.0;

    double prob(Syndrome s) const {
        double p = table[s * 4] + table[s * 4 + 1] + table[s * 4 + 2] + table[s * 4 + 3];
        return s == 0 ? p + identity : p;
    }
    double entry(Syndrome s, uint8_t l) const {
        return (s == 0 && l == 0) ? table[0] + identity : table[s * 4 + l];
    }
    /// Probability of a non-identity residual class jointly with syndrome s.
    double failure(Syndrome s) const { return table[s * 4 + 1] + table[s * 4 + 2] + table[s * 4 + 3]; }
};

/// Enumerates all 4^n patterns of a product distribution into a ClassTable.
inline ClassTable class_table(const CodeTables &t, const std::vector<Prob4> &factors) {
    const int n = t.n();
    if (static_cast<int>(factors.size()) != n) {
        throw UsageError("expected " + std::to_string(n) + " per-qubit distributions, got " +
                         std::to_string(factors.size()));
    }
    thread_local std::vector<double> cur, next;
    cur.assign(1, 1.0);
    for (int q = 0; q < n; q++) {
        next.resize(cur.size() * 4);
        const Prob4 &f = factors[q];
        for (size_t i = 0; i < cur.size(); i++) {
            double v = cur[i];
            next[i * 4] = v * f[0];
            next[i * 4 + 1] = v * f[1];
            next[i * 4 + 2] = v * f[2];
            next[i * 4 + 3] = v * f[3];
        }
        cur.swap(next);
    }
    ClassTable out;
    out.table.assign(static_cast<size_t>(t.num_syndromes()) * 4, 0.0);
    out.identity = cur[0];
    for (uint64_t idx = 1; idx < cur.size(); idx++) {
        out.table[t.syndrome(idx) * 4 + t.residual_class(idx)] += cur[idx];
    }
    return out;
}

/// ClassTable of an explicit joint distribution.
inline ClassTable class_table(const CodeTables &t, const PauliDist &dist) {
    if (dist.n() != t.n()) throw UsageError("distribution qubit count does not match the code");
    if (dist.is_factored()) return class_table(t, dist.factors());
    ClassTable out;
    out.table.assign(static_cast<size_t>(t.num_syndromes()) * 4, 0.0);
    out.identity = dist.prob(0);
    for (uint64_t idx = 1; idx < t.num_paulis(); idx++) {
        out.table[t.syndrome(idx) * 4 + t.residual_class(idx)] += dist.prob(idx);
    }
    return out;
}

inline ClassTable class_table(const CodeTables &t, const FactoredInput &in) {
    if (!in.is_pauli()) throw UsageError("class tables need Pauli noise");
    return in.joint ? class_table(t, *in.joint) : class_table(t, in.pauli_factors());
}

/// Tuning for the chi-pair kernel.
struct ChiPairOptions {
    /// Drop pairs whose running product magnitude falls below this.
    double prune = 1e-18;
    /// Run the full pair sum even for Pauli input.
    bool force_general = false;
};

namespace detail {

struct Member {
    uint64_t index;
    uint8_t cls;
    cplx phase;
};

/// All Paulis with syndrome s as (index, class, c) where R_s P = c L_l G_h.
inline std::vector<Member> syndrome_members(const CodeTables &t, Syndrome s) {
    const auto &code = t.code();
    const auto &rs = t.decoder().recoveries[s];
    static const cplx kPow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    std::vector<Member> out;
    out.reserve(4 * static_cast<size_t>(t.num_syndromes()));
    for (uint8_t l = 0; l < 4; l++) {
        PauliOperator rl = multiply(rs, code.logical_operator(l));
        for (uint32_t h = 0; h < t.num_syndromes(); h++) {
            PauliOperator full = multiply(rl, code.stabilizer_element(h));
            out.push_back({full.index(), l, kPow[(4 - full.phase_exp()) % 4]});
        }
    }
    return out;
}

inline void require_block_size(const CodeTables &t, const FactoredInput &in) {
    if (in.n() != t.n()) {
        throw UsageError("input has " + std::to_string(in.n()) + " qubits, code block has " + std::to_string(t.n()));
    }
}

/// Unnormalized logical chi for syndrome s via the pair sum over members.
inline Mat4c chi_pair_sum(const CodeTables &t, const FactoredInput &in, Syndrome s, const ChiPairOptions &opt) {
    const int n = t.n();
    std::vector<Member> members = syndrome_members(t, s);
    std::vector<uint8_t> digits(members.size() * n);
    for (size_t i = 0; i < members.size(); i++) {
        for (int q = 0; q < n; q++) digits[i * n + q] = index_digit(members[i].index, n, q);
    }
    Mat4c chi = Mat4c::Zero();
    for (size_t i = 0; i < members.size(); i++) {
        const uint8_t *pi = &digits[i * n];
        for (size_t j = i; j < members.size(); j++) {
            const uint8_t *pj = &digits[j * n];
            cplx prod(1.0, 0.0);
            int q = 0;
            for (; q < n; q++) {
                prod *= in.per_qubit[q].entries(pi[q], pj[q]);
                if (std::norm(prod) < opt.prune * opt.prune) break;
            }
            if (q < n) continue;
            cplx term = members[i].phase * std::conj(members[j].phase) * prod;
            chi(members[i].cls, members[j].cls) += term;
            if (j != i) chi(members[j].cls, members[i].cls) += std::conj(term);
        }
    }
    return chi;
}

inline ConditionalChannel normalize(const Mat4c &unnormalized) {
    ConditionalChannel out;
    out.prob = unnormalized.trace().real();
    if (out.prob > 0) {
        out.logical_chi = unnormalized / out.prob;
        out.defined = true;
    }
    return out;
}

}  // namespace detail

/// Logical channel and probability for syndrome s.
inline ConditionalChannel conditional_channel(const CodeTables &t, const FactoredInput &in, Syndrome s,
                                              const ChiPairOptions &opt = {}) {
    detail::require_block_size(t, in);
    if (s >= t.num_syndromes()) throw UsageError("syndrome index out of range");
    if (in.is_pauli() && !opt.force_general) {
        ClassTable ct = class_table(t, in);
        Mat4c chi = Mat4c::Zero();
        for (uint8_t l = 0; l < 4; l++) chi(l, l) = ct.entry(s, l);
        return detail::normalize(chi);
    }
    if (in.joint) throw UsageError("joint inputs must be Pauli distributions");
    return detail::normalize(detail::chi_pair_sum(t, in, s, opt));
}

/// Conditional channels for every syndrome.
inline std::vector<ConditionalChannel> all_conditional_channels(const CodeTables &t, const FactoredInput &in,
                                                                const ChiPairOptions &opt = {}) {
    detail::require_block_size(t, in);
    std::vector<ConditionalChannel> out(t.num_syndromes());
    if (in.is_pauli() && !opt.force_general) {
        ClassTable ct = class_table(t, in);
        for (Syndrome s = 0; s < t.num_syndromes(); s++) {
            Mat4c chi = Mat4c::Zero();
            for (uint8_t l = 0; l < 4; l++) chi(l, l) = ct.entry(s, l);
            out[s] = detail::normalize(chi);
        }
        return out;
    }
    if (in.joint) throw UsageError("joint inputs must be Pauli distributions");
    for (Syndrome s = 0; s < t.num_syndromes(); s++) out[s] = detail::normalize(detail::chi_pair_sum(t, in, s, opt));
    return out;
}

/// sum_s Pr(s) * chi_s.
inline Mat4c average_channel(const CodeTables &t, const FactoredInput &in, const ChiPairOptions &opt = {}) {
    Mat4c avg = Mat4c::Zero();
    for (const auto &c : all_conditional_channels(t, in, opt)) {
        if (c.defined) avg += c.prob * c.logical_chi;
    }
    return avg;
}

/// r = 1 - chi_00, as the non-identity diagonal mass over the trace.
inline double logical_infidelity(const Mat4c &chi) {
    if (std::abs(chi(0, 0).imag()) > kChannelTol) throw ValidationError("logical chi has complex chi_00");
    double rest = chi(1, 1).real() + chi(2, 2).real() + chi(3, 3).real();
    return rest / (chi(0, 0).real() + rest);
}

/// Total probability of the errors the decoder leaves with a non-identity logical class.
inline double exact_pu(const CodeTables &t, const PauliDist &dist) {
    ClassTable ct = class_table(t, dist);
    double fail = 0.0;
    for (Syndrome s = 0; s < t.num_syndromes(); s++) fail += ct.failure(s);
    return fail;
}

inline double exact_pu(const CodeTables &t, const FactoredInput &in) {
    if (!in.is_pauli()) throw UsageError("exact_pu needs Pauli noise");
    return exact_pu(t, in.joint ? *in.joint : PauliDist::factored(in.pauli_factors()));
}

/// Syndrome-resolved logical Pauli transfer matrices of one block, Lambda^s = [s == 0] I + delta^s,
/// unnormalized so that Pr(s) = Lambda^s_00.
///
/// Only deviations from the identity channel are accumulated, which keeps near-identity inputs
/// accurate far below machine epsilon of the O(1) entries.
struct BlockPtm {
    uint32_t num_syndromes = 0;
    bool full = true;
    /// delta^s_ab at [s * 16 + a * 4 + b]; only a == b entries are filled when !full.
    std::vector<double> delta;

    double prob(Syndrome s) const { return (s == 0 ? 1.0 : 0.0) + delta[s * 16]; }

    /// Normalized logical infidelity for syndrome s.
    double infidelity(Syndrome s) const {
        const double *d = &delta[s * 16];
        return (3 * d[0] - d[5] - d[10] - d[15]) / (4 * prob(s));
    }

    /// Normalized PTM minus identity for syndrome s.
    Mat4 deviation(Syndrome s) const {
        Mat4 d;
        for (int a = 0; a < 4; a++) {
            for (int b = 0; b < 4; b++) d(a, b) = delta[s * 16 + a * 4 + b];
        }
        double p = prob(s);
        if (s == 0) {
            d -= d(0, 0) * Mat4::Identity();
            return d / p;
        }
        return d / p - Mat4::Identity();
    }
};

/// Evaluates every syndrome of one block from per-qubit PTM deviations dev_j = T_j - I.
inline BlockPtm evaluate_block_ptm(const CodeTables &t, const std::vector<Mat4> &dev, bool full = true) {
    const int n = t.n();
    const uint32_t ns = t.num_syndromes();
    if (static_cast<int>(dev.size()) != n) throw UsageError("expected one PTM per qubit");
    // Letters of every normalizer element, row (a, h).
    thread_local std::vector<uint8_t> letters;
    letters.resize(static_cast<size_t>(4) * ns * n);
    for (uint8_t a = 0; a < 4; a++) {
        for (uint32_t h = 0; h < ns; h++) {
            uint32_t idx = t.element_index(a, h);
            for (int q = 0; q < n; q++) letters[(a * ns + h) * n + q] = index_digit(idx, n, q);
        }
    }
    std::vector<Mat4> tm(n);
    for (int q = 0; q < n; q++) tm[q] = Mat4::Identity() + dev[q];

    BlockPtm out;
    out.num_syndromes = ns;
    out.full = full;
    out.delta.assign(static_cast<size_t>(ns) * 16, 0.0);
    std::vector<double> f(ns);
    for (uint8_t a = 0; a < 4; a++) {
        for (uint8_t b = 0; b < 4; b++) {
            if (!full && a != b) continue;
            for (uint32_t h = 0; h < ns; h++) {
                const uint8_t *c = &letters[(a * ns + h) * n];
                double acc = 0.0;
                for (uint32_t g = 0; g < ns; g++) {
                    const uint8_t *p = &letters[(b * ns + g) * n];
                    int last = -1;
                    for (int q = n - 1; q >= 0; q--) {
                        if (c[q] != p[q]) {
                            last = q;
                            break;
                        }
                    }
                    double pre = 1.0, sum = 0.0;
                    for (int q = 0; q < n; q++) {
                        if (q >= last) sum += pre * dev[q](c[q], p[q]);
                        pre *= tm[q](c[q], p[q]);
                        if (pre == 0.0) break;
                    }
                    acc += t.element_sign(b, g) * sum;
                }
                f[h] = t.element_sign(a, h) * acc;
            }
            // Walsh-Hadamard transform over the stabilizer mask.
            for (uint32_t len = 1; len < ns; len <<= 1) {
                for (uint32_t i = 0; i < ns; i += len << 1) {
                    for (uint32_t j = i; j < i + len; j++) {
                        double u = f[j], v = f[j + len];
                        f[j] = u + v;
                        f[j + len] = u - v;
                    }
                }
            }
            for (Syndrome s = 0; s < ns; s++) {
                out.delta[s * 16 + a * 4 + b] = t.logical_sign(s, a) * f[s] / ns;
            }
        }
    }
    return out;
}

/// PTM deviations of a list of single-qubit channels.
inline std::vector<Mat4> ptm_deviations(const std::vector<ChiMatrix1Q> &chis) {
    std::vector<Mat4> out;
    for (const auto &c : chis) {
        Mat4c d = c.entries;
        d(0, 0) -= 1.0;
        out.push_back(ptm_from_chi(d));
    }
    return out;
}

/// Diagonal PTM deviation of a Pauli channel: T_aa - 1 = -2 * (mass anticommuting with a).
inline Mat4 pauli_deviation(const Prob4 &p) {
    Mat4 d = Mat4::Zero();
    d(1, 1) = -2 * (p[2] + p[3]);
    d(2, 2) = -2 * (p[1] + p[3]);
    d(3, 3) = -2 * (p[1] + p[2]);
    return d;
}

}  // namespace qecest

#endif
