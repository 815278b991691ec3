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

#ifndef QECEST_CHANNELS_HPP
#define QECEST_CHANNELS_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qecest/errors.hpp"
#include "qecest/pauli.hpp"
#include "qecest/rng.hpp"

namespace qecest {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Mat4 = Eigen::Matrix4d;
using Prob4 = std::array<double, 4>;

inline constexpr double kChannelTol = 1e-10;
inline constexpr double kDistTol = 1e-12;

/// Single-qubit Pauli matrices in canonical order I, X, Y, Z.
inline const std::array<Mat2c, 4> &pauli_matrices() {
    static const std::array<Mat2c, 4> mats = [] {
        std::array<Mat2c, 4> m;
        const cplx i(0, 1);
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, -i, i, 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    return mats;
}

/// Single-qubit channel rho -> sum_ab chi_ab sigma_a rho sigma_b.
struct ChiMatrix1Q {
    Mat4c entries = Mat4c::Zero();

    static ChiMatrix1Q identity() {
        ChiMatrix1Q c;
        c.entries(0, 0) = 1.0;
        return c;
    }

    static ChiMatrix1Q from_kraus(const std::vector<Mat2c> &kraus) {
        const auto &sig = pauli_matrices();
        ChiMatrix1Q c;
        for (const auto &k : kraus) {
            Eigen::Vector4cd coef;
            for (int a = 0; a < 4; a++) coef(a) = (sig[a] * k).trace() / 2.0;
            c.entries += coef * coef.adjoint();
        }
        return c;
    }

    static ChiMatrix1Q from_unitary(const Mat2c &u) { return from_kraus({u}); }

    static ChiMatrix1Q from_pauli(const Prob4 &p) {
        ChiMatrix1Q c;
        for (int a = 0; a < 4; a++) c.entries(a, a) = p[a];
        return c;
    }

    Prob4 diagonal() const {
        return {entries(0, 0).real(), entries(1, 1).real(), entries(2, 2).real(), entries(3, 3).real()};
    }

    bool is_pauli(double tol = 1e-14) const {
        for (int a = 0; a < 4; a++) {
            for (int b = 0; b < 4; b++) {
                if (a != b && std::abs(entries(a, b)) > tol) return false;
            }
        }
        return true;
    }

    Mat2c apply(const Mat2c &rho) const {
        const auto &sig = pauli_matrices();
        Mat2c out = Mat2c::Zero();
        for (int a = 0; a < 4; a++) {
            for (int b = 0; b < 4; b++) {
                if (entries(a, b) != cplx(0)) out += entries(a, b) * sig[a] * rho * sig[b];
            }
        }
        return out;
    }
};

/// Why a chi matrix fails validation, or empty when it passes.
inline std::string chi_violation(const Mat4c &chi, double tol = kChannelTol) {
    if (!chi.allFinite()) return "non-finite entry";
    double herm = (chi - chi.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) return "not Hermitian (deviation " + std::to_string(herm) + ")";
    double tr_im = std::abs(chi.trace().imag());
    double tr = chi.trace().real();
    if (std::abs(tr - 1.0) > tol || tr_im > tol) return "trace " + std::to_string(tr) + " differs from 1";
    Eigen::SelfAdjointEigenSolver<Mat4c> es(0.5 * (chi + chi.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
        return "not positive semidefinite (eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) + ")";
    }
    return {};
}

inline bool is_valid_chi(const Mat4c &chi, double tol = kChannelTol) { return chi_violation(chi, tol).empty(); }

inline void validate_chi(const Mat4c &chi, const std::string &what = "channel", double tol = kChannelTol) {
    std::string why = chi_violation(chi, tol);
    if (!why.empty()) throw ValidationError(what + ": " + why);
}

/// Trace preservation sum_ab chi_ab sigma_b sigma_a = I, within tol.
inline bool is_trace_preserving(const Mat4c &chi, double tol = kChannelTol) {
    const auto &sig = pauli_matrices();
    Mat2c sum = Mat2c::Zero();
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) sum += chi(a, b) * sig[b] * sig[a];
    }
    return (sum - Mat2c::Identity()).cwiseAbs().maxCoeff() <= tol;
}

/// Non-identity mass of a probability 4-vector.
inline double nonidentity_mass(const Prob4 &p) { return p[1] + p[2] + p[3]; }

/// r = 1 - chi_00, evaluated as the normalized non-identity diagonal mass.
inline double infidelity(const ChiMatrix1Q &c) {
    double rest = c.entries(1, 1).real() + c.entries(2, 2).real() + c.entries(3, 3).real();
    return rest / (c.entries(0, 0).real() + rest);
}

/// Diagonal of the chi matrix as a Pauli error distribution.
inline Prob4 pauli_twirl(const ChiMatrix1Q &c) {
    Prob4 p = c.diagonal();
    double sum = 0;
    for (double v : p) {
        if (v < -kChannelTol) throw ValidationError("twirled channel has a negative Pauli probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kChannelTol) throw ValidationError("twirled channel is not normalized");
    for (double &v : p) v = std::max(v, 0.0);
    return p;
}

/// Pauli transfer matrix T_ab = tr(sigma_a E(sigma_b)) / 2, real part.
inline Mat4 ptm_from_chi(const Mat4c &chi) {
    const auto &sig = pauli_matrices();
    ChiMatrix1Q c{chi};
    Mat4 t;
    for (int b = 0; b < 4; b++) {
        Mat2c out = c.apply(sig[b]);
        for (int a = 0; a < 4; a++) t(a, b) = ((sig[a] * out).trace() / 2.0).real();
    }
    return t;
}

namespace detail {
/// Linear map vec(chi) -> vec(PTM) as a 16x16 complex matrix, and its inverse.
inline const Eigen::Matrix<cplx, 16, 16> &ptm_inverse_map() {
    static const Eigen::Matrix<cplx, 16, 16> inv = [] {
        const auto &sig = pauli_matrices();
        Eigen::Matrix<cplx, 16, 16> m;
        for (int c = 0; c < 4; c++) {
            for (int d = 0; d < 4; d++) {
                for (int a = 0; a < 4; a++) {
                    for (int b = 0; b < 4; b++) {
                        m(a * 4 + b, c * 4 + d) = (sig[a] * sig[c] * sig[b] * sig[d]).trace() / 2.0;
                    }
                }
            }
        }
        return Eigen::Matrix<cplx, 16, 16>(m.inverse());
    }();
    return inv;
}
}  // namespace detail

/// Chi matrix of the channel with Pauli transfer matrix `t`.
inline Mat4c chi_from_ptm(const Mat4 &t) {
    Eigen::Matrix<cplx, 16, 1> v;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) v(a * 4 + b) = t(a, b);
    }
    Eigen::Matrix<cplx, 16, 1> chi = detail::ptm_inverse_map() * v;
    Mat4c out;
    for (int c = 0; c < 4; c++) {
        for (int d = 0; d < 4; d++) out(c, d) = chi(c * 4 + d);
    }
    return 0.5 * (out + out.adjoint());
}

/// Pauli error distribution on n qubits, either a product of per-qubit 4-vectors or
/// an explicit vector over all 4^n canonical indices.
class PauliDist {
   public:
    PauliDist() = default;

    static PauliDist factored(std::vector<Prob4> per_qubit) {
        PauliDist d;
        d.n_ = static_cast<int>(per_qubit.size());
        d.factors_ = std::move(per_qubit);
        d.is_factored_ = true;
        return d;
    }

    static PauliDist single(const Prob4 &p) { return factored({p}); }

    static PauliDist explicit_probs(int n, std::vector<double> probs) {
        if (n < 1 || n > 12) throw CapacityError("explicit Pauli distributions support 1..12 qubits");
        if (probs.size() != pauli_count(n)) {
            throw UsageError("explicit distribution needs 4^" + std::to_string(n) + " entries");
        }
        PauliDist d;
        d.n_ = n;
        d.probs_ = std::move(probs);
        d.is_factored_ = false;
        return d;
    }

    int n() const { return n_; }
    bool is_factored() const { return is_factored_; }
    const std::vector<Prob4> &factors() const { return factors_; }

    double prob(uint64_t index) const {
        if (!is_factored_) return probs_[index];
        double p = 1.0;
        for (int q = 0; q < n_; q++) p *= factors_[q][index_digit(index, n_, q)];
        return p;
    }

    /// All 4^n probabilities in canonical order.
    std::vector<double> explicit_vector() const {
        if (!is_factored_) return probs_;
        if (n_ > 12) throw CapacityError("cannot expand a distribution over more than 12 qubits");
        std::vector<double> out(1, 1.0);
        for (int q = 0; q < n_; q++) {
            std::vector<double> next(out.size() * 4);
            for (size_t i = 0; i < out.size(); i++) {
                for (int d = 0; d < 4; d++) next[i * 4 + d] = out[i] * factors_[q][d];
            }
            out.swap(next);
        }
        return out;
    }

    PauliDist to_explicit() const { return is_factored_ ? explicit_probs(n_, explicit_vector()) : *this; }

    /// Probability of some non-identity error.
    double infidelity() const {
        if (!is_factored_) {
            double s = 0;
            for (size_t i = 1; i < probs_.size(); i++) s += probs_[i];
            return s;
        }
        double any = 0.0;
        for (const auto &f : factors_) {
            double m = nonidentity_mass(f);
            any = any + m - any * m;
        }
        return any;
    }

    /// Throws ValidationError when entries are negative or do not sum to one.
    void validate(double tol = kDistTol) const {
        auto check = [&](const double *p, size_t len, const std::string &what) {
            double sum = 0;
            for (size_t i = 0; i < len; i++) {
                if (!(p[i] >= 0.0)) throw ValidationError(what + ": negative or non-finite probability");
                sum += p[i];
            }
            if (std::abs(sum - 1.0) > tol) {
                throw ValidationError(what + ": probabilities sum to " + std::to_string(sum));
            }
        };
        if (is_factored_) {
            for (int q = 0; q < n_; q++) check(factors_[q].data(), 4, "qubit " + std::to_string(q));
        } else {
            check(probs_.data(), probs_.size(), "Pauli distribution");
        }
    }

   private:
    int n_ = 0;
    bool is_factored_ = true;
    std::vector<Prob4> factors_;
    std::vector<double> probs_;
};

inline double infidelity(const PauliDist &d) { return d.infidelity(); }

/// Twirling a Pauli distribution is the identity.
inline const PauliDist &pauli_twirl(const PauliDist &d) { return d; }

/// Per-qubit (1-p, p/3, p/3, p/3) on n qubits.
inline PauliDist depolarizing(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("depolarizing rate must be in [0, 1]");
    return PauliDist::factored(std::vector<Prob4>(n, Prob4{1.0 - p, p / 3, p / 3, p / 3}));
}

inline Prob4 depolarizing_1q(double p) { return {1.0 - p, p / 3, p / 3, p / 3}; }

/// Channel from an 8x8 Stinespring unitary exp(-iHt) on qubit (x) 4-level environment in |0>.
///
/// H = (A + A^dagger)/2 with A having independent N(0,1) real and imaginary parts, so the
/// diagonal of H is real N(0,1) and each off-diagonal entry has unit complex variance.
inline ChiMatrix1Q random_cptp(double t, uint64_t seed) {
    if (t < 0.001 || t > 0.1) {
        std::cerr << "warning: random_cptp t=" << t << " outside [0.001, 0.1]\n";
    }
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix<cplx, 8, 8> a;
    for (int i = 0; i < 8; i++) {
        for (int j = 0; j < 8; j++) {
            double re = normal(rng);
            double im = normal(rng);
            a(i, j) = cplx(re, im);
        }
    }
    Eigen::Matrix<cplx, 8, 8> h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, 8, 8>> es(h);
    Eigen::Matrix<cplx, 8, 1> phases;
    for (int i = 0; i < 8; i++) phases(i) = std::exp(cplx(0, -es.eigenvalues()(i) * t));
    Eigen::Matrix<cplx, 8, 8> u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    std::vector<Mat2c> kraus(4);
    for (int e = 0; e < 4; e++) {
        for (int i = 0; i < 2; i++) {
            for (int j = 0; j < 2; j++) kraus[e](i, j) = u(i * 4 + e, j * 4);
        }
    }
    ChiMatrix1Q c = ChiMatrix1Q::from_kraus(kraus);
    c.entries = 0.5 * (c.entries + c.entries.adjoint());
    return c;
}

/// Unitary exp(-i (pi/2) delta n.sigma).
inline Mat2c rotation_unitary(const std::array<double, 3> &axis, double delta) {
    double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(norm - 1.0) > 1e-9) throw UsageError("rotation axis must be a unit vector");
    const auto &sig = pauli_matrices();
    double half = std::numbers::pi * delta / 2;
    Mat2c u = std::cos(half) * sig[0];
    for (int k = 0; k < 3; k++) u -= cplx(0, std::sin(half) * axis[k]) * sig[k + 1];
    return u;
}

inline ChiMatrix1Q coherent_channel(const std::array<double, 3> &axis, double delta) {
    return ChiMatrix1Q::from_unitary(rotation_unitary(axis, delta));
}

/// Uniformly random unit vector.
inline std::array<double, 3> random_axis(Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, 3> v;
    double norm = 0;
    do {
        for (double &x : v) x = normal(rng);
        norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    } while (norm < 1e-12);
    for (double &x : v) x /= norm;
    return v;
}

/// Mixture q * (i.i.d.) + (1-q) * (Gaussian weights on `subset`), then rescaled so the
/// identity probability is exactly 1 - r0.
///
/// The i.i.d. part uses per-qubit rate 1 - (1-r0)^{1/n}, so its own identity probability
/// is already 1 - r0 and q = 1 returns the product distribution unchanged.
inline PauliDist correlated_pauli(int n, double r0, double q, const std::vector<uint64_t> &subset, uint64_t seed) {
    if (!(q >= 0.0 && q <= 1.0)) throw UsageError("mixing weight q must be in [0, 1]");
    if (!(r0 > 0.0 && r0 < 1.0)) throw UsageError("r0 must be in (0, 1)");
    if (subset.empty() && q < 1.0) throw UsageError("empty subset requires q = 1");
    const uint64_t total = pauli_count(n);
    for (uint64_t idx : subset) {
        if (idx == 0 || idx >= total) throw UsageError("subset entries must be non-identity Pauli indices");
    }
    double r_qubit = -std::expm1(std::log1p(-r0) / n);
    std::vector<double> probs = depolarizing(n, r_qubit).explicit_vector();
    for (double &v : probs) v *= q;
    if (q < 1.0) {
        Rng rng(seed);
        double mean = static_cast<double>(total) * r0;
        std::normal_distribution<double> normal(mean, std::sqrt(mean));
        std::vector<double> w(subset.size());
        double sum = 0;
        for (double &x : w) {
            x = std::max(0.0, normal(rng));
            sum += x;
        }
        for (size_t i = 0; i < subset.size(); i++) {
            double wi = sum > 0 ? w[i] / sum : 1.0 / static_cast<double>(subset.size());
            probs[subset[i]] += (1.0 - q) * wi;
        }
    }
    double rest = 0;
    for (uint64_t i = 1; i < total; i++) rest += probs[i];
    if (rest <= 0) throw ValidationError("correlated model has no error mass to normalize");
    double scale = r0 / rest;
    probs[0] = 1.0 - r0;
    for (uint64_t i = 1; i < total; i++) probs[i] *= scale;
    return PauliDist::explicit_probs(n, std::move(probs));
}

/// Twirl of rho -> p_I rho + sum_Q p_Q e^{-i theta Q} rho e^{i theta Q} with p_Z = eta p_X
/// and p_Y = p_X p_Z.
inline Prob4 biased_model(double p_x, double eta, double theta = std::numbers::pi / 2) {
    if (!(eta > 0)) throw UsageError("bias eta must be positive");
    if (p_x < 0) throw UsageError("p_X must be nonnegative");
    double p_z = eta * p_x;
    double p_y = p_x * p_z;
    double p_i = 1.0 - p_x - p_y - p_z;
    if (p_i < 0) throw UsageError("biased model has negative identity probability");
    double c2 = std::cos(theta) * std::cos(theta);
    double s2 = std::sin(theta) * std::sin(theta);
    Prob4 out{p_i + c2 * (p_x + p_y + p_z), s2 * p_x, s2 * p_y, s2 * p_z};
    double sum = out[0] + out[1] + out[2] + out[3];
    for (double &v : out) v /= sum;
    return out;
}

/// p_X such that the biased model with bias eta has non-identity mass r.
inline double biased_px_for_infidelity(double r, double eta) {
    // eta p^2 + (1 + eta) p - r = 0
    double b = 1.0 + eta;
    return 2.0 * r / (b + std::sqrt(b * b + 4.0 * eta * r));
}

namespace detail {
inline Mat4c on_first_qubit(const Mat2c &a) {
    Mat4c out = Mat4c::Zero();
    out.topLeftCorner<2, 2>() = a(0, 0) * Mat2c::Identity();
    out.topRightCorner<2, 2>() = a(0, 1) * Mat2c::Identity();
    out.bottomLeftCorner<2, 2>() = a(1, 0) * Mat2c::Identity();
    out.bottomRightCorner<2, 2>() = a(1, 1) * Mat2c::Identity();
    return out;
}

inline double trace_norm(const Mat4c &m) {
    Eigen::SelfAdjointEigenSolver<Mat4c> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

/// || (E (x) I)(psi psi^dagger) - psi psi^dagger ||_1 for a two-qubit pure state.
inline double extended_distance(const ChiMatrix1Q &c, const Eigen::Vector4cd &psi_in) {
    Eigen::Vector4cd psi = psi_in.normalized();
    Mat4c rho = psi * psi.adjoint();
    const auto &sig = pauli_matrices();
    Mat4c out = Mat4c::Zero();
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            if (c.entries(a, b) == cplx(0)) continue;
            out += c.entries(a, b) * on_first_qubit(sig[a]) * rho * on_first_qubit(sig[b]);
        }
    }
    return trace_norm(out - rho);
}
}  // namespace detail

/// Lower bound on the diamond distance ||E - I|| from multi-start hill climbing over pure
/// two-qubit inputs. The maximally entangled input is always evaluated.
inline double diamond_distance_est(const ChiMatrix1Q &c, int restarts = 8, uint64_t seed = 0) {
    Eigen::Vector4cd bell(1, 0, 0, 1);
    double best = detail::extended_distance(c, bell);
    for (int rs = 0; rs < restarts; rs++) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(rs)));
        std::normal_distribution<double> normal(0.0, 1.0);
        auto random_state = [&](double scale, const Eigen::Vector4cd &base) {
            Eigen::Vector4cd v = base;
            for (int i = 0; i < 4; i++) v(i) += scale * cplx(normal(rng), normal(rng));
            return Eigen::Vector4cd(v.normalized());
        };
        Eigen::Vector4cd cur = random_state(1.0, Eigen::Vector4cd::Zero());
        double val = detail::extended_distance(c, cur);
        double step = 0.5;
        for (int it = 0; it < 300 && step > 1e-6; it++) {
            Eigen::Vector4cd cand = random_state(step, cur);
            double cv = detail::extended_distance(c, cand);
            if (cv > val) {
                cur = cand;
                val = cv;
            } else {
                step *= 0.93;
            }
        }
        best = std::max(best, val);
    }
    return best;
}

}  // namespace qecest

#endif
