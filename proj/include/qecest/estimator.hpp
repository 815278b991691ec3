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

#ifndef QECEST_ESTIMATOR_HPP
#define QECEST_ESTIMATOR_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qecest/engine.hpp"

namespace qecest {

/// Distribution over the residual logical class (I, X, Y, Z) a block leaves behind.
struct ResidualDist {
    Prob4 probs{1.0, 0.0, 0.0, 0.0};

    double identity() const { return probs[0]; }
    /// Non-identity mass, summed directly.
    double failure() const { return probs[1] + probs[2] + probs[3]; }
};

/// Level-L concatenation of k = 1 codes, level 1 first.
struct ConcatSpec {
    std::vector<CodeTablesPtr> per_level;

    static ConcatSpec uniform(const CodeTablesPtr &tables, int levels) {
        if (levels < 1) throw UsageError("levels must be at least 1");
        return {std::vector<CodeTablesPtr>(levels, tables)};
    }

    int levels() const { return static_cast<int>(per_level.size()); }

    void validate() const {
        if (per_level.empty()) throw UsageError("concatenation needs at least one level");
        for (const auto &t : per_level) {
            if (!t) throw UsageError("missing code tables");
            if (t->code().k() != 1) throw UsageError("concatenated codes must have k = 1");
        }
    }

    /// Number of level-1 blocks under the top block.
    uint64_t level1_blocks() const {
        uint64_t b = 1;
        for (int l = 1; l < levels(); l++) b *= per_level[l]->n();
        return b;
    }
};

/// Residual distribution of one block under explicit (or factored) physical Pauli noise.
inline ResidualDist residual_dist_level1(const CodeTables &t, const PauliDist &dist) {
    require_enumerable(t.code());
    ClassTable ct = class_table(t, dist);
    ResidualDist out{{ct.identity, 0, 0, 0}};
    for (Syndrome s = 0; s < t.num_syndromes(); s++) {
        for (uint8_t l = 0; l < 4; l++) out.probs[l] += ct.table[s * 4 + l];
    }
    return out;
}

inline std::vector<Prob4> residual_factors(const CodeTables &t, const std::vector<ResidualDist> &blocks) {
    if (static_cast<int>(blocks.size()) != t.n()) {
        throw UsageError("expected " + std::to_string(t.n()) + " block distributions, got " +
                         std::to_string(blocks.size()));
    }
    std::vector<Prob4> f;
    for (const auto &b : blocks) f.push_back(b.probs);
    return f;
}

/// Residual distribution of a block whose qubits are lower-level blocks with the given residuals.
inline ResidualDist residual_dist_recurse(const CodeTables &t, const std::vector<ResidualDist> &blocks) {
    return residual_dist_level1(t, PauliDist::factored(residual_factors(t, blocks)));
}

/// Probability mass of the non-identity patterns the decoder still maps to the logical identity.
inline double gamma_tilde(const CodeTables &t, const std::vector<ResidualDist> &blocks) {
    ClassTable ct = class_table(t, residual_factors(t, blocks));
    double g = 0;
    for (Syndrome s = 0; s < t.num_syndromes(); s++) g += ct.table[s * 4];
    return g;
}

/// Product of the lower-level correctable probabilities.
inline double lambda_tilde(const std::vector<double> &block_pc) {
    double out = 1.0;
    for (double p : block_pc) {
        if (p < 0.0 || p > 1.0) throw UsageError("block correctable probability outside [0, 1]");
        out *= p;
    }
    return out;
}

/// Approximation bound n^{l+1} r0^{2 + floor((d+1)/2)}.
inline double accuracy_bound(int n, int d, int level, double r0) {
    if (!(r0 > 0.0 && r0 < 1.0)) throw UsageError("r0 must be in (0, 1)");
    return std::pow(static_cast<double>(n), level + 1) * std::pow(r0, 2 + (d + 1) / 2);
}

struct LevelEstimate {
    double lambda = 0.0;
    double gamma = 0.0;
    /// Lambda + Gamma, the identity entry of the level's residual distribution.
    double p_c = 1.0;
    ResidualDist residual;
};

struct EstimateReport {
    double p_u_tilde = 0.0;
    std::vector<LevelEstimate> per_level;
    double bound = 0.0;
    double seconds = 0.0;
};

/// Logical estimator p_u tilde for a concatenated code.
///
/// `physical` holds one distribution per level-1 block (or a single one reused for all).
/// Per-level diagnostics describe the first block of each level.
inline EstimateReport logical_estimator(const ConcatSpec &spec, const std::vector<PauliDist> &physical) {
    auto start = std::chrono::steady_clock::now();
    spec.validate();
    const uint64_t blocks = spec.level1_blocks();
    if (physical.size() != 1 && physical.size() != blocks) {
        throw UsageError("expected 1 or " + std::to_string(blocks) + " physical distributions");
    }
    EstimateReport report;
    const CodeTables &t1 = *spec.per_level[0];
    std::vector<ResidualDist> level;
    for (const auto &d : physical) {
        if (d.n() != t1.n()) throw UsageError("physical distribution does not match the level-1 block size");
        d.validate(1e-9);
        level.push_back(residual_dist_level1(t1, d));
    }
    {
        LevelEstimate le;
        le.residual = level[0];
        le.lambda = physical[0].prob(0);
        le.p_c = level[0].identity();
        le.gamma = level[0].identity() - le.lambda;
        report.per_level.push_back(le);
    }
    for (int l = 1; l < spec.levels(); l++) {
        const CodeTables &t = *spec.per_level[l];
        const size_t n = static_cast<size_t>(t.n());
        std::vector<ResidualDist> next;
        size_t groups = level.size() == 1 ? 1 : level.size() / n;
        for (size_t gidx = 0; gidx < groups; gidx++) {
            std::vector<ResidualDist> children;
            for (size_t j = 0; j < n; j++) children.push_back(level.size() == 1 ? level[0] : level[gidx * n + j]);
            std::vector<Prob4> f = residual_factors(t, children);
            ClassTable ct = class_table(t, f);
            ResidualDist rd{{ct.identity, 0, 0, 0}};
            double gamma = 0;
            for (Syndrome s = 0; s < t.num_syndromes(); s++) {
                for (uint8_t c = 0; c < 4; c++) rd.probs[c] += ct.table[s * 4 + c];
                gamma += ct.table[s * 4];
            }
            if (gidx == 0) {
                LevelEstimate le;
                std::vector<double> pcs;
                for (const auto &c : children) pcs.push_back(c.identity());
                le.lambda = lambda_tilde(pcs);
                le.gamma = gamma;
                le.p_c = rd.identity();
                le.residual = rd;
                report.per_level.push_back(le);
            }
            next.push_back(rd);
        }
        level.swap(next);
    }
    report.p_u_tilde = level[0].failure();
    const auto &top = *spec.per_level.back();
    double r = physical[0].infidelity();
    double r0 = -std::expm1(std::log1p(-std::min(r, 1.0 - 1e-16)) / t1.n());
    report.bound = r0 > 0 ? accuracy_bound(top.n(), top.code().d(), spec.levels(), r0) : 0.0;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

inline nlohmann::json to_json(const EstimateReport &r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto &l : r.per_level) {
        levels.push_back({{"lambda_tilde", l.lambda},
                          {"gamma_tilde", l.gamma},
                          {"p_c_tilde", l.p_c},
                          {"residual", {l.residual.probs[0], l.residual.probs[1], l.residual.probs[2], l.residual.probs[3]}}});
    }
    return {{"p_u_tilde", r.p_u_tilde}, {"per_level", levels}, {"bound", r.bound}, {"seconds", r.seconds}};
}

/// Leading Pauli error rates from noise reconstruction.
struct NRDataset {
    int n = 0;
    double infidelity = 0.0;
    std::vector<std::pair<uint64_t, double>> entries;

    void validate() const {
        if (n < 1 || n > kMaxEnumeratedQubits) throw ValidationError("NR dataset qubit count out of range");
        if (!(infidelity >= 0.0 && infidelity <= 1.0)) throw ValidationError("NR infidelity outside [0, 1]");
        std::set<uint64_t> seen;
        double sum = 0;
        for (const auto &[idx, p] : entries) {
            if (idx >= pauli_count(n)) throw ValidationError("NR entry index out of range");
            if (!seen.insert(idx).second) throw ValidationError("duplicate NR entry " + PauliOperator::from_index(n, idx).letters());
            if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("NR probability outside [0, 1]");
            sum += p;
        }
        if (sum > 1.0 + 1e-12) throw ValidationError("NR probabilities sum above 1");
    }
};

/// The K largest entries of a distribution (ties by canonical index), with its infidelity.
inline NRDataset top_k(const PauliDist &dist, size_t k) {
    std::vector<double> v = dist.explicit_vector();
    std::vector<uint64_t> order(v.size());
    for (uint64_t i = 0; i < v.size(); i++) order[i] = i;
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end(),
                      [&](uint64_t a, uint64_t b) { return v[a] != v[b] ? v[a] > v[b] : a < b; });
    NRDataset d;
    d.n = dist.n();
    d.infidelity = dist.infidelity();
    for (size_t i = 0; i < k; i++) d.entries.push_back({order[i], v[order[i]]});
    return d;
}

/// Fills absent entries with (1-r0)^{n-w} (r0/3)^w, r0 = 1 - (1-r)^{1/n}, and rescales them
/// by one common factor so the result sums to one.
inline PauliDist extrapolate_nr(const NRDataset &data) {
    data.validate();
    const int n = data.n;
    const uint64_t total = pauli_count(n);
    double r0 = -std::expm1(std::log1p(-data.infidelity) / n);
    std::vector<double> v(total, 0.0);
    std::vector<char> present(total, 0);
    double measured = 0;
    for (const auto &[idx, p] : data.entries) {
        v[idx] = p;
        present[idx] = 1;
        measured += p;
    }
    if (data.entries.size() == total) return PauliDist::explicit_probs(n, v);
    double absent = 0;
    for (uint64_t idx = 0; idx < total; idx++) {
        if (present[idx]) continue;
        int w = index_weight(idx);
        v[idx] = std::pow(1.0 - r0, n - w) * std::pow(r0 / 3.0, w);
        absent += v[idx];
    }
    double room = 1.0 - measured;
    if (room < -1e-12) throw ValidationError("NR top-K mass exceeds 1; cannot rescale");
    room = std::max(room, 0.0);
    if (absent <= 0) throw ValidationError("NR extrapolation has no absent mass to rescale");
    double scale = room / absent;
    for (uint64_t idx = 0; idx < total; idx++) {
        if (!present[idx]) v[idx] *= scale;
    }
    return PauliDist::explicit_probs(n, std::move(v));
}

/// Writes "n=..,infidelity=..,K=.." then "PAULI,prob" rows.
inline void write_nr_csv(std::ostream &out, const NRDataset &d) {
    out << "n=" << d.n << ",infidelity=" << std::setprecision(17) << d.infidelity << ",K=" << d.entries.size() << "\n";
    for (const auto &[idx, p] : d.entries) {
        out << PauliOperator::from_index(d.n, idx).letters() << "," << std::setprecision(17) << p << "\n";
    }
}

inline NRDataset read_nr_csv(std::istream &in) {
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("NR file is empty");
    NRDataset d;
    long k = -1;
    {
        std::stringstream hs(header);
        std::string field;
        while (std::getline(hs, field, ',')) {
            auto eq = field.find('=');
            if (eq == std::string::npos) throw ValidationError("bad NR header field '" + field + "'");
            std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            try {
                if (key == "n") d.n = std::stoi(val);
                else if (key == "infidelity") d.infidelity = std::stod(val);
                else if (key == "K") k = std::stol(val);
                else throw ValidationError("unknown NR header key '" + key + "'");
            } catch (const std::logic_error &) {
                throw ValidationError("bad NR header value '" + field + "'");
            }
        }
    }
    if (d.n < 1 || k < 0) throw ValidationError("NR header must define n and K");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("bad NR row '" + line + "'");
        PauliOperator p(1);
        try {
            p = PauliOperator::from_string(line.substr(0, comma));
        } catch (const UsageError &e) {
            throw ValidationError(std::string("bad NR Pauli: ") + e.what());
        }
        if (p.num_qubits() != d.n || p.phase_exp() != 0) throw ValidationError("NR row has wrong Pauli: " + line);
        double prob;
        try {
            prob = std::stod(line.substr(comma + 1));
        } catch (const std::logic_error &) {
            throw ValidationError("bad NR probability in '" + line + "'");
        }
        d.entries.push_back({p.index(), prob});
    }
    if (static_cast<long>(d.entries.size()) != k) throw ValidationError("NR header K does not match row count");
    d.validate();
    return d;
}

}  // namespace qecest

#endif
