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

#ifndef QECEST_SAMPLER_HPP
#define QECEST_SAMPLER_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "qecest/estimator.hpp"
#include "qecest/rng.hpp"

namespace qecest {

enum class SamplingMode { direct, importance };

inline std::string mode_name(SamplingMode m) { return m == SamplingMode::direct ? "direct" : "importance"; }

inline SamplingMode parse_mode(const std::string &s) {
    if (s == "direct") return SamplingMode::direct;
    if (s == "importance") return SamplingMode::importance;
    throw UsageError("unknown sampling mode '" + s + "' (expected direct or importance)");
}

struct ImportanceConfig {
    double lambda0 = 0.5;
    double k_search_tolerance = 1e-9;
    int64_t max_samples = 10000;
    uint64_t seed = 1;
    SamplingMode mode = SamplingMode::importance;
    int threads = 1;
    /// Memoized block evaluations kept per thread before the cache is dropped.
    size_t cache_limit = 4096;
    /// Replace the top-level syndrome draw by its exact average given the sampled lower levels.
    bool average_top = false;

    void validate() const {
        if (!(lambda0 > 0 && lambda0 < 1)) throw UsageError("lambda0 must lie in (0, 1)");
        if (!(k_search_tolerance > 0)) throw UsageError("k search tolerance must be positive");
        if (max_samples < 1) throw UsageError("need at least one sample");
        if (threads < 1) throw UsageError("thread count must be positive");
    }
};

/// Q = p^(1/k) / Z. Zero entries stay zero.
inline std::vector<double> tilt(const std::vector<double> &p, double k) {
    if (!(k > 0) || !std::isfinite(k)) throw UsageError("tilt exponent k must be positive");
    double mx = 0.0;
    for (double v : p) {
        if (v < 0) throw UsageError("tilt needs nonnegative weights");
        mx = std::max(mx, v);
    }
    if (mx == 0.0) throw UsageError("tilt of an all-zero vector");
    const double lmx = std::log(mx);
    std::vector<double> q(p.size(), 0.0);
    double z = 0.0;
    for (size_t i = 0; i < p.size(); i++) {
        if (p[i] > 0) {
            q[i] = std::exp((std::log(p[i]) - lmx) / k);
            z += q[i];
        }
    }
    for (double &v : q) v /= z;
    return q;
}

struct KChoice {
    double k = 1.0;
    /// No k reaches lambda0; the untilted distribution is used.
    bool unattainable = false;
};

/// Smallest k >= 1 whose tilt puts at least lambda0 on the nontrivial entries p[1..].
///
/// Bisection runs on the exponent e = 1/k in (0, 1]; the nontrivial mass falls as e grows.
inline KChoice choose_k(const std::vector<double> &p, double lambda0, double tol = 1e-9) {
    if (p.empty()) throw UsageError("choose_k of an empty distribution");
    if (!(lambda0 > 0 && lambda0 < 1)) throw UsageError("lambda0 must lie in (0, 1)");
    auto mass = [&](double e) {
        auto q = tilt(p, 1.0 / e);
        double m = 0.0;
        for (size_t i = 1; i < q.size(); i++) m += q[i];
        return m;
    };
    if (mass(1.0) >= lambda0) return {};
    size_t support = 0;
    for (double v : p) support += v > 0;
    double limit = p[0] > 0 ? 1.0 - 1.0 / support : 1.0;
    if (support <= 1 || limit < lambda0) return {1.0, true};
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (mid == 0.0 || mass(mid) >= lambda0) lo = mid; else hi = mid;
        if (lo == 0.0 && hi < 1e-300) break;
    }
    if (lo == 0.0) return {1.0, true};
    return {1.0 / lo, false};
}

struct TracePoint {
    int64_t samples = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct MCResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int64_t n_samples = 0;
    std::vector<TracePoint> convergence_trace;
    /// Mean k per level over all block draws.
    std::vector<double> k_used;
    /// Mean of the bare likelihood ratios and its standard error.
    double weight_mean = 1.0;
    double weight_std_error = 0.0;
    int64_t unattainable_draws = 0;
    SamplingMode mode = SamplingMode::importance;
    double lambda0 = 0.5;
    uint64_t seed = 0;
    bool average_top = false;
    double seconds = 0.0;
};

inline nlohmann::json to_json(const MCResult &r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto &t : r.convergence_trace) trace.push_back({t.samples, t.estimate, t.std_error});
    return {{"estimate", r.estimate},
            {"std_error", r.std_error},
            {"n_samples", r.n_samples},
            {"mode", mode_name(r.mode)},
            {"lambda0", r.lambda0},
            {"seed", r.seed},
            {"average_top", r.average_top},
            {"k_used", r.k_used},
            {"weight_mean", r.weight_mean},
            {"weight_std_error", r.weight_std_error},
            {"unattainable_draws", r.unattainable_draws},
            {"seconds", r.seconds},
            {"trace", trace}};
}

inline void write_trace_csv(std::ostream &out, const MCResult &r) {
    out << "samples,estimate,std_error\n" << std::setprecision(17);
    for (const auto &t : r.convergence_trace) out << t.samples << ',' << t.estimate << ',' << t.std_error << '\n';
}

/// Sample counts 10^(i/4), rounded and deduplicated, closed with n itself.
inline std::vector<int64_t> checkpoints(int64_t n) {
    std::vector<int64_t> out;
    for (int i = 0;; i++) {
        auto c = static_cast<int64_t>(std::llround(std::pow(10.0, i / 4.0)));
        if (c >= n) break;
        if (out.empty() || out.back() != c) out.push_back(c);
    }
    out.push_back(n);
    return out;
}

/// Syndrome-resolved logical PTMs of one block under Pauli noise, read off its class table.
inline BlockPtm block_ptm_from_classes(const CodeTables &t, const ClassTable &ct) {
    const uint32_t ns = t.num_syndromes();
    BlockPtm out;
    out.num_syndromes = ns;
    out.full = false;
    out.delta.assign(static_cast<size_t>(ns) * 16, 0.0);
    double nonidentity = 0.0;
    for (double v : ct.table) nonidentity += v;
    for (Syndrome s = 0; s < ns; s++) {
        for (uint8_t a = 0; a < 4; a++) {
            double acc = s == 0 ? -nonidentity : 0.0;
            for (uint8_t l = 0; l < 4; l++) {
                bool anti = a != 0 && l != 0 && a != l;
                acc += anti ? -ct.table[s * 4 + l] : ct.table[s * 4 + l];
            }
            out.delta[s * 16 + a * 5] = acc;
        }
    }
    return out;
}

/// Syndrome-averaged logical infidelity sum_s Pr(s) r(s) of one block.
inline double average_infidelity(const BlockPtm &ptm) {
    double acc = 0.0;
    for (Syndrome s = 0; s < ptm.num_syndromes; s++) {
        const double *d = &ptm.delta[s * 16];
        acc += 3 * d[0] - d[5] - d[10] - d[15];
    }
    return acc / 4;
}

namespace detail {

struct SyndromeDraw {
    std::vector<double> p;
    std::vector<double> cum;
    std::vector<double> q;
    KChoice k;

    SyndromeDraw(const BlockPtm &ptm, const ImportanceConfig &cfg) {
        p.resize(ptm.num_syndromes);
        for (Syndrome s = 0; s < ptm.num_syndromes; s++) p[s] = std::max(0.0, ptm.prob(s));
        if (cfg.mode == SamplingMode::importance) {
            k = choose_k(p, cfg.lambda0, cfg.k_search_tolerance);
            q = k.k == 1.0 ? tilt(p, 1.0) : tilt(p, k.k);
        } else {
            q = tilt(p, 1.0);
        }
        cum.resize(q.size());
        double c = 0.0;
        for (size_t i = 0; i < q.size(); i++) cum[i] = c += q[i];
    }

    Syndrome draw(Rng &rng, double &ratio, const std::vector<double> &pnorm) const {
        double u = std::uniform_real_distribution<double>(0.0, cum.back())(rng);
        auto s = static_cast<Syndrome>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (s >= cum.size()) s = static_cast<Syndrome>(cum.size() - 1);
        while (q[s] == 0.0) s--;
        ratio *= pnorm[s] / q[s];
        return s;
    }
};

struct BlockRecord {
    BlockPtm ptm;
    SyndromeDraw draw;
    std::vector<double> pnorm;
    bool diagonal = true;
    std::unordered_map<Syndrome, uint32_t> node_of;

    BlockRecord(BlockPtm m, bool diag, const ImportanceConfig &cfg) : ptm(std::move(m)), draw(ptm, cfg), diagonal(diag) {
        double z = 0.0;
        for (double v : draw.p) z += v;
        pnorm = draw.p;
        for (double &v : pnorm) v /= z;
    }
};

struct SampleStats {
    double value = 0.0;
    double weight = 1.0;
    std::vector<double> k_sum;
    std::vector<int64_t> k_count;
    int64_t unattainable = 0;
};

class McWorker {
   public:
    McWorker(const ConcatSpec &spec, const BlockRecord &level1, const ImportanceConfig &cfg)
        : spec_(spec), level1_(level1), cfg_(cfg) {
        reset();
    }

    SampleStats sample(uint64_t index) {
        if (cache_.size() > cfg_.cache_limit) reset();
        Rng rng = make_rng(cfg_.seed, index);
        SampleStats st;
        st.k_sum.assign(spec_.levels(), 0.0);
        st.k_count.assign(spec_.levels(), 0);
        double ratio = 1.0, top = 0.0;
        draw(spec_.levels(), rng, ratio, st, &top);
        st.weight = ratio;
        st.value = top * ratio;
        return st;
    }

   private:
    struct Node {
        Mat4 deviation;
        bool diagonal;
    };

    void reset() {
        cache_.clear();
        nodes_.clear();
        for (Syndrome s = 0; s < level1_.ptm.num_syndromes; s++) {
            nodes_.push_back({level1_.draw.p[s] > 0 ? level1_.ptm.deviation(s) : Mat4::Zero(), level1_.diagonal});
        }
    }

    void note_k(const BlockRecord &r, int level, SampleStats &st) const {
        st.k_sum[level - 1] += r.draw.k.k;
        st.k_count[level - 1]++;
        st.unattainable += r.draw.k.unattainable;
    }

    uint32_t draw(int level, Rng &rng, double &ratio, SampleStats &st, double *top) {
        if (level == 1) {
            if (top && cfg_.average_top) {
                *top = average_infidelity(level1_.ptm);
                return 0;
            }
            note_k(level1_, 1, st);
            Syndrome s = level1_.draw.draw(rng, ratio, level1_.pnorm);
            if (top) *top = level1_.ptm.infidelity(s);
            return s;
        }
        const CodeTables &t = *spec_.per_level[level - 1];
        std::vector<uint32_t> key(t.n() + 1);
        key[0] = static_cast<uint32_t>(level);
        for (int j = 0; j < t.n(); j++) key[j + 1] = draw(level - 1, rng, ratio, st, nullptr);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            std::vector<Mat4> dev(t.n());
            bool diag = true;
            for (int j = 0; j < t.n(); j++) {
                dev[j] = nodes_[key[j + 1]].deviation;
                diag = diag && nodes_[key[j + 1]].diagonal;
            }
            bool full = !diag && top == nullptr;
            it = cache_.emplace(key, BlockRecord(evaluate_block_ptm(t, dev, full), diag, cfg_)).first;
        }
        BlockRecord &rec = it->second;
        note_k(rec, level, st);
        if (top && cfg_.average_top) {
            *top = average_infidelity(rec.ptm);
            return 0;
        }
        Syndrome s = rec.draw.draw(rng, ratio, rec.pnorm);
        if (top) {
            *top = rec.ptm.infidelity(s);
            return 0;
        }
        auto [nit, fresh] = rec.node_of.emplace(s, static_cast<uint32_t>(nodes_.size()));
        if (fresh) nodes_.push_back({rec.ptm.deviation(s), rec.diagonal});
        return nit->second;
    }

    const ConcatSpec &spec_;
    const BlockRecord &level1_;
    const ImportanceConfig &cfg_;
    std::map<std::vector<uint32_t>, BlockRecord> cache_;
    std::vector<Node> nodes_;
};

}  // namespace detail

/// Monte Carlo average logical infidelity of a concatenated code whose level-1 blocks all see `input`.
inline MCResult mc_logical_infidelity(const ConcatSpec &spec, const FactoredInput &input, const ImportanceConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    cfg.validate();
    spec.validate();
    input.validate();
    const CodeTables &t1 = *spec.per_level[0];
    detail::require_block_size(t1, input);

    BlockPtm ptm1 = input.is_pauli() ? block_ptm_from_classes(t1, class_table(t1, input))
                                     : evaluate_block_ptm(t1, ptm_deviations(input.per_qubit), true);
    const detail::BlockRecord level1(std::move(ptm1), input.is_pauli(), cfg);

    const int64_t n = cfg.max_samples;
    std::vector<detail::SampleStats> stats(n);
    std::atomic<int64_t> next{0};
    const int64_t chunk = 64;
    auto work = [&]() {
        detail::McWorker worker(spec, level1, cfg);
        for (;;) {
            int64_t begin = next.fetch_add(chunk);
            if (begin >= n) break;
            for (int64_t i = begin; i < std::min(n, begin + chunk); i++) stats[i] = worker.sample(i);
        }
    };
    int threads = static_cast<int>(std::min<int64_t>(cfg.threads, (n + chunk - 1) / chunk));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; i++) pool.emplace_back(work);
        for (auto &th : pool) th.join();
    }

    MCResult r;
    r.n_samples = n;
    r.mode = cfg.mode;
    r.lambda0 = cfg.lambda0;
    r.seed = cfg.seed;
    r.average_top = cfg.average_top;
    auto marks = checkpoints(n);
    size_t mark = 0;
    double mean = 0.0, m2 = 0.0, wmean = 0.0, wm2 = 0.0;
    std::vector<double> ksum(spec.levels(), 0.0);
    std::vector<int64_t> kcount(spec.levels(), 0);
    for (int64_t i = 0; i < n; i++) {
        const auto &st = stats[i];
        double c = static_cast<double>(i + 1);
        double d = st.value - mean;
        mean += d / c;
        m2 += d * (st.value - mean);
        double dw = st.weight - wmean;
        wmean += dw / c;
        wm2 += dw * (st.weight - wmean);
        for (int l = 0; l < spec.levels(); l++) {
            ksum[l] += st.k_sum[l];
            kcount[l] += st.k_count[l];
        }
        r.unattainable_draws += st.unattainable;
        if (i + 1 == marks[mark]) {
            double se = i > 0 ? std::sqrt(m2 / (c - 1) / c) : 0.0;
            r.convergence_trace.push_back({i + 1, mean, se});
            mark++;
        }
    }
    r.estimate = mean;
    r.std_error = n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
    r.weight_mean = wmean;
    r.weight_std_error = n > 1 ? std::sqrt(wm2 / (n - 1) / n) : 0.0;
    for (int l = 0; l < spec.levels(); l++) r.k_used.push_back(kcount[l] ? ksum[l] / kcount[l] : 1.0);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace qecest

#endif
