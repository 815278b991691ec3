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

// Acceptance run: one PASS/FAIL line per criterion, then a summary.
// Exit status is 0 unless --strict is given and a criterion failed.
// --out DIR keeps the ensemble CSVs of criterion 6.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qecest/harness.hpp"

namespace {

using namespace qecest;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string data_path(const std::string &rel) { return std::string(QECEST_DATA_DIR) + "/" + rel; }

const CodeTablesPtr &steane() {
    static const CodeTablesPtr t = make_tables(steane_code());
    return t;
}

struct Golden {
    EstimateReport est;
    MCResult mc;
    double mc_seconds = 0;
};

const Golden &golden() {
    static const Golden g = [] {
        Golden out;
        auto spec = ConcatSpec::uniform(steane(), 2);
        auto dist = depolarizing(7, 1e-3);
        out.est = logical_estimator(spec, {dist});
        EnsembleSpec es = load_ensemble_spec(data_path("specs/golden_depolarizing.json"));
        ImportanceConfig cfg = mc_config(es, es.seed);
        auto t0 = std::chrono::steady_clock::now();
        out.mc = mc_logical_infidelity(spec, FactoredInput::from_pauli(dist), cfg);
        out.mc_seconds = seconds_since(t0);
        return out;
    }();
    return g;
}

Outcome criterion1() {
    const auto &g = golden();
    double rel = g.est.p_u_tilde / 4.24e-9 - 1;
    bool pass = std::abs(rel) <= 0.02 && g.est.seconds < 5;
    return {pass, fmt("p_u_tilde %.5e vs 4.24e-09 (rel %+.2f%%, limit 2%%), %.3f s", g.est.p_u_tilde, 100 * rel,
                      g.est.seconds)};
}

Outcome criterion2() {
    const auto &g = golden();
    double x = g.mc.estimate, se = g.mc.std_error;
    bool in_range = x >= 3.0e-9 && x <= 5.5e-9;
    bool consistent = std::abs(x - 4.20e-9) <= 3 * se;
    bool pass = in_range && consistent && g.mc_seconds < 600;
    return {pass, fmt("MC %.4e +- %.2e (%lld importance samples, seed %llu), |MC - 4.20e-09| = %.2e vs 3se %.2e, %.1f s",
                      x, se, static_cast<long long>(g.mc.n_samples), static_cast<unsigned long long>(g.mc.seed),
                      std::abs(x - 4.20e-9), 3 * se, g.mc_seconds)};
}

Outcome criterion3() {
    const auto &g = golden();
    double gap = std::abs(g.mc.estimate - g.est.p_u_tilde);
    double limit = 5e-10 + 3 * g.mc.std_error;
    return {gap <= limit, fmt("|MC - p_u_tilde| = %.3e, limit %.3e", gap, limit)};
}

Outcome criterion4() {
    auto spec = ConcatSpec::uniform(steane(), 1);
    Rng rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_est = 0, worst_avg = 0;
    for (int c = 0; c < 100; c++) {
        double scale = std::pow(10.0, -3 + 2 * u(rng));
        std::vector<double> v(pauli_count(7));
        double rest = 0;
        for (size_t i = 1; i < v.size(); i++) {
            v[i] = u(rng) * scale * std::pow(0.1, index_weight(i));
            rest += v[i];
        }
        double norm = rest / scale;
        for (size_t i = 1; i < v.size(); i++) v[i] /= norm;
        v[0] = 1.0 - scale;
        auto dist = PauliDist::explicit_probs(7, v);
        double exact = exact_pu(*steane(), dist);
        double est = logical_estimator(spec, {dist}).p_u_tilde;
        double avg = logical_infidelity(average_channel(*steane(), FactoredInput::from_pauli(dist)));
        worst_est = std::max(worst_est, std::abs(est - exact));
        worst_avg = std::max(worst_avg, std::abs(avg - exact));
    }
    bool pass = worst_est <= 1e-12 && worst_avg <= 1e-12;
    return {pass, fmt("100 explicit channels, max |estimator - exact| %.2e, max |exact - (1 - avg chi00)| %.2e", worst_est,
                      worst_avg)};
}

Outcome criterion5() {
    double worst_sum = 0;
    for (int n : {3, 5, 7}) {
        NRDataset d;
        d.n = n;
        d.infidelity = 0.02;
        auto v = extrapolate_nr(d).explicit_vector();
        double s = 0;
        for (double x : v) s += x;
        worst_sum = std::max(worst_sum, std::abs(s - 1));
    }
    EnsembleSpec es = load_ensemble_spec(data_path("specs/correlated_ensemble.json"));
    auto tables = make_tables(resolve_code(es.code), es.weights);
    auto spec = ConcatSpec::uniform(tables, es.levels);
    int within = 0;
    double worst = 1;
    for (int64_t id = 0; id < es.count; id++) {
        auto dist = *generate_channel(es, *tables, id).input.joint;
        double full = logical_estimator(spec, {dist}).p_u_tilde;
        double part = logical_estimator(spec, {extrapolate_nr(top_k(dist, 200))}).p_u_tilde;
        double ratio = std::max(part / full, full / part);
        worst = std::max(worst, ratio);
        if (ratio <= 3) within++;
    }
    double frac = static_cast<double>(within) / static_cast<double>(es.count);
    bool pass = worst_sum <= 1e-12 && es.count >= 100 && frac >= 0.9;
    return {pass, fmt("K=0 max |sum - 1| %.1e over n=3,5,7; K=200 within x3 for %d/%lld channels (worst x%.4f)",
                      worst_sum, within, static_cast<long long>(es.count), worst)};
}

struct SeparationResult {
    Separation sep;
    double gap = 0;
    std::string failed;
    int failures = 0;
    int64_t members = 0;
};

SeparationResult separation(const std::string &spec_file, const std::string &out_dir) {
    EnsembleSpec es = load_ensemble_spec(data_path(spec_file));
    std::string csv;
    if (!out_dir.empty()) {
        csv = out_dir + "/" + es.name + ".csv";
        std::filesystem::remove(csv);
    }
    auto recs = run_ensemble(es, csv);
    auto pu = dispersion(recs, "p_u_rc", "mc_rc");
    auto inf = dispersion(recs, "infidelity", "mc_nonrc");
    SeparationResult r;
    r.members = static_cast<int64_t>(recs.size());
    r.sep = compare_dispersion(pu, inf, 20);
    for (int b : r.sep.compared) {
        double a = pu.find(b)->delta, w = inf.find(b)->delta;
        r.gap += std::log(w / a);
        if (!(a < w)) {
            r.failures++;
            r.failed += fmt(" bin%d(%.3g vs %.3g)", b, a, w);
        }
    }
    if (!r.sep.compared.empty()) r.gap /= static_cast<double>(r.sep.compared.size());
    return r;
}

Outcome criterion6(const std::string &out_dir) {
    auto cptp = separation("specs/cptp_ensemble.json", out_dir);
    auto coh = separation("specs/coherent_ensemble.json", out_dir);
    auto held = [](const SeparationResult &r) {
        return static_cast<int>(r.sep.compared.size()) - r.failures;
    };
    bool pass = cptp.sep.holds && coh.sep.holds && cptp.members >= 300 && coh.members >= 300 && coh.gap > cptp.gap;
    return {pass, fmt("cptp %d/%zu bins hold%s, mean ln gap %.2f; coherent %d/%zu bins hold%s, mean ln gap %.2f",
                      held(cptp), cptp.sep.compared.size(), cptp.failed.c_str(), cptp.gap, held(coh),
                      coh.sep.compared.size(), coh.failed.c_str(), coh.gap)};
}

Outcome criterion7() {
    std::vector<StabilizerCode> codes{resolve_code("steane"), resolve_code("cyclic")};
    CodeSelectConfig cfg;
    cfg.run_mc = true;
    cfg.mc.max_samples = 10000;
    cfg.mc.average_top = true;
    auto rows = code_select(codes, cfg);
    bool agree = true;
    std::string winners;
    for (const auto &r : rows) {
        if (r.winner_pu < 0 || r.winner_pu != r.winner_mc) agree = false;
        winners += fmt(" eta %g: %s/%s", r.eta, r.winner_pu < 0 ? "none" : codes[r.winner_pu].name().c_str(),
                       r.winner_mc < 0 ? "none" : codes[r.winner_mc].name().c_str());
    }
    CodeSelectConfig l3 = cfg;
    l3.run_mc = false;
    l3.levels = 3;
    auto t0 = std::chrono::steady_clock::now();
    auto rows3 = code_select(codes, l3);
    double secs = seconds_since(t0);
    bool gain_monotone = true, advantage_monotone = true;
    std::string gains;
    double prev_gain = 0, prev_adv = 0;
    for (size_t i = 0; i < rows3.size(); i++) {
        const auto &p = rows3[i].p_u;
        double gain = p[0] / p[1];
        double lo = std::min(p[0], p[1]), hi = std::max(p[0], p[1]);
        double adv = hi / lo;
        if (i > 0 && gain < prev_gain) gain_monotone = false;
        if (i > 0 && adv < prev_adv) advantage_monotone = false;
        prev_gain = gain;
        prev_adv = adv;
        gains += fmt(" %.2e", gain);
    }
    bool pass = agree && secs < 60 && gain_monotone;
    return {pass, fmt("L2 winners p_u/MC:%s; L3 sweep %.1f s, cyclic/steane gain%s %s, winner advantage %s", winners.c_str(),
                      secs, gains.c_str(), gain_monotone ? "nondecreasing" : "not monotone",
                      advantage_monotone ? "nondecreasing" : "decreasing")};
}

Outcome criterion8() {
    auto spec1 = ConcatSpec::uniform(steane(), 1);
    Rng rng(11);
    double delta = 2 * std::asin(std::sqrt(4e-3)) / std::numbers::pi;
    std::vector<ChiMatrix1Q> coh;
    for (int q = 0; q < 7; q++) coh.push_back(coherent_channel(random_axis(rng), delta));
    std::vector<std::pair<std::string, FactoredInput>> inputs{
        {"depolarizing", FactoredInput::from_pauli(depolarizing(7, 0.01))},
        {"coherent", FactoredInput::from_chi(coh)},
        {"cptp", FactoredInput::iid(7, random_cptp(0.05, 3))}};
    const int64_t n = 10000;
    bool level1 = true, weights = true;
    double worst_z = 0, worst_w = 0;
    for (const auto &[name, in] : inputs) {
        double exact = logical_infidelity(average_channel(*steane(), in));
        for (auto mode : {SamplingMode::direct, SamplingMode::importance}) {
            ImportanceConfig cfg;
            cfg.mode = mode;
            cfg.max_samples = n;
            cfg.seed = 5;
            auto r = mc_logical_infidelity(spec1, in, cfg);
            double z = std::abs(r.estimate - exact) / r.std_error;
            if (!(z <= 3)) level1 = false;
            worst_z = std::max(worst_z, z);
            if (mode == SamplingMode::importance) {
                double w = std::abs(r.weight_mean - 1);
                if (!(w <= 3 / std::sqrt(static_cast<double>(n)))) weights = false;
                worst_w = std::max(worst_w, w);
            }
        }
    }
    auto spec2 = ConcatSpec::uniform(steane(), 2);
    ImportanceConfig cfg;
    cfg.max_samples = n;
    cfg.seed = 2024;
    cfg.mode = SamplingMode::direct;
    auto direct = mc_logical_infidelity(spec2, FactoredInput::from_chi(coh), cfg);
    cfg.mode = SamplingMode::importance;
    auto importance = mc_logical_infidelity(spec2, FactoredInput::from_chi(coh), cfg);
    bool under = direct.estimate < importance.estimate;
    return {level1 && weights && under,
            fmt("level 1 worst |MC - exact|/se %.2f; worst |weight mean - 1| %.2e (limit %.2e); coherent r=4e-3 L2 direct "
                "%.3e < importance %.3e",
                worst_z, worst_w, 3 / std::sqrt(static_cast<double>(n)), direct.estimate, importance.estimate)};
}

Outcome criterion9() {
    std::vector<std::pair<NoiseKind, int>> mix{{NoiseKind::random_cptp, 300},
                                               {NoiseKind::coherent, 300},
                                               {NoiseKind::biased, 100},
                                               {NoiseKind::depolarizing, 100},
                                               {NoiseKind::correlated_pauli, 200}};
    int inputs = 0, generated_bad = 0, conditional = 0, conditional_bad = 0;
    double worst_sum = 0;
    ChiPairOptions opt;
    opt.prune = 0;
    for (const auto &[kind, count] : mix) {
        EnsembleSpec es;
        es.kind = kind;
        es.seed = 77;
        es.count = count;
        if (kind == NoiseKind::depolarizing) es.params = {{"p_min", 1e-4}, {"p_max", 0.1}};
        if (kind == NoiseKind::biased) es.params = {{"r_min", 1e-4}, {"r_max", 0.05}};
        auto tables = make_tables(resolve_code(es.code), es.weights);
        for (int64_t id = 0; id < count; id++) {
            auto c = generate_channel(es, *tables, id);
            inputs++;
            bool ok = true;
            if (c.input.joint) {
                try {
                    c.input.joint->validate();
                } catch (const ValidationError &) {
                    ok = false;
                }
            } else {
                for (const auto &q : c.input.per_qubit) {
                    if (!is_valid_chi(q.entries) || !is_trace_preserving(q.entries)) ok = false;
                }
            }
            if (!ok) generated_bad++;
            auto chans = all_conditional_channels(*tables, c.input, opt);
            double sum = 0;
            for (const auto &ch : chans) {
                sum += ch.prob;
                if (ch.prob > 1e-14) {
                    conditional++;
                    if (!is_valid_chi(ch.logical_chi)) conditional_bad++;
                }
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1));
        }
    }
    bool pass = generated_bad == 0 && conditional_bad == 0 && worst_sum <= 1e-10 && inputs >= 1000;
    return {pass, fmt("%d inputs, %d fail CPTP; %d/%d conditional channels invalid; max |sum Pr(s) - 1| %.2e", inputs,
                      generated_bad, conditional_bad, conditional, worst_sum)};
}

}  // namespace

int main(int argc, char **argv) {
    bool strict = false;
    std::string out_dir;
    for (int i = 1; i < argc; i++) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
            out_dir = argv[++i];
            std::filesystem::create_directories(out_dir);
        } else {
            std::fprintf(stderr, "usage: acceptance [--strict] [--out DIR]\n");
            return 2;
        }
    }
    std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                   criterion4, criterion5, [&] { return criterion6(out_dir); },
                                                   criterion7, criterion8, criterion9};
    int passed = 0;
    for (size_t i = 0; i < criteria.size(); i++) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (o.pass) passed++;
        std::printf("criterion %zu %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
    return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}
