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

#ifndef QECEST_HARNESS_HPP
#define QECEST_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qecest/sampler.hpp"

namespace qecest {

inline constexpr const char *kVersion = "0.1.0";

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// "steane", "cyclic", or a path to a code file.
///
/// "cyclic" is the first [[7,1,3]] code found by the cyclic seed search; pass a file for a
/// specific published generator set.
inline StabilizerCode resolve_code(const std::string &name) {
    if (name == "steane") return steane_code();
    if (name == "cyclic") {
        static const StabilizerCode code = cyclic_code_from_seed("cyclic", search_cyclic_codes(7, 3).front(), 3);
        return code;
    }
    if (std::filesystem::exists(name)) return load_code_file(name);
    throw UsageError("unknown code '" + name + "' (expected steane, cyclic or a code file)");
}

/// Draw from [lo, hi] uniformly in log space.
inline double log_uniform(Rng &rng, double lo, double hi) {
    if (!(lo > 0 && hi >= lo)) throw UsageError("log-uniform range needs 0 < lo <= hi");
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

enum class NoiseKind { random_cptp, coherent, depolarizing, correlated_pauli, biased };

inline std::string kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::random_cptp: return "random_cptp";
        case NoiseKind::coherent: return "coherent";
        case NoiseKind::depolarizing: return "depolarizing";
        case NoiseKind::correlated_pauli: return "correlated_pauli";
        case NoiseKind::biased: return "biased";
    }
    return "";
}

inline NoiseKind parse_kind(const std::string &s) {
    for (auto k : {NoiseKind::random_cptp, NoiseKind::coherent, NoiseKind::depolarizing, NoiseKind::correlated_pauli,
                   NoiseKind::biased}) {
        if (kind_name(k) == s) return k;
    }
    throw ValidationError("unknown noise kind '" + s + "'");
}

/// Noise ensemble plus the concatenated code and the Monte Carlo settings applied to each member.
struct EnsembleSpec {
    std::string name = "ensemble";
    NoiseKind kind = NoiseKind::depolarizing;
    int64_t count = 1;
    uint64_t seed = 1;
    std::string code = "steane";
    int levels = 2;
    DecoderWeights weights;
    /// Kind-specific ranges; see default_params().
    nlohmann::json params = nlohmann::json::object();
    bool run_mc = true;
    /// Also simulate the untwirled channel (non-Pauli kinds only).
    bool run_nonrc = true;
    int64_t samples = 1000;
    SamplingMode mode = SamplingMode::importance;
    double lambda0 = 0.5;
    bool average_top = false;
    int diamond_restarts = 4;
    int threads = 1;

    static nlohmann::json default_params(NoiseKind k) {
        switch (k) {
            case NoiseKind::random_cptp: return {{"t_min", 0.001}, {"t_max", 0.1}};
            case NoiseKind::coherent: return {{"mu_min", 0.001}, {"mu_max", 0.1}};
            case NoiseKind::depolarizing: return {{"p_min", 0.001}, {"p_max", 0.001}};
            case NoiseKind::correlated_pauli:
                return {{"r0_min", 0.005}, {"r0_max", 0.05}, {"q_min", 0.0}, {"q_max", 1.0},
                        {"correctable", 16}, {"uncorrectable", 16}};
            case NoiseKind::biased:
                return {{"r_min", 0.001}, {"r_max", 0.001}, {"eta", 10.0}, {"theta", std::numbers::pi / 2}};
        }
        return {};
    }

    double param(const std::string &key) const {
        if (params.contains(key)) return params.at(key).get<double>();
        auto d = default_params(kind);
        if (!d.contains(key)) throw ValidationError("spec parameter '" + key + "' is not defined for " + kind_name(kind));
        return d.at(key).get<double>();
    }

    void validate() const {
        if (count < 0) throw ValidationError("count must be nonnegative");
        if (levels < 1) throw ValidationError("levels must be at least 1");
        if (samples < 1) throw ValidationError("samples must be at least 1");
        if (threads < 1) throw ValidationError("threads must be at least 1");
        if (!(lambda0 > 0 && lambda0 < 1)) throw ValidationError("lambda0 must lie in (0, 1)");
        auto d = default_params(kind);
        for (const auto &[key, value] : params.items()) {
            if (!d.contains(key)) throw ValidationError("unknown parameter '" + key + "' for " + kind_name(kind));
            if (!value.is_number()) throw ValidationError("parameter '" + key + "' must be a number");
        }
        auto range = [&](const char *lo, const char *hi) {
            if (!(param(lo) > 0 && param(hi) >= param(lo))) {
                throw ValidationError(std::string("need 0 < ") + lo + " <= " + hi);
            }
        };
        switch (kind) {
            case NoiseKind::random_cptp: range("t_min", "t_max"); break;
            case NoiseKind::coherent: range("mu_min", "mu_max"); break;
            case NoiseKind::depolarizing:
                range("p_min", "p_max");
                if (param("p_max") > 0.75) throw ValidationError("depolarizing rate above 3/4");
                break;
            case NoiseKind::correlated_pauli:
                range("r0_min", "r0_max");
                if (param("r0_max") >= 1) throw ValidationError("r0 must stay below 1");
                if (!(param("q_min") >= 0 && param("q_max") <= 1 && param("q_min") <= param("q_max"))) {
                    throw ValidationError("need 0 <= q_min <= q_max <= 1");
                }
                break;
            case NoiseKind::biased:
                range("r_min", "r_max");
                if (!(param("eta") > 0)) throw ValidationError("eta must be positive");
                break;
        }
    }
};

inline nlohmann::json to_json(const EnsembleSpec &s) {
    return {{"name", s.name},
            {"kind", kind_name(s.kind)},
            {"count", s.count},
            {"seed", s.seed},
            {"code", s.code},
            {"levels", s.levels},
            {"decoder_weights", {s.weights.w_x, s.weights.w_y, s.weights.w_z}},
            {"params", s.params},
            {"mc",
             {{"enabled", s.run_mc},
              {"nonrc", s.run_nonrc},
              {"samples", s.samples},
              {"mode", mode_name(s.mode)},
              {"lambda0", s.lambda0},
              {"average_top", s.average_top}}},
            {"diamond_restarts", s.diamond_restarts},
            {"threads", s.threads}};
}

inline EnsembleSpec ensemble_spec_from_json(const nlohmann::json &j) {
    try {
        EnsembleSpec s;
        if (!j.contains("kind")) throw ValidationError("ensemble spec: missing field 'kind'");
        s.kind = parse_kind(j.at("kind").get<std::string>());
        s.name = j.value("name", s.name);
        s.count = j.value("count", s.count);
        s.seed = j.value("seed", s.seed);
        s.code = j.value("code", s.code);
        s.levels = j.value("levels", s.levels);
        if (j.contains("decoder_weights")) {
            auto w = j.at("decoder_weights").get<std::vector<double>>();
            if (w.size() != 3) throw ValidationError("decoder_weights needs three entries");
            s.weights = {w[0], w[1], w[2]};
        }
        if (j.contains("params")) s.params = j.at("params");
        if (j.contains("mc")) {
            const auto &m = j.at("mc");
            s.run_mc = m.value("enabled", s.run_mc);
            s.run_nonrc = m.value("nonrc", s.run_nonrc);
            s.samples = m.value("samples", s.samples);
            if (m.contains("mode")) s.mode = parse_mode(m.at("mode").get<std::string>());
            s.lambda0 = m.value("lambda0", s.lambda0);
            s.average_top = m.value("average_top", s.average_top);
        }
        s.diamond_restarts = j.value("diamond_restarts", s.diamond_restarts);
        s.threads = j.value("threads", s.threads);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("ensemble spec: ") + e.what());
    } catch (const UsageError &e) {
        throw ValidationError(std::string("ensemble spec: ") + e.what());
    }
}

inline EnsembleSpec load_ensemble_spec(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("spec file " + path + ": " + e.what());
    }
    return ensemble_spec_from_json(j);
}

/// `n_correctable` random multi-qubit Paulis the decoder corrects and `n_uncorrectable` it does not.
inline std::vector<uint64_t> adversarial_subset(const CodeTables &t, int n_correctable, int n_uncorrectable, Rng &rng) {
    int64_t avail_good = 0, avail_bad = 0;
    for (uint64_t idx = 1; idx < t.num_paulis(); idx++) {
        if (index_weight(idx) < 2) continue;
        (t.residual_class(idx) == LETTER_I ? avail_good : avail_bad)++;
    }
    if (n_correctable < 0 || n_uncorrectable < 0 || n_correctable > avail_good || n_uncorrectable > avail_bad) {
        throw ValidationError("subset asks for " + std::to_string(n_correctable) + " correctable and " +
                              std::to_string(n_uncorrectable) + " uncorrectable multi-qubit Paulis; available " +
                              std::to_string(avail_good) + " and " + std::to_string(avail_bad));
    }
    std::uniform_int_distribution<uint64_t> pick(1, t.num_paulis() - 1);
    std::set<uint64_t> chosen;
    std::vector<uint64_t> out;
    int good = 0, bad = 0;
    while (good < n_correctable || bad < n_uncorrectable) {
        uint64_t idx = pick(rng);
        if (index_weight(idx) < 2 || chosen.count(idx)) continue;
        bool correctable = t.residual_class(idx) == LETTER_I;
        if (correctable ? good >= n_correctable : bad >= n_uncorrectable) continue;
        (correctable ? good : bad)++;
        chosen.insert(idx);
        out.push_back(idx);
    }
    return out;
}

/// One ensemble member: its block noise and the parameters that produced it.
struct ChannelSample {
    int64_t id = 0;
    uint64_t seed = 0;
    double param = kNaN;
    double param2 = kNaN;
    FactoredInput input;
};

inline ChannelSample generate_channel(const EnsembleSpec &spec, const CodeTables &t, int64_t id) {
    ChannelSample c;
    c.id = id;
    c.seed = derive_seed(spec.seed, static_cast<uint64_t>(id));
    Rng rng(c.seed);
    const int n = t.n();
    switch (spec.kind) {
        case NoiseKind::random_cptp: {
            c.param = log_uniform(rng, spec.param("t_min"), spec.param("t_max"));
            c.input = FactoredInput::iid(n, random_cptp(c.param, rng()));
            break;
        }
        case NoiseKind::coherent: {
            c.param = log_uniform(rng, spec.param("mu_min"), spec.param("mu_max"));
            std::normal_distribution<double> angle(c.param, std::sqrt(c.param));
            std::vector<ChiMatrix1Q> chis;
            for (int q = 0; q < n; q++) {
                auto axis = random_axis(rng);
                chis.push_back(coherent_channel(axis, angle(rng)));
            }
            c.input = FactoredInput::from_chi(std::move(chis));
            break;
        }
        case NoiseKind::depolarizing: {
            c.param = log_uniform(rng, spec.param("p_min"), spec.param("p_max"));
            c.input = FactoredInput::from_pauli(depolarizing(n, c.param));
            break;
        }
        case NoiseKind::correlated_pauli: {
            c.param = log_uniform(rng, spec.param("r0_min"), spec.param("r0_max"));
            c.param2 = std::uniform_real_distribution<double>(spec.param("q_min"), spec.param("q_max"))(rng);
            auto subset = adversarial_subset(t, static_cast<int>(spec.param("correctable")),
                                             static_cast<int>(spec.param("uncorrectable")), rng);
            c.input = FactoredInput::from_pauli(correlated_pauli(n, c.param, c.param2, subset, rng()));
            break;
        }
        case NoiseKind::biased: {
            c.param = log_uniform(rng, spec.param("r_min"), spec.param("r_max"));
            c.param2 = spec.param("eta");
            Prob4 p = biased_model(biased_px_for_infidelity(c.param, c.param2), c.param2, spec.param("theta"));
            c.input = FactoredInput::from_pauli(PauliDist::factored(std::vector<Prob4>(n, p)));
            break;
        }
    }
    return c;
}

/// Chi matrices as rows of [re, im] pairs, or the explicit joint distribution.
inline nlohmann::json to_json(const ChannelSample &c) {
    nlohmann::json j = {{"id", c.id}, {"seed", c.seed}};
    j["param"] = std::isnan(c.param) ? nlohmann::json() : nlohmann::json(c.param);
    j["param2"] = std::isnan(c.param2) ? nlohmann::json() : nlohmann::json(c.param2);
    if (c.input.joint) {
        j["joint"] = c.input.joint->explicit_vector();
        return j;
    }
    nlohmann::json qubits = nlohmann::json::array();
    for (const auto &chi : c.input.per_qubit) {
        nlohmann::json m = nlohmann::json::array();
        for (int a = 0; a < 4; a++) {
            nlohmann::json row = nlohmann::json::array();
            for (int b = 0; b < 4; b++) row.push_back({chi.entries(a, b).real(), chi.entries(a, b).imag()});
            m.push_back(row);
        }
        qubits.push_back(m);
    }
    j["chi"] = qubits;
    return j;
}

/// Block noise as the estimator sees it after twirling.
inline PauliDist twirled_dist(const FactoredInput &in) {
    if (in.joint) return *in.joint;
    std::vector<Prob4> f;
    for (const auto &c : in.per_qubit) f.push_back(pauli_twirl(c));
    return PauliDist::factored(std::move(f));
}

/// Mean single-qubit infidelity, or the block infidelity for joint noise.
inline double physical_infidelity(const FactoredInput &in) {
    if (in.joint) return in.joint->infidelity();
    double s = 0;
    for (const auto &c : in.per_qubit) s += infidelity(c);
    return s / static_cast<double>(in.per_qubit.size());
}

struct RunRecord {
    int64_t id = 0;
    std::string kind;
    uint64_t seed = 0;
    double param = kNaN;
    double param2 = kNaN;
    double infidelity = kNaN;
    double diamond = kNaN;
    double p_u_rc = kNaN;
    double mc_rc = kNaN;
    double mc_rc_se = kNaN;
    double mc_nonrc = kNaN;
    double mc_nonrc_se = kNaN;
    int64_t samples = 0;
    std::string mode;
    double seconds = 0.0;
    std::string error;
};

inline const std::vector<std::string> &record_columns() {
    static const std::vector<std::string> cols = {
        "id",     "kind",     "seed",        "param",    "param2",      "infidelity", "diamond", "p_u_rc",
        "mc_rc", "mc_rc_se", "mc_nonrc", "mc_nonrc_se", "samples", "mode", "seconds", "error"};
    return cols;
}

/// Numeric column of a record by CSV name.
inline double column(const RunRecord &r, const std::string &name) {
    if (name == "param") return r.param;
    if (name == "param2") return r.param2;
    if (name == "infidelity") return r.infidelity;
    if (name == "diamond") return r.diamond;
    if (name == "p_u_rc") return r.p_u_rc;
    if (name == "mc_rc") return r.mc_rc;
    if (name == "mc_rc_se") return r.mc_rc_se;
    if (name == "mc_nonrc") return r.mc_nonrc;
    if (name == "mc_nonrc_se") return r.mc_nonrc_se;
    if (name == "seconds") return r.seconds;
    throw UsageError("no numeric column '" + name + "'");
}

inline std::string csv_header() {
    std::string out;
    for (const auto &c : record_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

inline std::string to_csv_line(const RunRecord &r) {
    std::string err = r.error;
    std::replace_if(err.begin(), err.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ';');
    std::ostringstream ss;
    ss << r.id << ',' << r.kind << ',' << r.seed << ',' << format_double(r.param) << ',' << format_double(r.param2)
       << ',' << format_double(r.infidelity) << ',' << format_double(r.diamond) << ',' << format_double(r.p_u_rc)
       << ',' << format_double(r.mc_rc) << ',' << format_double(r.mc_rc_se) << ',' << format_double(r.mc_nonrc)
       << ',' << format_double(r.mc_nonrc_se) << ',' << r.samples << ',' << r.mode << ','
       << format_double(r.seconds) << ',' << err;
    return ss.str();
}

inline double parse_double(const std::string &s) {
    if (s == "nan" || s.empty()) return kNaN;
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw ValidationError("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error &) {
        throw ValidationError("bad number '" + s + "'");
    }
}

inline RunRecord from_csv_line(const std::string &line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != record_columns().size()) {
        throw ValidationError("record line has " + std::to_string(f.size()) + " fields, expected " +
                              std::to_string(record_columns().size()));
    }
    RunRecord r;
    try {
        r.id = std::stoll(f[0]);
        r.seed = std::stoull(f[2]);
        r.samples = std::stoll(f[12]);
    } catch (const std::logic_error &) {
        throw ValidationError("bad integer field in record line");
    }
    r.kind = f[1];
    r.param = parse_double(f[3]);
    r.param2 = parse_double(f[4]);
    r.infidelity = parse_double(f[5]);
    r.diamond = parse_double(f[6]);
    r.p_u_rc = parse_double(f[7]);
    r.mc_rc = parse_double(f[8]);
    r.mc_rc_se = parse_double(f[9]);
    r.mc_nonrc = parse_double(f[10]);
    r.mc_nonrc_se = parse_double(f[11]);
    r.mode = f[13];
    r.seconds = parse_double(f[14]);
    r.error = f[15];
    return r;
}

inline std::vector<RunRecord> read_records(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    if (line != csv_header()) throw ValidationError("unexpected record CSV header");
    std::vector<RunRecord> out;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(from_csv_line(line));
    }
    return out;
}

inline std::vector<RunRecord> read_records_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open records file " + path);
    return read_records(in);
}

inline void write_records(std::ostream &out, const std::vector<RunRecord> &records) {
    out << csv_header() << '\n';
    for (const auto &r : records) out << to_csv_line(r) << '\n';
}

inline ImportanceConfig mc_config(const EnsembleSpec &spec, uint64_t seed) {
    ImportanceConfig cfg;
    cfg.lambda0 = spec.lambda0;
    cfg.max_samples = spec.samples;
    cfg.seed = seed;
    cfg.mode = spec.mode;
    cfg.average_top = spec.average_top;
    return cfg;
}

/// Metrics, twirled estimate and simulations for one ensemble member.
inline RunRecord run_member(const EnsembleSpec &spec, const CodeTablesPtr &tables, int64_t id) {
    auto start = std::chrono::steady_clock::now();
    RunRecord r;
    r.id = id;
    r.kind = kind_name(spec.kind);
    r.seed = derive_seed(spec.seed, static_cast<uint64_t>(id));
    try {
        ChannelSample c = generate_channel(spec, *tables, id);
        c.input.validate();
        r.param = c.param;
        r.param2 = c.param2;
        r.infidelity = physical_infidelity(c.input);
        if (!c.input.joint) {
            double dsum = 0;
            for (size_t q = 0; q < c.input.per_qubit.size(); q++) {
                dsum += diamond_distance_est(c.input.per_qubit[q], spec.diamond_restarts, derive_seed(c.seed, q));
            }
            r.diamond = dsum / static_cast<double>(c.input.per_qubit.size());
        }
        ConcatSpec concat = ConcatSpec::uniform(tables, spec.levels);
        PauliDist twirled = twirled_dist(c.input);
        r.p_u_rc = logical_estimator(concat, {twirled}).p_u_tilde;
        if (spec.run_mc) {
            r.samples = spec.samples;
            r.mode = mode_name(spec.mode);
            auto rc = mc_logical_infidelity(concat, FactoredInput::from_pauli(twirled), mc_config(spec, derive_seed(c.seed, 101)));
            r.mc_rc = rc.estimate;
            r.mc_rc_se = rc.std_error;
            if (c.input.is_pauli()) {
                r.mc_nonrc = r.mc_rc;
                r.mc_nonrc_se = r.mc_rc_se;
            } else if (spec.run_nonrc) {
                auto raw = mc_logical_infidelity(concat, c.input, mc_config(spec, derive_seed(c.seed, 102)));
                r.mc_nonrc = raw.estimate;
                r.mc_nonrc_se = raw.std_error;
            }
        }
    } catch (const std::exception &e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline nlohmann::json sidecar_json(const EnsembleSpec &spec) {
    return {{"software", "qecest"}, {"version", kVersion}, {"spec", to_json(spec)}, {"columns", record_columns()},
            {"member_seed", "splitmix64 derivation of (seed, id)"}};
}

/// Runs every member not already present in `csv_path` (when given) and returns all records by id.
///
/// Records are appended to the CSV as they finish, so an interrupted run resumes where it stopped.
/// Failures of single members land in the record's error column.
inline std::vector<RunRecord> run_ensemble(const EnsembleSpec &spec, const std::string &csv_path = "") {
    spec.validate();
    CodeTablesPtr tables = make_tables(resolve_code(spec.code), spec.weights);
    std::vector<RunRecord> records;
    std::set<int64_t> done;
    std::ofstream out;
    if (!csv_path.empty()) {
        bool fresh = !std::filesystem::exists(csv_path) || std::filesystem::file_size(csv_path) == 0;
        if (!fresh) {
            for (auto &r : read_records_file(csv_path)) {
                if (r.id >= 0 && r.id < spec.count && done.insert(r.id).second) records.push_back(std::move(r));
            }
        }
        out.open(csv_path, std::ios::app);
        if (!out) throw ValidationError("cannot write " + csv_path);
        if (fresh) out << csv_header() << '\n' << std::flush;
        std::ofstream side(csv_path + ".json");
        side << sidecar_json(spec).dump(2) << '\n';
    }
    std::vector<int64_t> todo;
    for (int64_t id = 0; id < spec.count; id++) {
        if (!done.count(id)) todo.push_back(id);
    }
    std::mutex mu;
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= todo.size()) break;
            RunRecord r = run_member(spec, tables, todo[i]);
            std::lock_guard<std::mutex> lock(mu);
            if (out.is_open()) out << to_csv_line(r) << '\n' << std::flush;
            records.push_back(std::move(r));
        }
    };
    int threads = static_cast<int>(std::min<size_t>(spec.threads, std::max<size_t>(todo.size(), 1)));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; i++) pool.emplace_back(work);
        for (auto &th : pool) th.join();
    }
    std::sort(records.begin(), records.end(), [](const RunRecord &a, const RunRecord &b) { return a.id < b.id; });
    return records;
}

struct Bin {
    int index = 0;
    double lo = 0.0;
    double hi = 0.0;
    int64_t count = 0;
    double delta = 0.0;
};

/// Dispersion of a response column in log-spaced bins of a predictor column.
struct BinReport {
    std::string predictor;
    std::string response;
    std::vector<double> edges;
    /// Nonempty bins only.
    std::vector<Bin> bins;

    const Bin *find(int index) const {
        for (const auto &b : bins) {
            if (b.index == index) return &b;
        }
        return nullptr;
    }
};

/// Delta(b) = (1/|b|) max_b(y) / min_b(y) over `num_bins` log-spaced predictor bins.
///
/// Records with errors or nonpositive values in either column are skipped.
inline BinReport dispersion(const std::vector<RunRecord> &records, const std::string &predictor,
                            const std::string &response, int num_bins = 10) {
    if (num_bins < 1) throw UsageError("need at least one bin");
    std::vector<std::pair<double, double>> pts;
    for (const auto &r : records) {
        if (!r.error.empty()) continue;
        double x = column(r, predictor), y = column(r, response);
        if (x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
    }
    BinReport rep;
    rep.predictor = predictor;
    rep.response = response;
    if (pts.empty()) return rep;
    double lo = pts[0].first, hi = pts[0].first;
    for (const auto &[x, y] : pts) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    double llo = std::log10(lo), lhi = std::log10(hi);
    if (lhi == llo) lhi = llo + 1e-9;
    for (int i = 0; i <= num_bins; i++) rep.edges.push_back(std::pow(10.0, llo + (lhi - llo) * i / num_bins));
    std::vector<int64_t> count(num_bins, 0);
    std::vector<double> ymax(num_bins, 0.0), ymin(num_bins, std::numeric_limits<double>::infinity());
    for (const auto &[x, y] : pts) {
        int b = static_cast<int>((std::log10(x) - llo) / (lhi - llo) * num_bins);
        b = std::clamp(b, 0, num_bins - 1);
        count[b]++;
        ymax[b] = std::max(ymax[b], y);
        ymin[b] = std::min(ymin[b], y);
    }
    for (int b = 0; b < num_bins; b++) {
        if (count[b] == 0) continue;
        rep.bins.push_back({b, rep.edges[b], rep.edges[b + 1], count[b], ymax[b] / ymin[b] / count[b]});
    }
    return rep;
}

inline nlohmann::json to_json(const BinReport &r) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto &b : r.bins) {
        bins.push_back({{"index", b.index}, {"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"delta", b.delta}});
    }
    return {{"predictor", r.predictor}, {"response", r.response}, {"edges", r.edges}, {"bins", bins}};
}

/// Bin-by-bin comparison of two dispersion reports over bins where both hold at least `min_count` points.
struct Separation {
    std::vector<int> compared;
    bool holds = false;
};

inline Separation compare_dispersion(const BinReport &better, const BinReport &worse, int64_t min_count = 20) {
    Separation s;
    s.holds = true;
    for (const auto &b : better.bins) {
        const Bin *w = worse.find(b.index);
        if (!w || b.count < min_count || w->count < min_count) continue;
        s.compared.push_back(b.index);
        if (!(b.delta < w->delta)) s.holds = false;
    }
    if (s.compared.empty()) s.holds = false;
    return s;
}

struct CodeSelectConfig {
    std::vector<double> etas{10, 30, 100};
    /// Single-qubit non-identity mass held fixed across the sweep.
    double infidelity = 1e-3;
    double theta = std::numbers::pi / 2;
    int levels = 2;
    bool adapted_decoder = true;
    bool run_mc = false;
    ImportanceConfig mc;
};

struct CodeSelectRow {
    double eta = 0.0;
    double p_x = 0.0;
    std::vector<double> p_u;
    std::vector<double> mc;
    std::vector<double> mc_se;
    /// Index of the smallest value, or -1 when the smallest two agree to 1e-12 relative.
    int winner_pu = -1;
    int winner_mc = -1;
};

inline int argmin_strict(const std::vector<double> &v) {
    if (v.empty()) return -1;
    std::vector<size_t> order(v.size());
    for (size_t i = 0; i < v.size(); i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    if (v.size() > 1 && std::abs(v[order[0]] - v[order[1]]) <= 1e-12 * std::abs(v[order[1]])) return -1;
    return static_cast<int>(order[0]);
}

/// p_u tilde (and optionally Monte Carlo) of each code across a bias sweep of the biased model.
inline std::vector<CodeSelectRow> code_select(const std::vector<StabilizerCode> &codes, const CodeSelectConfig &cfg) {
    if (codes.size() < 2) throw UsageError("code selection needs at least two codes");
    if (cfg.etas.empty()) throw UsageError("empty bias sweep");
    std::vector<CodeSelectRow> rows;
    for (double eta : cfg.etas) {
        CodeSelectRow row;
        row.eta = eta;
        row.p_x = biased_px_for_infidelity(cfg.infidelity, eta);
        Prob4 p = biased_model(row.p_x, eta, cfg.theta);
        for (size_t c = 0; c < codes.size(); c++) {
            auto tables = make_tables(codes[c], cfg.adapted_decoder ? DecoderWeights::biased(eta) : DecoderWeights{});
            auto spec = ConcatSpec::uniform(tables, cfg.levels);
            auto dist = PauliDist::factored(std::vector<Prob4>(codes[c].n(), p));
            row.p_u.push_back(logical_estimator(spec, {dist}).p_u_tilde);
            if (cfg.run_mc) {
                auto r = mc_logical_infidelity(spec, FactoredInput::from_pauli(dist), cfg.mc);
                row.mc.push_back(r.estimate);
                row.mc_se.push_back(r.std_error);
            }
        }
        row.winner_pu = argmin_strict(row.p_u);
        if (cfg.run_mc) row.winner_mc = argmin_strict(row.mc);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_code_select_csv(std::ostream &out, const std::vector<StabilizerCode> &codes,
                                  const std::vector<CodeSelectRow> &rows) {
    out << "eta,p_x";
    for (const auto &c : codes) out << ",pu_" << c.name();
    for (const auto &c : codes) out << ",mc_" << c.name() << ",mc_se_" << c.name();
    out << ",winner_pu,winner_mc\n";
    auto name = [&](int w) { return w < 0 ? std::string("none") : codes[w].name(); };
    for (const auto &r : rows) {
        out << format_double(r.eta) << ',' << format_double(r.p_x);
        for (double v : r.p_u) out << ',' << format_double(v);
        for (size_t c = 0; c < codes.size(); c++) {
            out << ',' << (r.mc.empty() ? "nan" : format_double(r.mc[c])) << ','
                << (r.mc_se.empty() ? "nan" : format_double(r.mc_se[c]));
        }
        out << ',' << name(r.winner_pu) << ',' << (r.mc.empty() ? "none" : name(r.winner_mc)) << '\n';
    }
}

}  // namespace qecest

#endif
