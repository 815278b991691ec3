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

// Command line front end: channel generation, estimates, simulations and ensemble analysis.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qecest/harness.hpp"

namespace {

using namespace qecest;

struct Overrides {
    std::string spec_path;
    std::string out_path;
    uint64_t seed = 0;
    int64_t samples = 0;
    std::string mode;
    double lambda0 = 0.0;
    int levels = 0;
    int threads = 0;
};

void add_common(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--spec", o.spec_path, "ensemble spec file (JSON)");
    cmd->add_option("--out", o.out_path, "output file (stdout when omitted)");
    cmd->add_option("--seed", o.seed, "override the master seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo samples");
    cmd->add_option("--mode", o.mode, "sampling mode")->check(CLI::IsMember({"direct", "importance"}));
    cmd->add_option("--lambda0", o.lambda0, "importance threshold on nontrivial syndrome mass");
    cmd->add_option("--levels", o.levels, "concatenation levels");
    cmd->add_option("--threads", o.threads, "worker threads");
}

EnsembleSpec load_spec(const Overrides &o) {
    EnsembleSpec s;
    if (!o.spec_path.empty()) s = load_ensemble_spec(o.spec_path);
    if (o.seed) s.seed = o.seed;
    if (o.samples) s.samples = o.samples;
    if (!o.mode.empty()) s.mode = parse_mode(o.mode);
    if (o.lambda0 > 0) s.lambda0 = o.lambda0;
    if (o.levels) s.levels = o.levels;
    if (o.threads) s.threads = o.threads;
    s.validate();
    return s;
}

/// Writes to --out when given, otherwise to stdout.
template <typename Fn>
void emit(const std::string &path, Fn &&fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    fn(out);
}

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qecest: logical error rate estimates for concatenated stabilizer codes"};
    app.require_subcommand(1);
    Overrides o;

    auto *gen = app.add_subcommand("gen", "generate the channels of an ensemble spec as JSON");
    add_common(gen, o);

    int64_t member = 0;
    double depol = -1.0;
    bool twirl = false;
    bool average_top = false;
    std::string trace_path;
    auto *estimate = app.add_subcommand("estimate", "logical estimator for one ensemble member");
    add_common(estimate, o);
    estimate->add_option("--id", member, "ensemble member id");
    estimate->add_option("--depolarizing", depol, "use i.i.d. depolarizing noise with this rate instead of a spec");

    auto *simulate = app.add_subcommand("simulate", "Monte Carlo logical infidelity for one ensemble member");
    add_common(simulate, o);
    simulate->add_option("--id", member, "ensemble member id");
    simulate->add_option("--depolarizing", depol, "use i.i.d. depolarizing noise with this rate instead of a spec");
    simulate->add_flag("--rc", twirl, "simulate the twirled channel");
    simulate->add_flag("--average-top", average_top, "average the top-level syndrome exactly");
    simulate->add_option("--trace", trace_path, "write the convergence trace CSV here");

    auto *ensemble = app.add_subcommand("ensemble", "run an ensemble spec into a resumable CSV");
    add_common(ensemble, o);

    std::string in_path, predictor = "p_u_rc", response = "mc_rc";
    int num_bins = 10;
    auto *bins = app.add_subcommand("bins", "dispersion per predictor bin from an ensemble CSV");
    bins->add_option("--in", in_path, "ensemble CSV")->required();
    bins->add_option("--predictor", predictor, "predictor column");
    bins->add_option("--response", response, "response column");
    bins->add_option("--bins", num_bins, "number of log-spaced bins");
    bins->add_option("--out", o.out_path, "output file (stdout when omitted)");

    std::string codes_arg = "steane,cyclic", etas_arg = "10,30,100";
    double sel_infidelity = 1e-3;
    auto *select = app.add_subcommand("code-select", "rank codes by p_u tilde across a bias sweep");
    add_common(select, o);
    select->add_option("--codes", codes_arg, "comma separated code names or files");
    select->add_option("--etas", etas_arg, "comma separated bias values");
    select->add_option("--infidelity", sel_infidelity, "single-qubit infidelity held fixed");
    select->add_flag("--average-top", average_top, "average the top-level syndrome exactly");

    std::string code_name = "steane";
    auto *nr = app.add_subcommand("nr-import", "extrapolate a noise reconstruction dataset and estimate p_u tilde");
    add_common(nr, o);
    nr->add_option("--in", in_path, "NR dataset CSV")->required();
    nr->add_option("--code", code_name, "code name or file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? EXIT_OK : EXIT_VALIDATION;
    }

    try {
        if (*gen) {
            EnsembleSpec spec = load_spec(o);
            auto tables = make_tables(resolve_code(spec.code), spec.weights);
            nlohmann::json out = nlohmann::json::array();
            for (int64_t id = 0; id < spec.count; id++) out.push_back(to_json(generate_channel(spec, *tables, id)));
            emit(o.out_path, [&](std::ostream &s) { s << out.dump(1) << '\n'; });
        } else if (*estimate || *simulate) {
            EnsembleSpec spec = load_spec(o);
            auto tables = make_tables(resolve_code(spec.code), spec.weights);
            FactoredInput input;
            if (depol >= 0) {
                input = FactoredInput::from_pauli(depolarizing(tables->n(), depol));
            } else {
                if (o.spec_path.empty()) throw UsageError("need --spec or --depolarizing");
                if (member < 0 || member >= spec.count) throw UsageError("--id outside the ensemble");
                input = generate_channel(spec, *tables, member).input;
            }
            ConcatSpec concat = ConcatSpec::uniform(tables, spec.levels);
            if (*estimate) {
                auto report = logical_estimator(concat, {twirled_dist(input)});
                emit(o.out_path, [&](std::ostream &s) { s << to_json(report).dump(2) << '\n'; });
            } else {
                ImportanceConfig cfg = mc_config(spec, spec.seed);
                cfg.threads = spec.threads;
                cfg.average_top = average_top || spec.average_top;
                auto r = mc_logical_infidelity(concat, twirl ? FactoredInput::from_pauli(twirled_dist(input)) : input, cfg);
                emit(o.out_path, [&](std::ostream &s) { s << to_json(r).dump(2) << '\n'; });
                if (!trace_path.empty()) emit(trace_path, [&](std::ostream &s) { write_trace_csv(s, r); });
            }
        } else if (*ensemble) {
            if (o.out_path.empty()) throw UsageError("ensemble needs --out");
            EnsembleSpec spec = load_spec(o);
            auto recs = run_ensemble(spec, o.out_path);
            int64_t failed = 0;
            for (const auto &r : recs) failed += !r.error.empty();
            std::cerr << recs.size() << " records in " << o.out_path << ", " << failed << " with errors\n";
        } else if (*bins) {
            auto recs = read_records_file(in_path);
            auto rep = dispersion(recs, predictor, response, num_bins);
            emit(o.out_path, [&](std::ostream &s) { s << to_json(rep).dump(2) << '\n'; });
        } else if (*select) {
            std::vector<StabilizerCode> codes;
            std::stringstream ss(codes_arg);
            std::string name;
            while (std::getline(ss, name, ',')) codes.push_back(resolve_code(name));
            CodeSelectConfig cfg;
            cfg.etas = parse_list(etas_arg);
            cfg.infidelity = sel_infidelity;
            if (o.levels) cfg.levels = o.levels;
            if (o.samples) {
                cfg.run_mc = true;
                cfg.mc.max_samples = o.samples;
                if (o.seed) cfg.mc.seed = o.seed;
                if (!o.mode.empty()) cfg.mc.mode = parse_mode(o.mode);
                if (o.lambda0 > 0) cfg.mc.lambda0 = o.lambda0;
                if (o.threads) cfg.mc.threads = o.threads;
                cfg.mc.average_top = average_top;
            }
            auto rows = code_select(codes, cfg);
            emit(o.out_path, [&](std::ostream &s) { write_code_select_csv(s, codes, rows); });
        } else if (*nr) {
            std::ifstream in(in_path);
            if (!in) throw ValidationError("cannot open " + in_path);
            NRDataset data = read_nr_csv(in);
            auto tables = make_tables(resolve_code(code_name));
            if (data.n != tables->n()) throw ValidationError("dataset qubit count does not match the code");
            int levels = o.levels ? o.levels : 2;
            auto report = logical_estimator(ConcatSpec::uniform(tables, levels), {extrapolate_nr(data)});
            auto j = to_json(report);
            j["dataset"] = {{"n", data.n}, {"infidelity", data.infidelity}, {"K", data.entries.size()}};
            emit(o.out_path, [&](std::ostream &s) { s << j.dump(2) << '\n'; });
        }
    } catch (const CapacityError &e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return EXIT_CAPACITY;
    } catch (const ValidationError &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return EXIT_VALIDATION;
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return EXIT_VALIDATION;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE_GENERIC;
    }
    return EXIT_OK;
}
