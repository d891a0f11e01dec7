// SPDX-License-Identifier: Apache-2.0
#pragma once

//
// asf-lab command line: check, sweep, scale-study, oracle, report.
//
// Results go to stdout as JSON (or to the declared files); diagnostics go to
// stderr. Exit codes: 0 success (any verdict), 2 incommensurate parameters,
// 3 configuration error, 4 I/O error.
//

#include <asflab/sweep.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace asflab::cli {

enum ExitCode : int { ok = 0, incommensurate = 2, config_error = 3, io_error = 4 };

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const auto& tok : asflab::detail::split(text, ',')) {
        double x = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw SpecError(flag + ": '" + tok + "' is not a number");
        out.push_back(x);
    }
    return out;
}

inline GaborTriple parse_triple(const std::string& text, const std::string& flag) {
    const auto v = parse_list(text, flag);
    if (v.size() != 3) throw SpecError(flag + " expects three comma-separated values");
    return {v[0], v[1], v[2]};
}

struct ModelFlags {
    double period = 0.0;
    std::optional<double> grid_res;
    std::optional<std::int64_t> size;

    void add_to(CLI::App& app) {
        app.add_option("--period", period, "Model period (Lambda)")->required();
        auto* res = app.add_option("--grid-res", grid_res, "Grid spacing h");
        auto* sz = app.add_option("--size", size, "Grid size L (alternative to --grid-res)");
        res->excludes(sz);
    }

    double spacing() const {
        if (grid_res) return *grid_res;
        if (size) {
            if (*size < 1) throw SpecError("--size must be positive");
            return period / static_cast<double>(*size);
        }
        throw SpecError("one of --grid-res or --size is required");
    }
};

struct ToleranceFlags {
    std::uint64_t seed = 0;
    double eps_sing = Tolerances{}.eps_sing;
    double kappa_max = Tolerances{}.kappa_max;

    void add_to(CLI::App& app) {
        app.add_option("--seed", seed, "Seed for estimator start vectors")->capture_default_str();
        app.add_option("--eps-sing", eps_sing, "Relative lower/upper cutoff for NOT_ASF")->capture_default_str();
        app.add_option("--kappa-max", kappa_max, "Condition cap for ASF")->capture_default_str();
    }

    Tolerances tolerances() const {
        Tolerances t;
        t.eps_sing = eps_sing;
        t.kappa_max = kappa_max;
        t.estimator.seed = seed;
        return t;
    }
};

inline void emit_json(const nlohmann::json& j, std::ostream& out, const std::optional<std::string>& path) {
    const auto text = j.dump(2) + "\n";
    out << text;
    if (path) write_file_atomic(*path, text);
}

inline int default_workers() {
    if (const char* env = std::getenv("ASF_LAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

} // namespace detail

/// Runs one invocation. argv[0] is the program name.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"asf-lab: approximate Schauder frame laboratory for Gabor families on cyclic models"};
    app.name("asf-lab");
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "Classify one (a,b,c | alpha,beta,rho, p) tuple; prints a JSON verdict");
    double check_p = 0.0;
    std::string check_synth, check_anal;
    std::optional<std::string> check_json;
    detail::ModelFlags check_model;
    detail::ToleranceFlags check_tol;
    check->add_option("--p", check_p, "Lebesgue exponent, 1 < p < inf")->required();
    check->add_option("--synth", check_synth, "Synthesis triple a,b,c")->required();
    check->add_option("--anal", check_anal, "Analysis triple alpha,beta,rho (default: same as --synth)");
    check_model.add_to(*check);
    check_tol.add_to(*check);
    check->add_option("--json", check_json, "Also write the JSON verdict to this file");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid sweep; writes a CSV result table");
    std::string sweep_spec, sweep_out;
    int sweep_workers = detail::default_workers();
    bool sweep_resume = false;
    bool sweep_timing = false;
    std::size_t sweep_checkpoint = 0;
    sweep->add_option("--spec", sweep_spec, "Sweep spec (JSON)")->required();
    sweep->add_option("--out", sweep_out, "Output CSV path")->required();
    sweep->add_option("--workers", sweep_workers, "Worker threads (default: $ASF_LAB_THREADS or 1)");
    sweep->add_flag("--resume", sweep_resume, "Complete an existing --out table instead of starting over");
    sweep->add_flag("--timing", sweep_timing, "Record per-row wall time in the ms column");
    sweep->add_option("--checkpoint", sweep_checkpoint, "Rewrite --out every N completed rows (0: only at the end)");

    // scale-study
    auto* scale = app.add_subcommand("scale-study", "Refine the grid over --sizes and report the bound trend as JSON");
    double scale_p = 0.0, scale_period = 0.0;
    std::string scale_synth, scale_anal, scale_sizes;
    std::optional<std::string> scale_json;
    detail::ToleranceFlags scale_tol;
    scale->add_option("--p", scale_p, "Lebesgue exponent, 1 < p < inf")->required();
    scale->add_option("--synth", scale_synth, "Synthesis triple a,b,c")->required();
    scale->add_option("--anal", scale_anal, "Analysis triple alpha,beta,rho (default: same as --synth)");
    scale->add_option("--period", scale_period, "Model period (Lambda)")->required();
    scale->add_option("--sizes", scale_sizes, "Increasing grid sizes, e.g. 16,32,64")->required();
    scale_tol.add_to(*scale);
    scale->add_option("--json", scale_json, "Also write the JSON study to this file");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Painless covering-count oracle for chi windows (c <= 1/b)");
    std::string oracle_synth;
    std::optional<std::string> oracle_json;
    detail::ModelFlags oracle_model;
    oracle->add_option("--synth", oracle_synth, "Synthesis triple a,b,c")->required();
    oracle_model.add_to(*oracle);
    oracle->add_option("--json", oracle_json, "Also write the JSON result to this file");

    // report
    auto* report = app.add_subcommand("report", "Render a PGM heatmap from a sweep CSV");
    std::string report_in, report_out, report_x, report_y, report_metric = "classification";
    std::vector<std::string> report_fix;
    double report_cap = Tolerances{}.kappa_max;
    report->add_option("--in", report_in, "Sweep CSV")->required();
    report->add_option("--x", report_x, "Horizontal axis (a, b, c, alpha, beta, rho, p)")->required();
    report->add_option("--y", report_y, "Vertical axis, increasing downward")->required();
    report->add_option("--metric", report_metric, "classification | condition")
        ->check(CLI::IsMember({"classification", "condition"}))
        ->capture_default_str();
    report->add_option("--fix", report_fix, "Pin another axis, name=value (repeatable)");
    report->add_option("--cap", report_cap, "Condition value mapped to 255")->capture_default_str();
    report->add_option("--out", report_out, "Output PGM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    try {
        if (*check) {
            const auto synth = detail::parse_triple(check_synth, "--synth");
            const auto anal = check_anal.empty() ? synth : detail::parse_triple(check_anal, "--anal");
            conjugate_exponent(check_p);
            const auto model = build_cyclic_model(synth, anal, check_model.spacing(), check_model.period);
            const auto pair = indicator_pair(model, synth.win_len, anal.win_len);
            const auto v = asf_verdict(pair, check_p, check_tol.tolerances());
            detail::emit_json(to_json(v), out, check_json);
        } else if (*sweep) {
            auto spec = load_sweep_spec(sweep_spec);
            if (sweep_timing) spec.timing = true;
            std::optional<ResultTable> partial;
            if (sweep_resume && std::filesystem::exists(sweep_out)) {
                partial = parse_csv(read_file(sweep_out));
                err << "resuming: " << partial->rows.size() << " of " << spec.grid_size() << " rows present\n";
            }
            ResultTable progress{spec_hash(spec), partial ? partial->rows : std::vector<ResultRow>{}};
            std::size_t since = 0;
            RowCallback on_row = [&](const ResultRow& row) {
                progress.rows.push_back(row);
                if (sweep_checkpoint > 0 && ++since >= sweep_checkpoint) {
                    write_file_atomic(sweep_out, to_csv(progress));
                    since = 0;
                }
            };
            const auto table = partial ? resume_sweep(spec, *partial, sweep_workers, on_row)
                                       : run_sweep(spec, sweep_workers, on_row);
            write_file_atomic(sweep_out, to_csv(table));
            err << "wrote " << table.rows.size() << " rows to " << sweep_out << "\n";
        } else if (*scale) {
            const auto synth = detail::parse_triple(scale_synth, "--synth");
            const auto anal = scale_anal.empty() ? synth : detail::parse_triple(scale_anal, "--anal");
            std::vector<std::int64_t> sizes;
            for (double s : detail::parse_list(scale_sizes, "--sizes")) {
                const auto n = as_integer(s);
                if (!n || *n < 1) throw SpecError("--sizes entries must be positive integers");
                sizes.push_back(*n);
            }
            const auto study = scale_study(synth, anal, scale_period, scale_p, sizes, scale_tol.tolerances());
            detail::emit_json(to_json(study), out, scale_json);
        } else if (*oracle) {
            const auto synth = detail::parse_triple(oracle_synth, "--synth");
            const auto model = build_cyclic_model(synth, synth, oracle_model.spacing(), oracle_model.period);
            const auto res = painless_oracle(synth.shift, synth.mod_step, synth.win_len, model);
            const Eigen::VectorXd G = res.covering.values().real();
            std::vector<double> counts(G.data(), G.data() + G.size());
            const nlohmann::json j = {
                {"covering", {{"min", G.minCoeff()}, {"max", G.maxCoeff()}, {"values", counts}}},
                {"bounds", {{"lower", res.bounds.lower}, {"upper", res.bounds.upper}}},
                {"prediction", res.bounds.lower > 0 ? "ASF" : "NOT_ASF"}};
            detail::emit_json(j, out, oracle_json);
        } else if (*report) {
            std::map<std::string, double> fixed;
            for (const auto& f : report_fix) {
                const auto eq = f.find('=');
                if (eq == std::string::npos) throw SpecError("--fix expects name=value, got '" + f + "'");
                const auto vals = detail::parse_list(f.substr(eq + 1), "--fix");
                if (vals.size() != 1) throw SpecError("--fix expects a single value");
                fixed[f.substr(0, eq)] = vals.front();
            }
            const auto table = parse_csv(read_file(report_in));
            const auto metric =
                report_metric == "condition" ? HeatmapMetric::Condition : HeatmapMetric::Classification;
            const auto img = emit_heatmap(table, report_x, report_y, metric, fixed, report_cap);
            write_file_atomic(report_out, img.encode());
            err << "wrote " << img.width << "x" << img.height << " heatmap to " << report_out << "\n";
        }
    } catch (const IncommensurateParameters& e) {
        err << "error: incommensurate parameters: " << e.what() << "\n";
        return incommensurate;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return io_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}

} // namespace asflab::cli
