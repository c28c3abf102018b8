// sda: generate data, fit trajectory sets and run the convergence experiments.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include "sda/config.hpp"
#include "sda/errors.hpp"
#include "sda/experiments.hpp"
#include "sda/io.hpp"
#include "sda/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using nlohmann::ordered_json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    int threads = sda::default_thread_count();
    bool strict = false;
};

sda::RunConfig load(const Common& common) {
    std::vector<std::string> warnings;
    sda::RunConfig cfg = sda::load_config(common.config_path, common.strict, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (common.seed) cfg.set_seed(*common.seed);
    cfg.solver.threads = common.threads;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sda::DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw sda::DataError("failed writing '" + path + "'");
}

void emit_json(const std::string& path, const ordered_json& doc) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

int cmd_generate(const Common& common) {
    const sda::RunConfig cfg = load(common);
    const sda::MixtureModel model = cfg.require_model().build(cfg.smoother.order);
    const sda::Sample draw = sda::sample(model, cfg.n, cfg.seed);

    std::ostringstream csv;
    sda::write_dataset_csv(csv, draw.data, &draw.labels);
    write_text(common.out_path, csv.str());

    ordered_json meta;
    meta["seed"] = cfg.seed;
    meta["model_hash"] = hex(sda::fnv1a(cfg.source));
    meta["n"] = cfg.n;
    meta["d"] = model.dim();
    meta["k"] = model.size();
    emit_json(common.out_path + ".meta.json", meta);
    return 0;
}

int cmd_fit(const Common& common, const std::string& data_path) {
    const sda::RunConfig cfg = load(common);
    const sda::DatasetFile file = sda::read_dataset_csv(data_path);
    const sda::SolveResult fit = sda::solve(file.data, cfg.smoother, cfg.solver);

    std::ostringstream tracks;
    sda::write_trajectory_csv(tracks, fit.set);
    write_text(common.out_path, tracks.str());

    ordered_json report;
    report["n"] = file.data.size();
    report["d"] = file.data.dim();
    report["k"] = fit.set.size();
    report["lambda"] = cfg.smoother.lambda;
    report["order"] = cfg.smoother.order;
    report["nodes"] = cfg.smoother.nodes;
    report["seed"] = cfg.solver.seed;
    report["init"] = std::string(sda::to_string(cfg.solver.init));
    report["objective"] = fit.objective();
    report["objective_trace"] = fit.report.objective_trace;
    report["iterations"] = fit.report.iterations;
    report["converged"] = fit.report.converged;
    report["restarts_used"] = fit.report.restarts_used;
    report["best_restart"] = fit.report.best_restart;
    report["delta"] = cfg.solver.delta;
    report["min_gap"] = finite_or_null(fit.report.min_gap);
    report["separation_ok"] = fit.report.separation_ok;
    emit_json(common.out_path + ".report.json", report);
    return 0;
}

int cmd_rate_study(const Common& common) {
    const sda::RunConfig cfg = load(common);
    const sda::MixtureModel model = cfg.require_model().build(cfg.smoother.order);
    const sda::RateStudyResult res =
        sda::run_rate_study(model, cfg.smoother, cfg.solver, cfg.rate_study, common.threads);

    std::string csv = "n,replicate,error,objective,iterations,converged,separation_ok,min_gap\n";
    int flagged = 0;
    for (const auto& row : res.rows) {
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", row.n, row.replicate, sda::format_double(row.error),
                           sda::format_double(row.objective), row.iterations, row.converged ? 1 : 0,
                           row.separation_ok ? 1 : 0, sda::format_double(row.min_gap));
        if (!row.separation_ok) ++flagged;
    }
    write_text(common.out_path, csv);

    ordered_json summary;
    summary["slope"] = res.fit.slope;
    summary["slope_se"] = res.fit.slope_se;
    summary["intercept"] = res.fit.intercept;
    summary["reference_n"] = cfg.rate_study.effective_reference_n();
    summary["reference_objective"] = res.reference_report.objective_trace.back();
    summary["replicates"] = cfg.rate_study.replicates;
    summary["separation_flagged"] = flagged;
    bool positive = true;
    for (const auto& row : res.rows) positive = positive && row.error > 0.0;
    bool decreasing = true;
    for (std::size_t i = 1; i < res.median_error.size(); ++i)
        decreasing = decreasing && res.median_error[i] < res.median_error[i - 1];
    summary["errors_positive"] = positive;
    summary["medians_decreasing"] = decreasing;
    ordered_json medians = ordered_json::array();
    for (std::size_t i = 0; i < res.median_error.size(); ++i)
        medians.push_back({{"n", cfg.rate_study.n_grid[i]}, {"median_error", res.median_error[i]}});
    summary["medians"] = medians;
    emit_json(common.out_path + ".summary.json", summary);
    return 0;
}

int cmd_grad_check(const Common& common) {
    const sda::RunConfig cfg = load(common);
    const sda::MixtureModel model = cfg.require_model().build(cfg.smoother.order);
    const sda::TrajectorySet at = sda::grad_check_point(model, cfg.smoother.order, cfg.smoother.nodes,
                                                        cfg.grad_check.perturbation, cfg.grad_check.seed);
    const sda::GradCheckResult res =
        sda::run_grad_check(at, model, cfg.quadrature, cfg.smoother.lambda, cfg.grad_check);

    ordered_json report;
    report["lambda"] = cfg.smoother.lambda;
    report["step"] = cfg.grad_check.step;
    report["max_relative_error"] = res.max_relative_error;
    ordered_json dirs = ordered_json::array();
    for (std::size_t i = 0; i < res.analytic.size(); ++i) {
        dirs.push_back({{"analytic", res.analytic[i]},
                        {"numeric", res.numeric[i]},
                        {"relative_error", res.relative_error[i]}});
    }
    report["directions"] = dirs;
    emit_json(common.out_path, report);
    return 0;
}

int cmd_gamma_check(const Common& common) {
    const sda::RunConfig cfg = load(common);
    const sda::MixtureModel model = cfg.require_model().build(cfg.smoother.order);
    const sda::TrajectorySet at =
        sda::grad_check_point(model, cfg.smoother.order, cfg.smoother.nodes, 0.0, cfg.seed);
    const sda::GammaCheckResult res = sda::run_gamma_check(at, model, cfg.quadrature, cfg.smoother.lambda,
                                                           cfg.gamma_check, common.threads);

    ordered_json report;
    report["population_objective"] = res.population;
    report["slope"] = res.fit.slope;
    report["slope_se"] = res.fit.slope_se;
    ordered_json per_n = ordered_json::array();
    for (std::size_t i = 0; i < res.rms_error.size(); ++i) {
        per_n.push_back({{"n", cfg.gamma_check.n_grid[i]},
                         {"rms_error", res.rms_error[i]},
                         {"yn_mean", res.yn_mean[i]},
                         {"yn_sd", res.yn_sd[i]}});
    }
    report["per_n"] = per_n;
    ordered_json rows = ordered_json::array();
    for (const auto& row : res.rows)
        rows.push_back({{"n", row.n}, {"replicate", row.replicate}, {"abs_error", row.abs_error}});
    report["replicates"] = rows;
    emit_json(common.out_path, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothing-data-association estimator: k trajectory centers from unlabeled observations"};
    app.require_subcommand(1);

    Common common;
    std::string data_path;
    auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", common.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        auto* out = sub->add_option("--out", common.out_path, "output file");
        if (out_required) out->required();
        sub->add_option("--seed", common.seed, "override the config seed");
        sub->add_option("--threads", common.threads, "worker threads (default: $SDA_THREADS or 1)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--strict", common.strict, "treat unknown config keys as errors");
    };

    auto* generate = app.add_subcommand("generate", "sample a dataset from the configured model");
    add_common(generate, true);
    auto* fit = app.add_subcommand("fit", "fit k trajectories to a dataset");
    add_common(fit, true);
    fit->add_option("--data", data_path, "dataset CSV (t,y1..yd[,label])")->required()->check(CLI::ExistingFile);
    auto* rate = app.add_subcommand("rate-study", "estimate the convergence rate of the fitted tracks");
    add_common(rate, true);
    auto* grad = app.add_subcommand("grad-check", "compare analytic and finite-difference derivatives");
    add_common(grad, false);
    auto* gamma = app.add_subcommand("gamma-check", "compare empirical and population objectives");
    add_common(gamma, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (generate->parsed()) return cmd_generate(common);
        if (fit->parsed()) return cmd_fit(common, data_path);
        if (rate->parsed()) return cmd_rate_study(common);
        if (grad->parsed()) return cmd_grad_check(common);
        if (gamma->parsed()) return cmd_gamma_check(common);
    } catch (const sda::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const sda::QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const sda::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
