#include "sda/experiments.hpp"

#include "sda/errors.hpp"
#include "sda/parallel.hpp"
#include "sda/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace sda {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line needs >= 2 paired points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("fit_line: all x values coincide");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return fit;
}

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

Eigen::Index RateStudyConfig::effective_reference_n() const {
    if (reference_n > 0) return reference_n;
    return 16 * *std::max_element(n_grid.begin(), n_grid.end());
}

void RateStudyConfig::validate() const {
    if (n_grid.size() < 2) throw ConfigError("rate study: n_grid needs at least two sizes");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw ConfigError("rate study: n_grid must be positive and strictly increasing");
    }
    if (replicates < 3) throw ConfigError("rate study: replicates must be >= 3");
    if (effective_reference_n() <= n_grid.back())
        throw ConfigError("rate study: reference_n must exceed every n in n_grid");
    if (reference_restarts < 0) throw ConfigError("rate study: reference_restarts must be >= 0");
}

RateStudyResult run_rate_study(const MixtureModel& model, const SmootherConfig& cfg, const SolveOptions& solver,
                               const RateStudyConfig& study, int threads) {
    study.validate();

    SolveOptions ref_opts = solver;
    ref_opts.seed = stream_seed(study.base_seed, 0);
    ref_opts.threads = threads;
    if (study.reference_restarts > 0) ref_opts.restarts = study.reference_restarts;
    const Sample ref_data = sample(model, study.effective_reference_n(), ref_opts.seed);
    SolveResult ref = solve(ref_data.data, cfg, ref_opts);

    const std::size_t cells = study.n_grid.size() * static_cast<std::size_t>(study.replicates);
    std::vector<RateRow> rows(cells);
    parallel_for(cells, threads, [&](std::size_t cell) {
        const std::size_t ni = cell / static_cast<std::size_t>(study.replicates);
        const int r = static_cast<int>(cell % static_cast<std::size_t>(study.replicates));
        const Eigen::Index n = study.n_grid[ni];
        SolveOptions opts = solver;
        opts.threads = 1;
        opts.seed = stream_seed(stream_seed(study.base_seed, ni + 1), static_cast<std::uint64_t>(r));
        const Sample draw = sample(model, n, opts.seed);
        const SolveResult fit = solve(draw.data, cfg, opts);
        rows[cell] = {n,
                      r,
                      hs_distance(fit.set, ref.set),
                      fit.objective(),
                      fit.report.iterations,
                      fit.report.converged,
                      fit.report.separation_ok,
                      fit.report.min_gap};
    });

    RateStudyResult result{ref.set, ref.report, std::move(rows), {}, {}};
    std::vector<double> log_n;
    std::vector<double> log_e;
    for (std::size_t ni = 0; ni < study.n_grid.size(); ++ni) {
        std::vector<double> errors;
        for (int r = 0; r < study.replicates; ++r)
            errors.push_back(result.rows[ni * static_cast<std::size_t>(study.replicates) + static_cast<std::size_t>(r)].error);
        const double med = median(errors);
        result.median_error.push_back(med);
        log_n.push_back(std::log(static_cast<double>(study.n_grid[ni])));
        log_e.push_back(std::log(med));
    }
    result.fit = fit_line(log_n, log_e);
    return result;
}

TrajectorySet random_direction(const TrajectorySet& like, std::uint64_t seed) {
    SplitMix64 rng(stream_seed(seed, 0x5EED));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<GridTrajectory> tracks;
    for (std::size_t j = 0; j < like.size(); ++j) {
        Eigen::MatrixXd v(like.nodes(), like.dim());
        for (Eigen::Index c = 0; c < like.dim(); ++c) {
            double coef[5];
            for (int q = 0; q < 5; ++q) coef[q] = normal(rng) / ((1.0 + q) * (1.0 + q));
            for (Eigen::Index g = 0; g < like.nodes(); ++g) {
                const double t = like[j].node_time(g);
                double f = coef[4] * t;
                for (int q = 0; q < 4; ++q) f += coef[q] * std::cos(q * std::numbers::pi * t);
                v(g, c) = f;
            }
        }
        tracks.emplace_back(std::move(v));
    }
    TrajectorySet dir = like.with_tracks(std::move(tracks));
    double norm = 0.0;
    for (const auto& t : dir.tracks()) norm += sobolev_norms(t, dir.order()).hs;
    std::vector<GridTrajectory> scaled;
    for (const auto& t : dir.tracks()) scaled.push_back((1.0 / norm) * t);
    return dir.with_tracks(std::move(scaled));
}

TrajectorySet grad_check_point(const MixtureModel& model, int order, Eigen::Index nodes, double perturbation,
                               std::uint64_t seed) {
    std::vector<GridTrajectory> tracks;
    for (const auto& truth : model.truth.tracks()) {
        tracks.push_back(truth.nodes() == nodes
                             ? truth
                             : GridTrajectory::sampled(nodes, truth.dim(), [&truth](double t) { return eval(truth, t); }));
    }
    const TrajectorySet base(std::move(tracks), order, model.truth.delta());
    const TrajectorySet offset = random_direction(base, stream_seed(seed, 0xB1A5));
    std::vector<GridTrajectory> moved;
    for (std::size_t j = 0; j < base.size(); ++j) moved.push_back(base[j] + perturbation * offset[j]);
    return base.with_tracks(std::move(moved));
}

double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

GradCheckResult compare_derivatives(const TrajectorySet& at, const std::vector<TrajectorySet>& directions,
                                    const MixtureModel& model, const QuadratureSpec& quad, double lambda,
                                    double step) {
    GradCheckResult out;
    for (const auto& dir : directions) {
        std::vector<GridTrajectory> plus;
        std::vector<GridTrajectory> minus;
        for (std::size_t j = 0; j < at.size(); ++j) {
            plus.push_back(at[j] + step * dir[j]);
            minus.push_back(at[j] - step * dir[j]);
        }
        const double analytic = gateaux_derivative(at, dir, model, quad, lambda);
        const double numeric = (objective_population(at.with_tracks(std::move(plus)), model, quad, lambda) -
                                objective_population(at.with_tracks(std::move(minus)), model, quad, lambda)) /
                               (2.0 * step);
        out.analytic.push_back(analytic);
        out.numeric.push_back(numeric);
        out.relative_error.push_back(relative_difference(analytic, numeric));
        out.max_relative_error = std::max(out.max_relative_error, out.relative_error.back());
    }
    return out;
}

GradCheckResult run_grad_check(const TrajectorySet& at, const MixtureModel& model, const QuadratureSpec& quad,
                               double lambda, const GradCheckConfig& cfg) {
    if (cfg.directions < 1) throw ConfigError("grad check: directions must be >= 1");
    if (!(cfg.step > 0.0)) throw ConfigError("grad check: step must be > 0");
    std::vector<TrajectorySet> dirs;
    for (int i = 0; i < cfg.directions; ++i)
        dirs.push_back(random_direction(at, stream_seed(cfg.seed, static_cast<std::uint64_t>(i))));
    return compare_derivatives(at, dirs, model, quad, lambda, cfg.step);
}

GammaCheckResult run_gamma_check(const TrajectorySet& at, const MixtureModel& model, const QuadratureSpec& quad,
                                 double lambda, const GammaCheckConfig& cfg, int threads) {
    if (cfg.n_grid.size() < 2) throw ConfigError("gamma check: n_grid needs at least two sizes");
    if (cfg.replicates < 2) throw ConfigError("gamma check: replicates must be >= 2");

    GammaCheckResult out;
    out.population = objective_population(at, model, quad, lambda);
    const auto reps = static_cast<std::size_t>(cfg.replicates);
    out.rows.resize(cfg.n_grid.size() * reps);
    parallel_for(out.rows.size(), threads, [&](std::size_t cell) {
        const std::size_t ni = cell / reps;
        const auto r = static_cast<int>(cell % reps);
        const Eigen::Index n = cfg.n_grid[ni];
        const Sample draw = sample(model, n, stream_seed(stream_seed(cfg.seed, ni), static_cast<std::uint64_t>(r)));
        const double fn = objective_empirical(at, draw.data, lambda);
        out.rows[cell] = {n, r, fn, std::abs(fn - out.population),
                          std::sqrt(static_cast<double>(n)) * (fn - out.population)};
    });

    std::vector<double> log_n;
    std::vector<double> log_rms;
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        double sq = 0.0;
        double mean = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const GammaRow& row = out.rows[ni * reps + r];
            sq += row.abs_error * row.abs_error;
            mean += row.yn;
        }
        mean /= static_cast<double>(reps);
        double var = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double dev = out.rows[ni * reps + r].yn - mean;
            var += dev * dev;
        }
        out.rms_error.push_back(std::sqrt(sq / static_cast<double>(reps)));
        out.yn_mean.push_back(mean);
        out.yn_sd.push_back(std::sqrt(var / static_cast<double>(reps - 1)));
        log_n.push_back(std::log(static_cast<double>(cfg.n_grid[ni])));
        log_rms.push_back(std::log(out.rms_error.back()));
    }
    out.fit = fit_line(log_n, log_rms);
    return out;
}

}  // namespace sda
