#pragma once

#include "sda/population.hpp"
#include "sda/solver.hpp"
#include "sda/synth.hpp"

#include <cstdint>
#include <vector>

namespace sda {

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> values);

// ---- convergence rate of the estimator -------------------------------------

struct RateStudyConfig {
    std::vector<Eigen::Index> n_grid = {128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    int replicates = 20;
    Eigen::Index reference_n = 0;  // 0 selects 16 * max(n_grid)
    int reference_restarts = 0;    // 0 reuses the solver's restart count
    std::uint64_t base_seed = 0;

    [[nodiscard]] Eigen::Index effective_reference_n() const;
    void validate() const;
};

struct RateRow {
    Eigen::Index n = 0;
    int replicate = 0;
    double error = 0.0;  // hs_distance to the reference fit
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool separation_ok = true;
    double min_gap = 0.0;
};

struct RateStudyResult {
    TrajectorySet reference;
    SolveReport reference_report;
    std::vector<RateRow> rows;         // ordered by (n, replicate)
    std::vector<double> median_error;  // one per n_grid entry
    LineFit fit;                       // log median error vs log n
};

/// Fits a reference at reference_n, then every (n, replicate) cell, and
/// regresses log median error on log n. Cells run on `threads` workers;
/// output order is fixed.
RateStudyResult run_rate_study(const MixtureModel& model, const SmootherConfig& cfg, const SolveOptions& solver,
                               const RateStudyConfig& study, int threads);

// ---- analytic vs finite-difference derivative --------------------------------

struct GradCheckConfig {
    int directions = 20;
    double step = 1e-4;
    double perturbation = 0.1;  // size of the smooth offset from the truth
    std::uint64_t seed = 0;
};

struct GradCheckResult {
    std::vector<double> analytic;
    std::vector<double> numeric;
    std::vector<double> relative_error;
    double max_relative_error = 0.0;
};

/// Smooth random set shaped like `like`, scaled to unit total H^s norm.
TrajectorySet random_direction(const TrajectorySet& like, std::uint64_t seed);

/// Point where grad-check evaluates: truth plus `perturbation` times a random direction.
TrajectorySet grad_check_point(const MixtureModel& model, int order, Eigen::Index nodes, double perturbation,
                               std::uint64_t seed);

/// |a - b| / max(|a|, |b|), and 0 when both vanish.
double relative_difference(double a, double b);

GradCheckResult run_grad_check(const TrajectorySet& at, const MixtureModel& model, const QuadratureSpec& quad,
                               double lambda, const GradCheckConfig& cfg);

/// Compares the analytic derivative against the central difference along given directions.
GradCheckResult compare_derivatives(const TrajectorySet& at, const std::vector<TrajectorySet>& directions,
                                    const MixtureModel& model, const QuadratureSpec& quad, double lambda,
                                    double step);

// ---- empirical to population objective --------------------------------------

struct GammaCheckConfig {
    std::vector<Eigen::Index> n_grid = {100, 200, 400, 800, 1600, 3200, 6400, 12800, 25600, 51200, 102400};
    int replicates = 50;
    std::uint64_t seed = 0;
};

struct GammaRow {
    Eigen::Index n = 0;
    int replicate = 0;
    double empirical = 0.0;
    double abs_error = 0.0;
    double yn = 0.0;
};

struct GammaCheckResult {
    double population = 0.0;
    std::vector<GammaRow> rows;
    std::vector<double> rms_error;  // per n
    std::vector<double> yn_sd;      // sample SD of Y_n per n
    std::vector<double> yn_mean;
    LineFit fit;  // log RMS error vs log n
};

/// For a fixed set, draws `replicates` datasets per n and compares the
/// empirical objective with its population counterpart.
GammaCheckResult run_gamma_check(const TrajectorySet& at, const MixtureModel& model, const QuadratureSpec& quad,
                                 double lambda, const GammaCheckConfig& cfg, int threads);

}  // namespace sda
