#pragma once

#include "sda/dataset.hpp"
#include "sda/smoother.hpp"
#include "sda/trajectory.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sda {

/// Nearest-track association; ties go to the smallest index.
Assignment assign(const TrajectorySet& set, const Dataset& data);

/// (1/n) sum_i min_j |y_i - mu_j(t_i)|^2 + lambda * sum_j penalty(mu_j, s).
double objective_empirical(const TrajectorySet& set, const Dataset& data, double lambda);

/// Refits every cluster of `labels` with fit_single (n_total = data.size()).
/// A cluster with no points is reseeded as the constant equal to the observation
/// farthest from its refitted center.
TrajectorySet fit_assignment(const Assignment& labels, const Dataset& data, std::size_t k,
                             const SmootherConfig& cfg, double delta);

struct LloydStep {
    TrajectorySet set;
    Assignment assignment;  // the association the refit was computed from
};

/// One alternation: assign, then refit each cluster.
LloydStep lloyd_step(const TrajectorySet& set, const Dataset& data, const SmootherConfig& cfg);

enum class InitStrategy {
    PerturbedGlobal,  // global smoother plus k-means++ offsets drawn from residuals
    RandomPoints,     // constants at k distinct random observations
};

InitStrategy parse_init_strategy(std::string_view name);
std::string_view to_string(InitStrategy init);

struct SolveOptions {
    std::size_t k = 2;
    double delta = 1.0;
    int restarts = 4;
    std::uint64_t seed = 0;
    InitStrategy init = InitStrategy::PerturbedGlobal;
    int max_iterations = 100;
    double relative_tolerance = 1e-12;
    int threads = 1;
};

struct SolveReport {
    std::vector<double> objective_trace;  // entry 0 is the initial set
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
    int best_restart = 0;
    bool separation_ok = true;
    double min_gap = 0.0;
};

struct SolveResult {
    TrajectorySet set;
    Assignment assignment;
    SolveReport report;

    [[nodiscard]] double objective() const { return report.objective_trace.back(); }
};

/// Initial set for one restart, drawn from the stream (seed, restart).
TrajectorySet initialize(const Dataset& data, const SmootherConfig& cfg, const SolveOptions& opts,
                         int restart);

/// Approximate minimizer of the empirical objective over `opts.restarts` restarts.
/// Separation is checked after the fact and reported, never enforced.
SolveResult solve(const Dataset& data, const SmootherConfig& cfg, const SolveOptions& opts);

/// As solve(), with one restart per given initial association.
SolveResult solve_from_assignments(const Dataset& data, const SmootherConfig& cfg,
                                   const SolveOptions& opts,
                                   const std::vector<Assignment>& initial);

}  // namespace sda
