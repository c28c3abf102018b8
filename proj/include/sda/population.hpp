#pragma once

#include "sda/dataset.hpp"
#include "sda/synth.hpp"
#include "sda/trajectory.hpp"

#include <cstdint>

namespace sda {

/// Quadrature for integrals against phi_Y(y|t) phi_T(t).
///
/// Time: composite Gauss-Legendre with t_nodes points on every cell between
/// consecutive grid nodes, so piecewise-linear tracks are integrated without
/// kink error. Noise: tensor-product Gauss-Legendre with y_nodes points per
/// coordinate on [-R, R]^d around each true track, where R is the truncation
/// radius of the noise (0 selects it automatically). Student-t noise is
/// integrated in the variable asinh(eps / scale).
struct QuadratureSpec {
    int t_nodes = 8;
    int y_nodes = 48;
    double y_radius = 0.0;
    // Dimensions above 3 fall back to Monte Carlo.
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t mc_seed = 0;

    void validate() const;
};

/// Noise mass outside [-R, R]^d must stay below this.
inline constexpr double kTruncationMass = 1e-10;

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Population objective: integral of min_j |y - mu_j(t)|^2 against the data
/// density, plus lambda * sum_j penalty(mu_j, s). lambda >= 0.
double objective_population(const TrajectorySet& set, const MixtureModel& model, const QuadratureSpec& quad,
                            double lambda);

/// Monte-Carlo estimate of objective_population with its standard error.
MonteCarloEstimate objective_population_mc(const TrajectorySet& set, const MixtureModel& model,
                                           std::uint64_t samples, std::uint64_t seed, double lambda);

/// Directional derivative of objective_population at `set` along `direction`:
/// 2 E[(mu_j(t) - y) . nu_j(t)] with j the nearest track (smallest index on
/// ties), plus 2 lambda sum_j <D^s nu_j, D^s mu_j>.
double gateaux_derivative(const TrajectorySet& set, const TrajectorySet& direction, const MixtureModel& model,
                          const QuadratureSpec& quad, double lambda);

/// sqrt(n) * (objective_empirical - objective_population).
double yn_statistic(const TrajectorySet& set, const Dataset& data, const MixtureModel& model,
                    const QuadratureSpec& quad, double lambda);

}  // namespace sda
