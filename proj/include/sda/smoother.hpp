#pragma once

#include "sda/banded.hpp"
#include "sda/trajectory.hpp"

#include <Eigen/Core>

namespace sda {

struct SmootherConfig {
    int order = 2;            // penalty order s
    double lambda = 1e-3;     // regularization weight, > 0
    Eigen::Index nodes = 201; // grid size m
    double ridge = 1e-12;     // added to the diagonal of the normal equations

    void validate() const;
};

/// Observations restricted to one cluster: times in [0, 1] and targets in R^d (one row each).
struct WeightedPoints {
    Eigen::VectorXd times;
    Eigen::MatrixXd targets;

    [[nodiscard]] Eigen::Index count() const { return times.size(); }
    [[nodiscard]] Eigen::Index dim() const { return targets.cols(); }
    void validate() const;
};

/// (A^T A / n_total + lambda L + ridge I) c = A^T Y / n_total in banded form. fit_single
/// solves the same system through a QR factorization of the stacked rows instead.
struct NormalEquations {
    BandedSymmetricMatrix matrix;
    Eigen::MatrixXd rhs;  // m x d
};

NormalEquations normal_equations(const WeightedPoints& points, Eigen::Index n_total,
                                 const SmootherConfig& cfg);

/// Grid minimizer of (1/n_total) sum_i |y_i - mu(t_i)|^2 + lambda * penalty(mu, s).
///
/// Scaling by the full sample size n_total (not the cluster size) makes the
/// per-cluster objectives add up to the k-track empirical objective. Throws
/// EmptyCluster when there are no points.
GridTrajectory fit_single(const WeightedPoints& points, Eigen::Index n_total,
                          const SmootherConfig& cfg);

/// The quantity fit_single minimizes, evaluated at an arbitrary trajectory.
double single_objective(const GridTrajectory& traj, const WeightedPoints& points,
                        Eigen::Index n_total, const SmootherConfig& cfg);

/// Least-squares fit over grid samples of the basis {t^i / i!, i < s}, evaluated
/// at the data times by linear interpolation as every grid trajectory is. This is
/// the lambda -> infinity limit of fit_single; for s <= 2 it is the ordinary
/// least-squares polynomial.
GridTrajectory polynomial_limit_fit(const WeightedPoints& points, int order, Eigen::Index nodes);

}  // namespace sda
