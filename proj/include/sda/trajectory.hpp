#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <vector>

namespace sda {

/// A trajectory center sampled on the uniform grid t_g = g / (m - 1), g = 0..m-1.
///
/// Row g of values() is the point in R^d at t_g. Between nodes the trajectory is
/// the piecewise-linear interpolant of the rows.
class GridTrajectory {
public:
    GridTrajectory() = default;
    explicit GridTrajectory(Eigen::MatrixXd values);

    static GridTrajectory constant(Eigen::Index m, const Eigen::VectorXd& value);
    static GridTrajectory sampled(Eigen::Index m, Eigen::Index d,
                                  const std::function<Eigen::VectorXd(double)>& f);

    [[nodiscard]] Eigen::Index nodes() const { return values_.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return values_.cols(); }
    [[nodiscard]] double spacing() const { return 1.0 / static_cast<double>(nodes() - 1); }
    [[nodiscard]] double node_time(Eigen::Index g) const {
        return static_cast<double>(g) / static_cast<double>(nodes() - 1);
    }
    [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }

    GridTrajectory& operator+=(const GridTrajectory& other);
    GridTrajectory& operator-=(const GridTrajectory& other);
    GridTrajectory& operator*=(double alpha);

    friend GridTrajectory operator+(GridTrajectory a, const GridTrajectory& b) { return a += b; }
    friend GridTrajectory operator-(GridTrajectory a, const GridTrajectory& b) { return a -= b; }
    friend GridTrajectory operator*(double alpha, GridTrajectory a) { return a *= alpha; }

private:
    Eigen::MatrixXd values_;
};

/// Value at time t in [0, 1]; throws DomainError otherwise. Grid nodes are
/// reproduced exactly.
Eigen::VectorXd eval(const GridTrajectory& traj, double t);

/// Locates t on the grid: t lies in cell [t_cell, t_cell+1] at fraction `weight`.
struct GridLocation {
    Eigen::Index cell = 0;
    double weight = 0.0;
};
GridLocation locate(Eigen::Index nodes, double t);

/// Scaled s-th forward differences D^s v, one row per admissible node (m - s rows).
Eigen::MatrixXd scaled_differences(const GridTrajectory& traj, int s);

/// Riemann approximation of the integrated squared s-th derivative:
/// dt * sum_g |D^s v|_g^2.
double penalty(const GridTrajectory& traj, int s);

/// The bilinear form behind penalty(): dt * sum_g <D^s a, D^s b>_g.
double penalty_inner(const GridTrajectory& a, const GridTrajectory& b, int s);

/// Norm on the polynomial part: sum_{i<s} |v^(i)(0)| / i!, with the derivatives
/// at 0 taken from the interpolating polynomial through the first s+1 nodes.
double h0_norm(const GridTrajectory& traj, int s);

struct SobolevNorms {
    double h0 = 0.0;
    double h1 = 0.0;  // sqrt(penalty)
    double hs = 0.0;  // h0 + h1
};
SobolevNorms sobolev_norms(const GridTrajectory& traj, int s);

/// k trajectories on a shared grid, together with the penalty order s and the
/// separation parameter delta.
class TrajectorySet {
public:
    TrajectorySet(std::vector<GridTrajectory> tracks, int order, double delta);

    [[nodiscard]] std::size_t size() const { return tracks_.size(); }
    [[nodiscard]] Eigen::Index nodes() const { return tracks_.front().nodes(); }
    [[nodiscard]] Eigen::Index dim() const { return tracks_.front().dim(); }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] double delta() const { return delta_; }

    [[nodiscard]] const GridTrajectory& operator[](std::size_t j) const { return tracks_[j]; }
    [[nodiscard]] const std::vector<GridTrajectory>& tracks() const { return tracks_; }

    /// Same order and delta, different tracks.
    [[nodiscard]] TrajectorySet with_tracks(std::vector<GridTrajectory> tracks) const {
        return {std::move(tracks), order_, delta_};
    }

private:
    std::vector<GridTrajectory> tracks_;
    int order_ = 1;
    double delta_ = 1.0;
};

/// Sum over tracks of the H^s norm of a_j - b_rho(j), minimized over all label
/// permutations rho.
double hs_distance(const TrajectorySet& a, const TrajectorySet& b);

struct SeparationResult {
    bool ok = true;
    double min_gap = std::numeric_limits<double>::infinity();
};

/// Smallest pairwise distance between tracks over the grid nodes, compared with delta.
SeparationResult separation_check(const TrajectorySet& set);

/// Weights w such that sum_g w_g f(x_g) approximates f^(order)(x0). Fornberg's
/// recursion on arbitrary nodes.
Eigen::MatrixXd finite_difference_weights(double x0, const Eigen::VectorXd& nodes, int max_order);

}  // namespace sda
