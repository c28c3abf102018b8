#include "sda/trajectory.hpp"

#include "sda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sda {

namespace {

void require_order(const GridTrajectory& traj, int s) {
    if (s < 1) throw DomainError("penalty order must be >= 1, got " + std::to_string(s));
    if (traj.nodes() <= s) {
        throw GridTooCoarse("grid with " + std::to_string(traj.nodes()) +
                            " nodes cannot carry order " + std::to_string(s));
    }
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

GridTrajectory::GridTrajectory(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 2) throw GridTooCoarse("a grid trajectory needs at least 2 nodes");
    if (values_.cols() < 1) throw ShapeError("a grid trajectory needs dimension >= 1");
    if (!values_.allFinite()) throw DataError("grid trajectory values must be finite");
}

GridTrajectory GridTrajectory::constant(Eigen::Index m, const Eigen::VectorXd& value) {
    Eigen::MatrixXd v(m, value.size());
    v.rowwise() = value.transpose();
    return GridTrajectory(std::move(v));
}

GridTrajectory GridTrajectory::sampled(Eigen::Index m, Eigen::Index d,
                                       const std::function<Eigen::VectorXd(double)>& f) {
    if (m < 2) throw GridTooCoarse("a grid trajectory needs at least 2 nodes");
    Eigen::MatrixXd v(m, d);
    for (Eigen::Index g = 0; g < m; ++g) {
        const Eigen::VectorXd p = f(static_cast<double>(g) / static_cast<double>(m - 1));
        if (p.size() != d) throw ShapeError("sampled function returned the wrong dimension");
        v.row(g) = p.transpose();
    }
    return GridTrajectory(std::move(v));
}

GridTrajectory& GridTrajectory::operator+=(const GridTrajectory& other) {
    if (other.values_.rows() != values_.rows() || other.values_.cols() != values_.cols())
        throw ShapeError("grid trajectories differ in shape");
    values_ += other.values_;
    return *this;
}

GridTrajectory& GridTrajectory::operator-=(const GridTrajectory& other) {
    if (other.values_.rows() != values_.rows() || other.values_.cols() != values_.cols())
        throw ShapeError("grid trajectories differ in shape");
    values_ -= other.values_;
    return *this;
}

GridTrajectory& GridTrajectory::operator*=(double alpha) {
    values_ *= alpha;
    return *this;
}

GridLocation locate(Eigen::Index nodes, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("evaluation time " + std::to_string(t) + " outside [0, 1]");
    }
    double x = t * static_cast<double>(nodes - 1);
    // Snap times that are a rounding error away from a node onto it.
    const double nearest = std::nearbyint(x);
    if (std::abs(x - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) {
        x = nearest;
    }
    GridLocation loc;
    loc.cell = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), nodes - 2);
    loc.weight = x - static_cast<double>(loc.cell);
    return loc;
}

Eigen::VectorXd eval(const GridTrajectory& traj, double t) {
    const auto [cell, w] = locate(traj.nodes(), t);
    const auto& v = traj.values();
    if (w == 0.0) return v.row(cell).transpose();
    if (w == 1.0) return v.row(cell + 1).transpose();
    return ((1.0 - w) * v.row(cell) + w * v.row(cell + 1)).transpose();
}

Eigen::MatrixXd scaled_differences(const GridTrajectory& traj, int s) {
    require_order(traj, s);
    const Eigen::Index rows = traj.nodes() - s;
    const double scale = std::pow(traj.spacing(), -s);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, traj.dim());
    for (int i = 0; i <= s; ++i) {
        const double c = ((s - i) % 2 == 0 ? 1.0 : -1.0) * binomial(s, i) * scale;
        out += c * traj.values().middleRows(i, rows);
    }
    return out;
}

double penalty(const GridTrajectory& traj, int s) {
    return traj.spacing() * scaled_differences(traj, s).squaredNorm();
}

double penalty_inner(const GridTrajectory& a, const GridTrajectory& b, int s) {
    if (a.nodes() != b.nodes() || a.dim() != b.dim())
        throw ShapeError("penalty_inner: trajectories differ in shape");
    return a.spacing() * scaled_differences(a, s).cwiseProduct(scaled_differences(b, s)).sum();
}

Eigen::MatrixXd finite_difference_weights(double x0, const Eigen::VectorXd& nodes, int max_order) {
    const Eigen::Index n = nodes.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, max_order + 1);
    c(0, 0) = 1.0;
    double c1 = 1.0;
    double c4 = nodes(0) - x0;
    for (Eigen::Index i = 1; i < n; ++i) {
        const int mn = static_cast<int>(std::min<Eigen::Index>(i, max_order));
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes(i) - x0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double c3 = nodes(i) - nodes(j);
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c;
}

double h0_norm(const GridTrajectory& traj, int s) {
    require_order(traj, s);
    Eigen::VectorXd x(s + 1);
    for (int g = 0; g <= s; ++g) x(g) = traj.node_time(g);
    const Eigen::MatrixXd w = finite_difference_weights(0.0, x, s - 1);
    const auto head = traj.values().topRows(s + 1);
    double norm = 0.0;
    double factorial = 1.0;
    for (int i = 0; i < s; ++i) {
        if (i > 0) factorial *= i;
        const Eigen::VectorXd derivative = head.transpose() * w.col(i);
        norm += derivative.norm() / factorial;
    }
    return norm;
}

SobolevNorms sobolev_norms(const GridTrajectory& traj, int s) {
    SobolevNorms n;
    n.h0 = h0_norm(traj, s);
    n.h1 = std::sqrt(penalty(traj, s));
    n.hs = n.h0 + n.h1;
    return n;
}

TrajectorySet::TrajectorySet(std::vector<GridTrajectory> tracks, int order, double delta)
    : tracks_(std::move(tracks)), order_(order), delta_(delta) {
    if (tracks_.empty()) throw ShapeError("a trajectory set needs k >= 1 tracks");
    if (order_ < 1) throw DomainError("penalty order must be >= 1");
    if (!(delta_ > 0.0)) throw DomainError("separation parameter delta must be > 0");
    for (const auto& t : tracks_) {
        if (t.nodes() != tracks_.front().nodes() || t.dim() != tracks_.front().dim())
            throw ShapeError("all tracks of a set must share grid size and dimension");
    }
    if (nodes() <= order_) {
        throw GridTooCoarse("grid with " + std::to_string(nodes()) +
                            " nodes cannot carry order " + std::to_string(order_));
    }
}

double hs_distance(const TrajectorySet& a, const TrajectorySet& b) {
    if (a.size() != b.size() || a.nodes() != b.nodes() || a.dim() != b.dim() ||
        a.order() != b.order()) {
        throw ShapeError("hs_distance: sets differ in k, grid, dimension or order");
    }
    const std::size_t k = a.size();
    // Pairwise costs first; the permutation search only sums them.
    Eigen::MatrixXd cost(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cost(i, j) = sobolev_norms(a[i] - b[j], a.order()).hs;

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) total += cost(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

SeparationResult separation_check(const TrajectorySet& set) {
    SeparationResult r;
    const std::size_t k = set.size();
    if (k < 2) return r;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = j + 1; l < k; ++l) {
            const double gap = (set[j].values() - set[l].values()).rowwise().norm().minCoeff();
            r.min_gap = std::min(r.min_gap, gap);
        }
    }
    r.ok = r.min_gap >= set.delta();
    return r;
}

}  // namespace sda
