#include "sda/smoother.hpp"

#include "sda/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace sda {

void SmootherConfig::validate() const {
    if (order < 1) throw DomainError("smoother: penalty order must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("smoother: lambda must be > 0");
    if (nodes <= order) {
        throw GridTooCoarse("smoother: grid size " + std::to_string(nodes) +
                            " too small for order " + std::to_string(order));
    }
    if (!(ridge >= 0.0)) throw DomainError("smoother: ridge must be >= 0");
}

void WeightedPoints::validate() const {
    if (times.size() != targets.rows()) throw ShapeError("points: times and targets differ in length");
    if (!times.allFinite() || !targets.allFinite()) throw DataError("points: non-finite input");
    if (times.size() > 0 && (times.minCoeff() < 0.0 || times.maxCoeff() > 1.0))
        throw DataError("points: times must lie in [0, 1]");
}

namespace {

std::vector<double> difference_stencil(int s, double dt) {
    std::vector<double> stencil(static_cast<std::size_t>(s) + 1);
    double binom = 1.0;
    for (int i = 0; i <= s; ++i) {
        if (i > 0) binom = binom * (s - i + 1) / i;
        stencil[static_cast<std::size_t>(i)] = ((s - i) % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(dt, -s);
    }
    return stencil;
}

}  // namespace

NormalEquations normal_equations(const WeightedPoints& points, Eigen::Index n_total,
                                 const SmootherConfig& cfg) {
    cfg.validate();
    points.validate();
    if (n_total < 1) throw DomainError("smoother: n_total must be >= 1");

    const Eigen::Index m = cfg.nodes;
    const int s = cfg.order;
    const double inv_n = 1.0 / static_cast<double>(n_total);
    NormalEquations eq{BandedSymmetricMatrix(m, std::max(s, 1)),
                       Eigen::MatrixXd::Zero(m, points.dim())};

    // Data term: each point touches the two nodes around it.
    for (Eigen::Index i = 0; i < points.count(); ++i) {
        const auto [g, w] = locate(m, points.times(i));
        const double a0 = 1.0 - w;
        const double a1 = w;
        eq.matrix.add(g, g, a0 * a0 * inv_n);
        eq.matrix.add(g + 1, g + 1, a1 * a1 * inv_n);
        eq.matrix.add(g + 1, g, a0 * a1 * inv_n);
        eq.rhs.row(g) += a0 * inv_n * points.targets.row(i);
        eq.rhs.row(g + 1) += a1 * inv_n * points.targets.row(i);
    }

    // Penalty: lambda * dt * (D^s)^T D^s.
    const double dt = 1.0 / static_cast<double>(m - 1);
    const auto stencil = difference_stencil(s, dt);
    const double scale = cfg.lambda * dt;
    for (Eigen::Index r = 0; r + s < m; ++r) {
        for (int i = 0; i <= s; ++i)
            for (int l = 0; l <= i; ++l) eq.matrix.add(r + i, r + l, scale * stencil[static_cast<std::size_t>(i)] * stencil[static_cast<std::size_t>(l)]);
    }

    for (Eigen::Index g = 0; g < m; ++g) eq.matrix.add(g, g, cfg.ridge);
    return eq;
}

namespace {

// Stacks sqrt(lambda dt) D^s, A / sqrt(n_total) and sqrt(ridge) I, heaviest rows first.
BandedLeastSquares stacked_system(const WeightedPoints& points, Eigen::Index n_total, const SmootherConfig& cfg,
                                  double ridge) {
    const Eigen::Index m = cfg.nodes;
    const int s = cfg.order;
    const Eigen::Index d = points.dim();
    BandedLeastSquares ls(m, s, d);

    const double dt = 1.0 / static_cast<double>(m - 1);
    const auto stencil = difference_stencil(s, dt);
    const double root_lambda = std::sqrt(cfg.lambda * dt);
    Eigen::VectorXd coef(s + 1);
    for (int i = 0; i <= s; ++i) coef(i) = root_lambda * stencil[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index r = 0; r + s < m; ++r) ls.add_row(r, coef, zero);

    const double root_inv_n = 1.0 / std::sqrt(static_cast<double>(n_total));
    Eigen::VectorXd pair(2);
    for (Eigen::Index i = 0; i < points.count(); ++i) {
        const auto [g, w] = locate(m, points.times(i));
        pair << (1.0 - w) * root_inv_n, w * root_inv_n;
        ls.add_row(g, pair, root_inv_n * points.targets.row(i));
    }

    if (ridge > 0.0) {
        const Eigen::VectorXd root_ridge = Eigen::VectorXd::Constant(1, std::sqrt(ridge));
        for (Eigen::Index g = 0; g < m; ++g) ls.add_row(g, root_ridge, zero);
    }
    return ls;
}

// Residual of the normal equations, b - M x, accumulated in extended precision.
Eigen::MatrixXd normal_residual(const WeightedPoints& points, Eigen::Index n_total, const SmootherConfig& cfg,
                                double ridge, const Eigen::MatrixXd& x) {
    using Ld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = cfg.nodes;
    const int s = cfg.order;
    const Eigen::Index d = x.cols();
    const Ld xl = x.cast<long double>();
    Ld r = Ld::Zero(m, d);

    const long double inv_n = 1.0L / static_cast<long double>(n_total);
    for (Eigen::Index i = 0; i < points.count(); ++i) {
        const auto [g, w] = locate(m, points.times(i));
        const long double a0 = 1.0L - static_cast<long double>(w);
        const long double a1 = static_cast<long double>(w);
        for (Eigen::Index c = 0; c < d; ++c) {
            const long double e = static_cast<long double>(points.targets(i, c)) - a0 * xl(g, c) - a1 * xl(g + 1, c);
            r(g, c) += a0 * e * inv_n;
            r(g + 1, c) += a1 * e * inv_n;
        }
    }

    const double dt = 1.0 / static_cast<double>(m - 1);
    const auto stencil = difference_stencil(s, dt);
    const long double scale = static_cast<long double>(cfg.lambda) * static_cast<long double>(dt);
    for (Eigen::Index row = 0; row + s < m; ++row) {
        for (Eigen::Index c = 0; c < d; ++c) {
            long double diff = 0.0L;
            for (int i = 0; i <= s; ++i) diff += static_cast<long double>(stencil[static_cast<std::size_t>(i)]) * xl(row + i, c);
            diff *= scale;
            for (int i = 0; i <= s; ++i) r(row + i, c) -= static_cast<long double>(stencil[static_cast<std::size_t>(i)]) * diff;
        }
    }
    r -= static_cast<long double>(ridge) * xl;
    return r.cast<double>();
}

}  // namespace

GridTrajectory fit_single(const WeightedPoints& points, Eigen::Index n_total,
                          const SmootherConfig& cfg) {
    if (points.count() == 0) throw EmptyCluster("fit_single: cluster has no points");
    cfg.validate();
    points.validate();
    if (n_total < 1) throw DomainError("smoother: n_total must be >= 1");

    // The minimizer of the normal equations is computed as the least-squares
    // solution of the stacked system, which keeps large lambda accurate.
    // A cluster with fewer than s distinct times leaves polynomial directions
    // undetermined; if the configured ridge does not pin them, grow it relative
    // to the largest pivot.
    double ridge = cfg.ridge;
    double extra = 0.0;
    double scale = 0.0;
    for (int attempt = 0;; ++attempt) {
        const BandedLeastSquares ls = stacked_system(points, n_total, cfg, ridge);
        try {
            Eigen::MatrixXd x = ls.solve();
            // Two refinement sweeps recover digits lost to the conditioning of
            // stiff (large lambda * dt^(1-2s)) systems.
            for (int sweep = 0; sweep < 2; ++sweep)
                x += ls.solve_normal(normal_residual(points, n_total, cfg, ridge, x));
            return GridTrajectory(std::move(x));
        } catch (const NumericalError&) {
            if (attempt == 6) throw;
            if (scale == 0.0) scale = ls.max_pivot() * ls.max_pivot();
            extra = extra == 0.0 ? 1e-14 * scale : 100.0 * extra;
            ridge = cfg.ridge + extra;
        }
    }
}

double single_objective(const GridTrajectory& traj, const WeightedPoints& points,
                        Eigen::Index n_total, const SmootherConfig& cfg) {
    double misfit = 0.0;
    for (Eigen::Index i = 0; i < points.count(); ++i)
        misfit += (points.targets.row(i).transpose() - eval(traj, points.times(i))).squaredNorm();
    return misfit / static_cast<double>(n_total) + cfg.lambda * penalty(traj, cfg.order);
}

GridTrajectory polynomial_limit_fit(const WeightedPoints& points, int order, Eigen::Index nodes) {
    points.validate();
    if (order < 1) throw DomainError("polynomial fit: order must be >= 1");
    const std::set<double> distinct(points.times.begin(), points.times.end());
    if (static_cast<int>(distinct.size()) < order) {
        throw DegenerateDesign("polynomial fit: " + std::to_string(distinct.size()) +
                               " distinct times cannot determine degree " + std::to_string(order - 1));
    }

    auto basis = [order](double t) {
        Eigen::RowVectorXd row(order);
        double term = 1.0;
        for (int i = 0; i < order; ++i) {
            row(i) = term;
            term = term * t / (i + 1);
        }
        return row;
    };
    // The penalty null space is the grid samples of degree < order polynomials;
    // like any grid trajectory they are evaluated by linear interpolation, so
    // the design interpolates the sampled basis (exact for order <= 2).
    auto node = [nodes](Eigen::Index g) { return static_cast<double>(g) / static_cast<double>(nodes - 1); };
    Eigen::MatrixXd design(points.count(), order);
    for (Eigen::Index i = 0; i < points.count(); ++i) {
        const GridLocation loc = locate(nodes, points.times(i));
        design.row(i) = (1.0 - loc.weight) * basis(node(loc.cell)) + loc.weight * basis(node(loc.cell + 1));
    }
    const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(points.targets);

    Eigen::MatrixXd values(nodes, points.dim());
    for (Eigen::Index g = 0; g < nodes; ++g)
        values.row(g) = basis(node(g)) * coef;
    return GridTrajectory(std::move(values));
}

}  // namespace sda
