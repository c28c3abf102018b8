#pragma once

#include "sda/smoother.hpp"
#include "sda/trajectory.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace sda::testing {

/// Dense normal equations assembled from the definitions: the interpolation
/// matrix from eval on unit vectors, the penalty from scaled differences of
/// unit vectors. The double-precision problem data are solved in 50-digit
/// arithmetic, so the result is the exact solution to working precision even
/// on badly conditioned instances. Returns the m x d grid solution.
inline Eigen::MatrixXd dense_fit(const WeightedPoints& p, Eigen::Index n_total, const SmootherConfig& cfg) {
    using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float_50::backend_type,
                                               boost::multiprecision::et_off>;
    using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = cfg.nodes;
    Mat a = Mat::Zero(p.count(), m);
    Mat d = Mat::Zero(m - cfg.order, m);
    for (Eigen::Index g = 0; g < m; ++g) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, 1);
        e(g, 0) = 1.0;
        const GridTrajectory unit(e);
        for (Eigen::Index i = 0; i < p.count(); ++i) a(i, g) = Real(eval(unit, p.times(i))(0));
        const Eigen::VectorXd col = scaled_differences(unit, cfg.order).col(0);
        for (Eigen::Index r = 0; r < d.rows(); ++r) d(r, g) = Real(col(r));
    }
    const Real dt = Real(1) / Real(m - 1);
    const Real nt = Real(n_total);
    Mat y(p.count(), p.dim());
    for (Eigen::Index i = 0; i < p.count(); ++i)
        for (Eigen::Index c = 0; c < p.dim(); ++c) y(i, c) = Real(p.targets(i, c));
    Mat lhs = a.transpose() * a / nt + Real(cfg.lambda) * dt * (d.transpose() * d);
    for (Eigen::Index g = 0; g < m; ++g) lhs(g, g) += Real(cfg.ridge);
    const Mat rhs = a.transpose() * y / nt;
    const Mat x = lhs.ldlt().solve(rhs);
    Eigen::MatrixXd out(m, p.dim());
    for (Eigen::Index g = 0; g < m; ++g)
        for (Eigen::Index c = 0; c < p.dim(); ++c) out(g, c) = static_cast<double>(x(g, c));
    return out;
}

}  // namespace sda::testing
