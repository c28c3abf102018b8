#include "sda/banded.hpp"

#include "sda/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sda {

BandedSymmetricMatrix::BandedSymmetricMatrix(Eigen::Index n, Eigen::Index bandwidth)
    : band_(Eigen::MatrixXd::Zero(bandwidth + 1, n)) {}

void BandedSymmetricMatrix::add(Eigen::Index i, Eigen::Index j, double v) {
    if (i < j) std::swap(i, j);
    if (i - j > bandwidth()) throw ShapeError("entry outside the band");
    band_(i - j, j) += v;
}

double BandedSymmetricMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
    if (i < j) std::swap(i, j);
    return i - j > bandwidth() ? 0.0 : band_(i - j, j);
}

Eigen::MatrixXd BandedSymmetricMatrix::to_dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < std::min(n, j + bandwidth() + 1); ++i) {
            a(i, j) = band_(i - j, j);
            a(j, i) = band_(i - j, j);
        }
    }
    return a;
}

BandedCholesky::BandedCholesky(const BandedSymmetricMatrix& a) : factor_(a.band()) {
    const Eigen::Index n = a.size();
    const Eigen::Index bw = a.bandwidth();
    auto L = [this](Eigen::Index i, Eigen::Index j) -> double& { return factor_(i - j, j); };

    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = L(j, j);
        for (Eigen::Index k = std::max<Eigen::Index>(0, j - bw); k < j; ++k) pivot -= L(j, k) * L(j, k);
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NumericalError("banded Cholesky: non-positive pivot at row " + std::to_string(j));
        }
        const double diag = std::sqrt(pivot);
        L(j, j) = diag;
        for (Eigen::Index i = j + 1; i < std::min(n, j + bw + 1); ++i) {
            double v = L(i, j);
            for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw); k < j; ++k) v -= L(i, k) * L(j, k);
            L(i, j) = v / diag;
        }
    }
}

Eigen::MatrixXd BandedCholesky::solve(const Eigen::MatrixXd& rhs) const {
    const Eigen::Index n = factor_.cols();
    const Eigen::Index bw = factor_.rows() - 1;
    if (rhs.rows() != n) throw ShapeError("banded solve: right-hand side has the wrong size");
    auto L = [this](Eigen::Index i, Eigen::Index j) { return factor_(i - j, j); };

    Eigen::MatrixXd x = rhs;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double v = x(i, c);
            for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw); k < i; ++k) v -= L(i, k) * x(k, c);
            x(i, c) = v / L(i, i);
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double v = x(i, c);
            for (Eigen::Index k = i + 1; k < std::min(n, i + bw + 1); ++k) v -= L(k, i) * x(k, c);
            x(i, c) = v / L(i, i);
        }
    }
    return x;
}

}  // namespace sda

namespace sda {

BandedLeastSquares::BandedLeastSquares(Eigen::Index n, Eigen::Index bandwidth, Eigen::Index rhs_cols)
    : r_(Eigen::MatrixXd::Zero(n, bandwidth + 1)),
      qtb_(Eigen::MatrixXd::Zero(n, rhs_cols)),
      work_(bandwidth + 1),
      work_rhs_(rhs_cols) {
    if (n < 1 || bandwidth < 0 || rhs_cols < 1) throw ShapeError("banded least squares: invalid dimensions");
}

void BandedLeastSquares::add_row(Eigen::Index start, const Eigen::VectorXd& coef, const Eigen::RowVectorXd& rhs) {
    const Eigen::Index n = r_.rows();
    const Eigen::Index width = r_.cols();
    if (coef.size() > width || start < 0 || start + coef.size() > n || rhs.size() != qtb_.cols())
        throw ShapeError("banded least squares: row outside the band");

    // work_(j) holds the incoming row's entry in column c + j.
    work_.setZero();
    work_.head(coef.size()) = coef;
    work_rhs_ = rhs;
    for (Eigen::Index c = start; c < n; ++c) {
        const double a = work_(0);
        if (a != 0.0) {
            const Eigen::Index len = std::min(width, n - c);
            const double p = r_(c, 0);
            if (p == 0.0) {
                // Empty row of R: the incoming row takes its place.
                r_.row(c).head(len) = work_.head(len).transpose();
                qtb_.row(c) = work_rhs_;
                return;
            }
            const double h = std::hypot(p, a);
            const double cs = p / h;
            const double sn = a / h;
            for (Eigen::Index j = 0; j < len; ++j) {
                const double rj = r_(c, j);
                const double wj = work_(j);
                r_(c, j) = cs * rj + sn * wj;
                work_(j) = cs * wj - sn * rj;
            }
            const Eigen::RowVectorXd q = qtb_.row(c);
            qtb_.row(c) = cs * q + sn * work_rhs_;
            work_rhs_ = cs * work_rhs_ - sn * q;
        }
        // Shift the window one column to the right.
        for (Eigen::Index j = 0; j + 1 < width; ++j) work_(j) = work_(j + 1);
        work_(width - 1) = 0.0;
        if (work_.isZero(0.0)) return;
    }
}

double BandedLeastSquares::max_pivot() const { return r_.col(0).cwiseAbs().maxCoeff(); }

Eigen::MatrixXd BandedLeastSquares::solve() const {
    const Eigen::Index n = r_.rows();
    const Eigen::Index width = r_.cols();
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_pivot();
    Eigen::MatrixXd x(n, qtb_.cols());
    for (Eigen::Index g = n - 1; g >= 0; --g) {
        const double p = r_(g, 0);
        if (!(std::abs(p) > floor)) {
            throw NumericalError("banded least squares: rank deficient at column " + std::to_string(g));
        }
        Eigen::RowVectorXd acc = qtb_.row(g);
        for (Eigen::Index j = 1; j < width && g + j < n; ++j) acc -= r_(g, j) * x.row(g + j);
        x.row(g) = acc / p;
    }
    return x;
}

Eigen::MatrixXd BandedLeastSquares::solve_normal(const Eigen::MatrixXd& rhs) const {
    const Eigen::Index n = r_.rows();
    const Eigen::Index width = r_.cols();
    if (rhs.rows() != n) throw ShapeError("banded least squares: right-hand side has the wrong size");
    // Forward substitution with R^T, then back substitution with R.
    Eigen::MatrixXd z(n, rhs.cols());
    for (Eigen::Index g = 0; g < n; ++g) {
        Eigen::RowVectorXd acc = rhs.row(g);
        for (Eigen::Index j = 1; j < width && g - j >= 0; ++j) acc -= r_(g - j, j) * z.row(g - j);
        z.row(g) = acc / r_(g, 0);
    }
    Eigen::MatrixXd x(n, rhs.cols());
    for (Eigen::Index g = n - 1; g >= 0; --g) {
        Eigen::RowVectorXd acc = z.row(g);
        for (Eigen::Index j = 1; j < width && g + j < n; ++j) acc -= r_(g, j) * x.row(g + j);
        x.row(g) = acc / r_(g, 0);
    }
    return x;
}

}  // namespace sda
