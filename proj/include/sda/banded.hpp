#pragma once

#include <Eigen/Core>

namespace sda {

/// Symmetric matrix stored by its lower band: entry (i, j) with 0 <= i - j <= bandwidth
/// lives at band(i - j, j).
class BandedSymmetricMatrix {
public:
    BandedSymmetricMatrix(Eigen::Index n, Eigen::Index bandwidth);

    [[nodiscard]] Eigen::Index size() const { return band_.cols(); }
    [[nodiscard]] Eigen::Index bandwidth() const { return band_.rows() - 1; }

    /// Adds v to (i, j) and, implicitly, to (j, i).
    void add(Eigen::Index i, Eigen::Index j, double v);
    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const;

    [[nodiscard]] Eigen::MatrixXd to_dense() const;
    [[nodiscard]] const Eigen::MatrixXd& band() const { return band_; }

private:
    Eigen::MatrixXd band_;
};

/// Cholesky factor L L^T of a banded SPD matrix, O(n * bandwidth^2).
class BandedCholesky {
public:
    /// Throws NumericalError if a pivot is not positive.
    explicit BandedCholesky(const BandedSymmetricMatrix& a);

    /// Solves A X = B column by column.
    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    Eigen::MatrixXd factor_;  // same band layout as the input
};

/// Sequential Givens QR for a banded least-squares problem min |W c - b|^2.
///
/// Rows are absorbed one at a time into an upper-triangular R with `bandwidth`
/// superdiagonals; no normal equations are formed, so the conditioning is that
/// of W rather than W^T W. Absorb heavily weighted rows first.
class BandedLeastSquares {
public:
    BandedLeastSquares(Eigen::Index n, Eigen::Index bandwidth, Eigen::Index rhs_cols);

    /// Adds the row with coefficients `coef` on columns start..start+coef.size()-1
    /// and right-hand side `rhs`. coef.size() must not exceed bandwidth + 1.
    void add_row(Eigen::Index start, const Eigen::VectorXd& coef, const Eigen::RowVectorXd& rhs);

    /// Largest |R(g, g)|.
    [[nodiscard]] double max_pivot() const;

    /// Back substitution. Throws NumericalError when a pivot is negligible
    /// relative to max_pivot(), i.e. the rows absorbed so far do not determine c.
    [[nodiscard]] Eigen::MatrixXd solve() const;

    /// Solves R^T R x = rhs with the accumulated factor; used to refine a
    /// solution against a residual of the normal equations.
    [[nodiscard]] Eigen::MatrixXd solve_normal(const Eigen::MatrixXd& rhs) const;

private:
    Eigen::MatrixXd r_;    // r_(g, j) = R(g, g + j)
    Eigen::MatrixXd qtb_;  // rotated right-hand side
    Eigen::VectorXd work_;
    Eigen::RowVectorXd work_rhs_;
};

}  // namespace sda
