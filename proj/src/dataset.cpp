#include "sda/dataset.hpp"

#include "sda/errors.hpp"

namespace sda {

Dataset::Dataset(Eigen::VectorXd times, Eigen::MatrixXd targets)
    : times_(std::move(times)), targets_(std::move(targets)) {
    if (times_.size() != targets_.rows()) throw ShapeError("dataset: times and targets differ in length");
    if (targets_.cols() < 1) throw ShapeError("dataset: dimension must be >= 1");
    if (!times_.allFinite() || !targets_.allFinite()) throw DataError("dataset: non-finite values");
    if (times_.size() > 0 && (times_.minCoeff() < 0.0 || times_.maxCoeff() > 1.0))
        throw DataError("dataset: times must lie in [0, 1]");
}

WeightedPoints Dataset::select(const std::vector<Eigen::Index>& rows) const {
    WeightedPoints p{Eigen::VectorXd(static_cast<Eigen::Index>(rows.size())),
                     Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), dim())};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        p.times(i) = times_(rows[r]);
        p.targets.row(i) = targets_.row(rows[r]);
    }
    return p;
}

}  // namespace sda
