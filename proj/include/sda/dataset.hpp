#pragma once

#include "sda/smoother.hpp"

#include <Eigen/Core>

#include <vector>

namespace sda {

/// n observations (t_i, y_i) in [0, 1] x R^d.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::VectorXd times, Eigen::MatrixXd targets);

    [[nodiscard]] Eigen::Index size() const { return times_.size(); }
    [[nodiscard]] Eigen::Index dim() const { return targets_.cols(); }
    [[nodiscard]] const Eigen::VectorXd& times() const { return times_; }
    [[nodiscard]] const Eigen::MatrixXd& targets() const { return targets_; }

    [[nodiscard]] WeightedPoints all() const { return {times_, targets_}; }
    [[nodiscard]] WeightedPoints select(const std::vector<Eigen::Index>& rows) const;

private:
    Eigen::VectorXd times_;
    Eigen::MatrixXd targets_;
};

/// Cluster index per observation. Labels are 0-based: 0..k-1.
struct Assignment {
    std::vector<int> labels;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

}  // namespace sda
