#pragma once

#include "sda/dataset.hpp"
#include "sda/smoother.hpp"
#include "sda/synth.hpp"
#include "sda/trajectory.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <limits>
#include <random>
#include <vector>

namespace sda::testing {

inline GridTrajectory from_function(Eigen::Index m, const std::function<double(double)>& f) {
    return GridTrajectory::sampled(m, 1, [&f](double t) { return Eigen::VectorXd::Constant(1, f(t)); });
}

inline GridTrajectory random_trajectory(Eigen::Index m, Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd v(m, d);
    for (Eigen::Index g = 0; g < m; ++g)
        for (Eigen::Index c = 0; c < d; ++c) v(g, c) = normal(rng);
    return GridTrajectory(std::move(v));
}

inline Dataset random_dataset(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng, double spread = 1.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, spread);
    Eigen::VectorXd t(n);
    Eigen::MatrixXd y(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i) = unit(rng);
        for (Eigen::Index c = 0; c < d; ++c) y(i, c) = normal(rng);
    }
    return {std::move(t), std::move(y)};
}

/// Two well separated bands: half the points near y = 0, half near y = 10.
inline Dataset two_band_dataset(Eigen::Index n, std::mt19937_64& rng, double jitter = 0.5) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-jitter, jitter);
    Eigen::VectorXd t(n);
    Eigen::MatrixXd y(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i) = unit(rng);
        y(i, 0) = (i % 2 == 0 ? 0.0 : 10.0) + noise(rng);
    }
    return {std::move(t), std::move(y)};
}

/// The default two-track scenario in d = 2.
inline MixtureModel default_model(Eigen::Index m = 201, double sigma = 0.25, int order = 2) {
    const double half_pi = std::numbers::pi / 2.0;
    std::vector<TrajectoryFormula> f = {
        {ScalarPrimitive::sinusoid(0.5, 1, 0, 1), ScalarPrimitive::sinusoid(0.5, 1, half_pi, 0)},
        {ScalarPrimitive::sinusoid(-0.5, 1, 0, -1), ScalarPrimitive::sinusoid(-0.5, 1, half_pi, 0)},
    };
    return make_model(f, Eigen::Vector2d(0.5, 0.5), NoiseSpec::gaussian(sigma), TimeSpec::uniform(), 1.0, m, order);
}

inline WeightedPoints random_points(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    WeightedPoints p{Eigen::VectorXd(n), Eigen::MatrixXd(n, d)};
    for (Eigen::Index i = 0; i < n; ++i) {
        p.times(i) = unit(rng);
        for (Eigen::Index c = 0; c < d; ++c) p.targets(i, c) = normal(rng);
    }
    return p;
}

/// All k^n associations of a small dataset, label 0 first.
inline std::vector<Assignment> all_assignments(Eigen::Index n, int k) {
    std::vector<Assignment> out;
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    while (true) {
        out.push_back({labels});
        std::size_t i = 0;
        while (i < labels.size() && ++labels[i] == k) labels[i++] = 0;
        if (i == labels.size()) break;
    }
    return out;
}

/// Global minimum of the empirical objective by enumeration: each association
/// costs the sum of its exact cluster fits; an empty cluster costs nothing
/// because a far-away constant is penalty-free.
inline double brute_force_optimum(const Dataset& data, int k, const SmootherConfig& cfg) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : all_assignments(data.size(), k)) {
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
            std::vector<Eigen::Index> rows;
            for (std::size_t i = 0; i < a.labels.size(); ++i)
                if (a.labels[i] == j) rows.push_back(static_cast<Eigen::Index>(i));
            if (rows.empty()) continue;
            const auto pts = data.select(rows);
            total += single_objective(fit_single(pts, data.size(), cfg), pts, data.size(), cfg);
        }
        best = std::min(best, total);
    }
    return best;
}

}  // namespace sda::testing
