#pragma once

#include "sda/dataset.hpp"
#include "sda/trajectory.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sda {

/// One coordinate of a ground-truth trajectory.
struct ScalarPrimitive {
    enum class Kind { Constant, Affine, Sinusoid, Cubic };

    Kind kind = Kind::Constant;
    std::array<double, 4> coef{};

    static ScalarPrimitive constant(double c) { return {Kind::Constant, {c, 0, 0, 0}}; }
    /// slope * t + intercept
    static ScalarPrimitive affine(double slope, double intercept) { return {Kind::Affine, {slope, intercept, 0, 0}}; }
    /// amplitude * sin(2 pi frequency t + phase) + offset
    static ScalarPrimitive sinusoid(double amplitude, double frequency, double phase, double offset) {
        return {Kind::Sinusoid, {amplitude, frequency, phase, offset}};
    }
    /// c0 + c1 t + c2 t^2 + c3 t^3
    static ScalarPrimitive cubic(double c0, double c1, double c2, double c3) { return {Kind::Cubic, {c0, c1, c2, c3}}; }

    [[nodiscard]] double operator()(double t) const;
};

/// A trajectory formula: one primitive per coordinate.
using TrajectoryFormula = std::vector<ScalarPrimitive>;

/// Observation noise, independent across coordinates.
struct NoiseSpec {
    enum class Family { Gaussian, StudentT };

    Family family = Family::Gaussian;
    double sigma = 1.0;  // Gaussian standard deviation
    double dof = 0.0;    // Student-t degrees of freedom
    double scale = 1.0;  // Student-t scale
    bool allow_zero = false;  // sigma = 0 is only admissible in tests

    static NoiseSpec gaussian(double sigma) { return {Family::Gaussian, sigma, 0.0, 1.0, false}; }
    static NoiseSpec student_t(double dof, double scale) { return {Family::StudentT, 0.0, dof, scale, false}; }
    static NoiseSpec zero_for_tests() { return {Family::Gaussian, 0.0, 0.0, 1.0, true}; }

    /// Density of one coordinate.
    [[nodiscard]] double coordinate_density(double x) const;
    /// Throws AssumptionViolated unless the noise is centered, strictly positive
    /// and has tails lighter than |y|^(-d-3).
    void validate(Eigen::Index d) const;
};

/// Density of the observation times on [0, 1].
struct TimeSpec {
    enum class Family { Uniform, Beta };

    Family family = Family::Uniform;
    double a = 1.0;
    double b = 1.0;

    static TimeSpec uniform() { return {}; }
    static TimeSpec beta(double a, double b) { return {Family::Beta, a, b}; }

    [[nodiscard]] double density(double t) const;
    /// Beta(a, b) needs a, b >= 1 to be continuous on the closed interval.
    void validate() const;
};

struct MixtureModel {
    TrajectorySet truth;
    Eigen::VectorXd weights;
    NoiseSpec noise;
    TimeSpec time;
    std::vector<TrajectoryFormula> formulas;

    [[nodiscard]] Eigen::Index dim() const { return truth.dim(); }
    [[nodiscard]] std::size_t size() const { return truth.size(); }
};

/// Samples the formulas on an m-node grid and checks the model assumptions:
/// weights on the simplex, separation of at least delta, admissible noise and
/// time densities.
MixtureModel make_model(const std::vector<TrajectoryFormula>& formulas, const Eigen::VectorXd& weights,
                        const NoiseSpec& noise, const TimeSpec& time, double delta, Eigen::Index nodes,
                        int order = 1);

struct Sample {
    Dataset data;
    Assignment labels;  // generating component of each observation; diagnostics only
};

/// n i.i.d. draws: component ~ Cat(p), t ~ time density, y = truth(t) + noise.
/// Draw i uses its own stream, so the result depends only on (model, n, seed).
Sample sample(const MixtureModel& model, Eigen::Index n, std::uint64_t seed);

}  // namespace sda
