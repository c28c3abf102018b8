#include "sda/synth.hpp"

#include "sda/errors.hpp"
#include "sda/random.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace sda {

double ScalarPrimitive::operator()(double t) const {
    switch (kind) {
        case Kind::Constant: return coef[0];
        case Kind::Affine: return coef[0] * t + coef[1];
        case Kind::Sinusoid: return coef[0] * std::sin(2.0 * std::numbers::pi * coef[1] * t + coef[2]) + coef[3];
        case Kind::Cubic: return coef[0] + t * (coef[1] + t * (coef[2] + t * coef[3]));
    }
    return 0.0;
}

double NoiseSpec::coordinate_density(double x) const {
    if (family == Family::Gaussian) {
        return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    return boost::math::pdf(boost::math::students_t(dof), x / scale) / scale;
}

void NoiseSpec::validate(Eigen::Index d) const {
    if (family == Family::Gaussian) {
        if (sigma == 0.0 && allow_zero) return;
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw AssumptionViolated("Gaussian noise needs sigma > 0");
        return;
    }
    if (!(scale > 0.0)) throw AssumptionViolated("Student-t noise needs scale > 0");
    if (!(dof > static_cast<double>(d) + 3.0)) {
        throw AssumptionViolated("Student-t noise in dimension " + std::to_string(d) + " needs dof > " +
                                 std::to_string(d + 3) + ", got " + std::to_string(dof));
    }
}

double TimeSpec::density(double t) const {
    if (t < 0.0 || t > 1.0) return 0.0;
    if (family == Family::Uniform) return 1.0;
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    // a, b >= 1, so the powers are finite at the end points.
    return std::exp(log_norm) * std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
}

void TimeSpec::validate() const {
    if (family == Family::Beta && !(a >= 1.0 && b >= 1.0))
        throw AssumptionViolated("Beta time density needs a, b >= 1 to be continuous on [0, 1]");
}

MixtureModel make_model(const std::vector<TrajectoryFormula>& formulas, const Eigen::VectorXd& weights,
                        const NoiseSpec& noise, const TimeSpec& time, double delta, Eigen::Index nodes,
                        int order) {
    if (formulas.empty()) throw ShapeError("model needs at least one trajectory");
    const auto d = static_cast<Eigen::Index>(formulas.front().size());
    if (d < 1) throw ShapeError("trajectory formulas need at least one coordinate");
    for (const auto& f : formulas) {
        if (static_cast<Eigen::Index>(f.size()) != d) throw ShapeError("trajectory formulas differ in dimension");
    }
    if (weights.size() != static_cast<Eigen::Index>(formulas.size()))
        throw InvalidWeights("need one weight per trajectory");
    if (!weights.allFinite() || weights.minCoeff() <= 0.0 || std::abs(weights.sum() - 1.0) > 1e-12)
        throw InvalidWeights("weights must be positive and sum to 1");
    noise.validate(d);
    time.validate();

    std::vector<GridTrajectory> tracks;
    for (const auto& f : formulas) {
        tracks.push_back(GridTrajectory::sampled(nodes, d, [&f, d](double t) {
            Eigen::VectorXd p(d);
            for (Eigen::Index c = 0; c < d; ++c) p(c) = f[static_cast<std::size_t>(c)](t);
            return p;
        }));
    }
    TrajectorySet truth(std::move(tracks), order, delta);
    const SeparationResult sep = separation_check(truth);
    if (!sep.ok) {
        throw SeparationViolated("true trajectories come within " + std::to_string(sep.min_gap) +
                                 " of each other, below delta = " + std::to_string(delta));
    }
    return {std::move(truth), weights, noise, time, formulas};
}

Sample sample(const MixtureModel& model, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample: n must be >= 1");
    const Eigen::Index d = model.dim();
    Eigen::VectorXd times(n);
    Eigen::MatrixXd targets(n, d);
    Assignment labels;
    labels.labels.resize(static_cast<std::size_t>(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        SplitMix64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const double u = unit(rng);
        std::size_t label = 0;
        double cumulative = model.weights(0);
        while (label + 1 < model.size() && u >= cumulative) cumulative += model.weights(static_cast<Eigen::Index>(++label));

        double t = 0.0;
        if (model.time.family == TimeSpec::Family::Uniform) {
            t = unit(rng);
        } else {
            const double x = std::gamma_distribution<double>(model.time.a)(rng);
            const double y = std::gamma_distribution<double>(model.time.b)(rng);
            t = x / (x + y);
        }

        Eigen::VectorXd point = eval(model.truth[label], t);
        for (Eigen::Index c = 0; c < d; ++c) {
            if (model.noise.family == NoiseSpec::Family::Gaussian) {
                if (model.noise.sigma > 0.0) point(c) += std::normal_distribution<double>(0.0, model.noise.sigma)(rng);
            } else {
                point(c) += model.noise.scale * std::student_t_distribution<double>(model.noise.dof)(rng);
            }
        }
        times(i) = t;
        targets.row(i) = point.transpose();
        labels.labels[static_cast<std::size_t>(i)] = static_cast<int>(label);
    }
    return {Dataset(std::move(times), std::move(targets)), std::move(labels)};
}

}  // namespace sda
