#include "sda/population.hpp"

#include "sda/errors.hpp"
#include "sda/quadrature.hpp"
#include "sda/solver.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace sda {

namespace {

constexpr Eigen::Index kMaxTensorDim = 3;

/// Maps a Gauss-Legendre variable u in [-u_max, u_max] to a noise coordinate.
/// Student-t noise uses eps = scale * sinh(u), which flattens the polynomial tails.
struct AxisMap {
    bool hyperbolic = false;
    double scale = 1.0;
    double u_max = 0.0;

    [[nodiscard]] double eps(double u) const { return hyperbolic ? scale * std::sinh(u) : u; }
    [[nodiscard]] double jacobian(double u) const { return hyperbolic ? scale * std::cosh(u) : 1.0; }
    [[nodiscard]] double inverse(double e) const { return hyperbolic ? std::asinh(e / scale) : e; }
};

/// Truncation box half-width R in rotated noise coordinates, and its axis map.
/// The rotated box contains the ball of radius R; for Student-t noise that ball
/// contains the axis-aligned box of half-width R / sqrt(d), which bounds the
/// neglected mass.
AxisMap axis_map(const NoiseSpec& noise, Eigen::Index d, const QuadratureSpec& quad) {
    const double dims = static_cast<double>(d);
    double tail = 0.0;
    AxisMap map;
    if (noise.family == NoiseSpec::Family::Gaussian) {
        const double radius = quad.y_radius > 0.0 ? quad.y_radius : 8.0 * noise.sigma;
        tail = dims * std::erfc(radius / (noise.sigma * std::sqrt(2.0)));
        map.u_max = radius;
    } else {
        const boost::math::students_t dist(noise.dof);
        const double radius = quad.y_radius > 0.0
            ? quad.y_radius
            : std::sqrt(dims) * noise.scale *
                  boost::math::quantile(boost::math::complement(dist, kTruncationMass / (4.0 * dims)));
        tail = dims * 2.0 * boost::math::cdf(boost::math::complement(dist, radius / (std::sqrt(dims) * noise.scale)));
        map.hyperbolic = true;
        map.scale = noise.scale;
        map.u_max = std::asinh(radius / noise.scale);
    }
    if (tail >= kTruncationMass) {
        throw QuadratureError("noise mass outside the truncation radius is " + std::to_string(tail) +
                              ", above the limit " + std::to_string(kTruncationMass));
    }
    return map;
}

/// Joint noise density with the normalizing constants hoisted out.
struct NoiseDensity {
    bool gaussian = true;
    double log_norm = 0.0;  // summed over coordinates
    double inv_var = 0.0;   // 1 / sigma^2, or 1 / (dof scale^2)
    double power = 0.0;     // (dof + 1) / 2

    NoiseDensity(const NoiseSpec& noise, Eigen::Index d) : gaussian(noise.family == NoiseSpec::Family::Gaussian) {
        const double dims = static_cast<double>(d);
        if (gaussian) {
            inv_var = 1.0 / (noise.sigma * noise.sigma);
            log_norm = -dims * std::log(noise.sigma * std::sqrt(2.0 * std::numbers::pi));
        } else {
            const double v = noise.dof;
            inv_var = 1.0 / (v * noise.scale * noise.scale);
            power = 0.5 * (v + 1.0);
            log_norm = dims * (std::lgamma(power) - std::lgamma(0.5 * v) -
                               0.5 * std::log(v * std::numbers::pi) - std::log(noise.scale));
        }
    }

    [[nodiscard]] double operator()(const Eigen::VectorXd& eps) const {
        if (gaussian) return std::exp(log_norm - 0.5 * inv_var * eps.squaredNorm());
        double acc = log_norm;
        for (Eigen::Index c = 0; c < eps.size(); ++c) acc -= power * std::log1p(eps(c) * eps(c) * inv_var);
        return std::exp(acc);
    }
};

/// Orthogonal matrix whose first column is the unit vector n (Householder).
Eigen::MatrixXd frame(const Eigen::VectorXd& n) {
    const Eigen::Index d = n.size();
    Eigen::VectorXd v = -n;
    v(0) += 1.0;
    const double vv = v.squaredNorm();
    if (vv < 1e-30) return Eigen::MatrixXd::Identity(d, d);
    return Eigen::MatrixXd::Identity(d, d) - (2.0 / vv) * v * v.transpose();
}

/// Composite rule over the union of the cells of both grids; weights include phi_T.
QuadratureRule time_rule(Eigen::Index set_nodes, Eigen::Index truth_nodes, const TimeSpec& time,
                         const QuadratureSpec& quad) {
    std::vector<double> breaks;
    for (Eigen::Index g = 0; g < set_nodes; ++g) breaks.push_back(static_cast<double>(g) / (set_nodes - 1));
    for (Eigen::Index g = 0; g < truth_nodes; ++g) breaks.push_back(static_cast<double>(g) / (truth_nodes - 1));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 breaks.end());

    const QuadratureRule base = gauss_legendre(quad.t_nodes, 0.0, 1.0);
    const auto cells = static_cast<Eigen::Index>(breaks.size() - 1);
    QuadratureRule rule{Eigen::VectorXd(cells * quad.t_nodes), Eigen::VectorXd(cells * quad.t_nodes)};
    for (Eigen::Index c = 0; c < cells; ++c) {
        const double lo = breaks[static_cast<std::size_t>(c)];
        const double width = breaks[static_cast<std::size_t>(c) + 1] - lo;
        for (Eigen::Index q = 0; q < quad.t_nodes; ++q) {
            const double t = lo + width * base.nodes(q);
            rule.nodes(c * quad.t_nodes + q) = t;
            rule.weights(c * quad.t_nodes + q) = width * base.weights(q) * time.density(t);
        }
    }
    return rule;
}

Eigen::MatrixXd positions(const TrajectorySet& set, double t) {
    const GridLocation loc = locate(set.nodes(), t);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(set.size()), set.dim());
    for (std::size_t j = 0; j < set.size(); ++j) {
        const auto& v = set[j].values();
        out.row(static_cast<Eigen::Index>(j)) = (1.0 - loc.weight) * v.row(loc.cell) + loc.weight * v.row(loc.cell + 1);
    }
    return out;
}

void require_compatible(const TrajectorySet& set, const MixtureModel& model) {
    if (set.dim() != model.dim()) throw ShapeError("trajectory set and model differ in dimension");
}

/// Visits every (time node, component, noise node) triple with its combined weight,
/// the observation y and the nearest track of `set`.
///
/// For each true track the noise is integrated in a rotated frame whose first
/// axis is normal to the boundary between the two tracks of `set` nearest to
/// it. Along any line min_j |y - mu_j|^2 is piecewise quadratic, so the inner
/// rule is split exactly at the kinks of that lower envelope; the outer
/// coordinates see a smooth integrand.
template <class Visit>
void integrate(const TrajectorySet& set, const MixtureModel& model, const QuadratureSpec& quad, Visit&& visit) {
    const Eigen::Index d = model.dim();
    const QuadratureRule time = time_rule(set.nodes(), model.truth.nodes(), model.time, quad);
    const auto k = static_cast<Eigen::Index>(set.size());
    const bool point_mass = model.noise.family == NoiseSpec::Family::Gaussian && model.noise.sigma == 0.0;

    AxisMap map;
    if (!point_mass) map = axis_map(model.noise, d, quad);
    const NoiseDensity density_of(model.noise, d);
    const QuadratureRule base = gauss_legendre(quad.y_nodes, -1.0, 1.0);

    // Outer tensor rule over the d - 1 transverse coordinates: noise values and
    // GL weight times Jacobian (the density is applied per full point).
    Eigen::Index outer_count = 1;
    for (Eigen::Index c = 1; c < d; ++c) outer_count *= base.nodes.size();
    Eigen::MatrixXd outer_eps(outer_count, d - 1);
    Eigen::VectorXd outer_w(outer_count);
    for (Eigen::Index o = 0; o < outer_count; ++o) {
        Eigen::Index rest = o;
        double w = 1.0;
        for (Eigen::Index c = 0; c + 1 < d; ++c) {
            const Eigen::Index idx = rest % base.nodes.size();
            rest /= base.nodes.size();
            const double u = map.u_max * base.nodes(idx);
            outer_eps(o, c) = map.eps(u);
            w *= map.u_max * base.weights(idx) * map.jacobian(u);
        }
        outer_w(o) = w;
    }

    Eigen::VectorXd y(d);
    Eigen::VectorXd eps(d);
    Eigen::VectorXd anchor(d);
    Eigen::VectorXd diff(d);
    Eigen::VectorXd slope(k);
    Eigen::VectorXd offset(k);
    std::vector<double> cuts;
    for (Eigen::Index a = 0; a < time.nodes.size(); ++a) {
        const double t = time.nodes(a);
        if (time.weights(a) == 0.0) continue;
        const Eigen::MatrixXd mu = positions(set, t);
        const Eigen::MatrixXd truth = positions(model.truth, t);

        auto nearest = [&](const Eigen::VectorXd& point) {
            Eigen::Index best = 0;
            double best_d2 = (point - mu.row(0).transpose()).squaredNorm();
            for (Eigen::Index l = 1; l < k; ++l) {
                const double d2 = (point - mu.row(l).transpose()).squaredNorm();
                if (d2 < best_d2) {
                    best = l;
                    best_d2 = d2;
                }
            }
            return std::pair{best, best_d2};
        };

        for (Eigen::Index j = 0; j < truth.rows(); ++j) {
            const double wj = time.weights(a) * model.weights(j);
            const Eigen::VectorXd center = truth.row(j).transpose();
            if (point_mass) {
                const auto [best, d2] = nearest(center);
                visit(wj, t, center, mu, best, d2);
                continue;
            }

            // Normal of the boundary between the two tracks nearest the center.
            Eigen::VectorXd normal = Eigen::VectorXd::Unit(d, 0);
            if (k >= 2) {
                Eigen::VectorXd dist = (mu.rowwise() - center.transpose()).rowwise().squaredNorm();
                Eigen::Index first = 0;
                dist.minCoeff(&first);
                dist(first) = std::numeric_limits<double>::infinity();
                Eigen::Index second = 0;
                dist.minCoeff(&second);
                const Eigen::VectorXd w = (mu.row(second) - mu.row(first)).transpose();
                if (w.norm() > 0.0) normal = w / w.norm();
            }
            const Eigen::MatrixXd q = frame(normal);

            for (Eigen::Index o = 0; o < outer_count; ++o) {
                anchor = center;
                for (Eigen::Index c = 1; c < d; ++c) anchor += outer_eps(o, c - 1) * q.col(c);
                // |anchor + s n - mu_l|^2 = s^2 + slope_l s + offset_l.
                for (Eigen::Index l = 0; l < k; ++l) {
                    diff = anchor - mu.row(l).transpose();
                    slope(l) = 2.0 * normal.dot(diff);
                    offset(l) = diff.squaredNorm();
                }
                // Kinks of the lower envelope of the lines slope_l s + offset_l.
                const double s_lo = map.eps(-map.u_max);
                const double s_hi = map.eps(map.u_max);
                cuts.assign(1, -map.u_max);
                Eigen::Index cur = 0;
                for (Eigen::Index l = 1; l < k; ++l) {
                    const double vl = slope(l) * s_lo + offset(l);
                    const double vc = slope(cur) * s_lo + offset(cur);
                    if (vl < vc || (vl == vc && slope(l) < slope(cur))) cur = l;
                }
                double s = s_lo;
                while (true) {
                    Eigen::Index next = -1;
                    double cross = s_hi;
                    for (Eigen::Index l = 0; l < k; ++l) {
                        if (slope(l) >= slope(cur)) continue;
                        const double x = (offset(l) - offset(cur)) / (slope(cur) - slope(l));
                        if (x > s && x < cross) {
                            cross = x;
                            next = l;
                        }
                    }
                    if (next < 0) break;
                    cuts.push_back(map.inverse(cross));
                    cur = next;
                    s = cross;
                }
                cuts.push_back(map.u_max);

                for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
                    const double lo = cuts[piece];
                    const double half = 0.5 * (cuts[piece + 1] - lo);
                    if (!(half > 0.0)) continue;
                    for (Eigen::Index g = 0; g < base.nodes.size(); ++g) {
                        const double u = lo + half * (base.nodes(g) + 1.0);
                        const double along = map.eps(u);
                        y = anchor + along * normal;
                        eps = y - center;
                        const double density = density_of(eps);
                        if (density == 0.0) continue;
                        const double w = wj * outer_w(o) * half * base.weights(g) * map.jacobian(u) * density;
                        const auto [best, d2] = nearest(y);
                        visit(w, t, y, mu, best, d2);
                    }
                }
            }
        }
    }
}

double roughness(const TrajectorySet& set) {
    double total = 0.0;
    for (const auto& track : set.tracks()) total += penalty(track, set.order());
    return total;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (t_nodes < 8) throw QuadratureError("quadrature: t_nodes must be >= 8");
    if (y_nodes < 16) throw QuadratureError("quadrature: y_nodes must be >= 16");
    if (y_radius < 0.0) throw QuadratureError("quadrature: y_radius must be >= 0 (0 = automatic)");
    if (mc_samples < 2) throw QuadratureError("quadrature: mc_samples must be >= 2");
}

MonteCarloEstimate objective_population_mc(const TrajectorySet& set, const MixtureModel& model,
                                           std::uint64_t samples, std::uint64_t seed, double lambda) {
    require_compatible(set, model);
    if (samples < 2) throw QuadratureError("Monte Carlo needs at least 2 samples");
    const Sample draw = sample(model, static_cast<Eigen::Index>(samples), seed);
    double mean = 0.0;
    double m2 = 0.0;
    for (Eigen::Index i = 0; i < draw.data.size(); ++i) {
        const Eigen::MatrixXd mu = positions(set, draw.data.times()(i));
        const double d2 = (mu.rowwise() - draw.data.targets().row(i)).rowwise().squaredNorm().minCoeff();
        const double delta = d2 - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (d2 - mean);
    }
    const auto n = static_cast<double>(samples);
    return {mean + lambda * roughness(set), std::sqrt(m2 / (n - 1.0) / n)};
}

double objective_population(const TrajectorySet& set, const MixtureModel& model, const QuadratureSpec& quad,
                            double lambda) {
    require_compatible(set, model);
    quad.validate();
    if (!(lambda >= 0.0)) throw DomainError("objective_population: lambda must be >= 0");
    if (model.dim() > kMaxTensorDim) {
        return objective_population_mc(set, model, quad.mc_samples, quad.mc_seed, lambda).value;
    }
    double misfit = 0.0;
    integrate(set, model, quad,
              [&](double w, double, const Eigen::VectorXd&, const Eigen::MatrixXd&, Eigen::Index, double d2) {
                  misfit += w * d2;
              });
    return misfit + lambda * roughness(set);
}

double gateaux_derivative(const TrajectorySet& set, const TrajectorySet& direction, const MixtureModel& model,
                          const QuadratureSpec& quad, double lambda) {
    require_compatible(set, model);
    quad.validate();
    if (direction.size() != set.size() || direction.nodes() != set.nodes() || direction.dim() != set.dim())
        throw ShapeError("gateaux_derivative: direction differs in shape from the set");

    double data_term = 0.0;
    if (model.dim() > kMaxTensorDim) {
        const Sample draw = sample(model, static_cast<Eigen::Index>(quad.mc_samples), quad.mc_seed);
        for (Eigen::Index i = 0; i < draw.data.size(); ++i) {
            const double t = draw.data.times()(i);
            const Eigen::MatrixXd mu = positions(set, t);
            Eigen::Index best = 0;
            (mu.rowwise() - draw.data.targets().row(i)).rowwise().squaredNorm().minCoeff(&best);
            const Eigen::VectorXd nu = eval(direction[static_cast<std::size_t>(best)], t);
            data_term += (mu.row(best) - draw.data.targets().row(i)).dot(nu.transpose());
        }
        data_term /= static_cast<double>(draw.data.size());
    } else {
        double cached_t = -1.0;
        Eigen::MatrixXd nu;
        integrate(set, model, quad,
                  [&](double w, double t, const Eigen::VectorXd& y, const Eigen::MatrixXd& mu, Eigen::Index best,
                      double) {
                      if (t != cached_t) {
                          nu = positions(direction, t);
                          cached_t = t;
                      }
                      data_term += w * (mu.row(best).transpose() - y).dot(nu.row(best).transpose());
                  });
    }

    double smooth_term = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) smooth_term += penalty_inner(direction[j], set[j], set.order());
    return 2.0 * data_term + 2.0 * lambda * smooth_term;
}

double yn_statistic(const TrajectorySet& set, const Dataset& data, const MixtureModel& model,
                    const QuadratureSpec& quad, double lambda) {
    const double fn = objective_empirical(set, data, lambda);
    const double finf = objective_population(set, model, quad, lambda);
    return std::sqrt(static_cast<double>(data.size())) * (fn - finf);
}

}  // namespace sda
