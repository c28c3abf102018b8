#include "sda/solver.hpp"

#include "sda/errors.hpp"
#include "sda/parallel.hpp"
#include "sda/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace sda {

namespace {

double squared_distance(const GridTrajectory& traj, const GridLocation& loc, const Eigen::MatrixXd& targets,
                        Eigen::Index row) {
    const auto& v = traj.values();
    const double w = loc.weight;
    double acc = 0.0;
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const double mu = (1.0 - w) * v(loc.cell, c) + w * v(loc.cell + 1, c);
        const double r = targets(row, c) - mu;
        acc += r * r;
    }
    return acc;
}

struct Nearest {
    int index = 0;
    double distance2 = 0.0;
};

Nearest nearest(const TrajectorySet& set, const Dataset& data, Eigen::Index i) {
    const GridLocation loc = locate(set.nodes(), data.times()(i));
    Nearest best{0, squared_distance(set[0], loc, data.targets(), i)};
    for (std::size_t j = 1; j < set.size(); ++j) {
        const double d2 = squared_distance(set[j], loc, data.targets(), i);
        if (d2 < best.distance2) best = {static_cast<int>(j), d2};
    }
    return best;
}

void require_compatible(const TrajectorySet& set, const Dataset& data) {
    if (set.dim() != data.dim()) {
        throw ShapeError("trajectory dimension " + std::to_string(set.dim()) +
                         " does not match data dimension " + std::to_string(data.dim()));
    }
}

std::mt19937_64 restart_engine(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

/// Lloyd iterations from a given starting set.
SolveResult iterate(TrajectorySet set, const Dataset& data, const SmootherConfig& cfg,
                    const SolveOptions& opts) {
    SolveReport report;
    report.objective_trace.push_back(objective_empirical(set, data, cfg.lambda));
    Assignment labels = assign(set, data);
    for (int it = 1; it <= opts.max_iterations; ++it) {
        set = fit_assignment(labels, data, opts.k, cfg, set.delta());
        report.objective_trace.push_back(objective_empirical(set, data, cfg.lambda));
        report.iterations = it;

        Assignment next = assign(set, data);
        if (next == labels) {
            report.converged = true;
            break;
        }
        const double before = report.objective_trace[report.objective_trace.size() - 2];
        const double after = report.objective_trace.back();
        labels = std::move(next);
        // Guard against floating-point cycling between equal-cost associations.
        if (before - after <= opts.relative_tolerance * std::abs(before)) break;
    }
    return {std::move(set), std::move(labels), std::move(report)};
}

SolveResult best_of(std::vector<std::optional<SolveResult>> runs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r]->objective() < runs[best]->objective()) best = r;
    }
    SolveResult out = std::move(*runs[best]);
    out.report.restarts_used = static_cast<int>(runs.size());
    out.report.best_restart = static_cast<int>(best);
    const SeparationResult sep = separation_check(out.set);
    out.report.separation_ok = sep.ok;
    out.report.min_gap = sep.min_gap;
    return out;
}

void validate_problem(const Dataset& data, const SmootherConfig& cfg, const SolveOptions& opts) {
    cfg.validate();
    if (opts.k < 1) throw DomainError("solve: k must be >= 1");
    if (data.size() < static_cast<Eigen::Index>(opts.k)) {
        throw TooFewPoints("solve: " + std::to_string(data.size()) + " observations for k = " +
                           std::to_string(opts.k));
    }
    if (opts.restarts < 1) throw DomainError("solve: restarts must be >= 1");
    if (opts.max_iterations < 1) throw DomainError("solve: max_iterations must be >= 1");
}

}  // namespace

Assignment assign(const TrajectorySet& set, const Dataset& data) {
    require_compatible(set, data);
    Assignment a;
    a.labels.resize(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) a.labels[static_cast<std::size_t>(i)] = nearest(set, data, i).index;
    return a;
}

double objective_empirical(const TrajectorySet& set, const Dataset& data, double lambda) {
    require_compatible(set, data);
    if (data.size() == 0) throw DataError("objective: empty dataset");
    if (!(lambda > 0.0)) throw DomainError("objective: lambda must be > 0");
    double misfit = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) misfit += nearest(set, data, i).distance2;
    double roughness = 0.0;
    for (const auto& track : set.tracks()) roughness += penalty(track, set.order());
    return misfit / static_cast<double>(data.size()) + lambda * roughness;
}

TrajectorySet fit_assignment(const Assignment& labels, const Dataset& data, std::size_t k,
                             const SmootherConfig& cfg, double delta) {
    if (static_cast<Eigen::Index>(labels.labels.size()) != data.size())
        throw ShapeError("assignment length does not match the dataset");
    std::vector<std::vector<Eigen::Index>> members(k);
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        const int j = labels.labels[i];
        if (j < 0 || static_cast<std::size_t>(j) >= k) throw DomainError("assignment label out of range");
        members[static_cast<std::size_t>(j)].push_back(static_cast<Eigen::Index>(i));
    }

    std::vector<GridTrajectory> tracks(k);
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < k; ++j) {
        if (members[j].empty()) {
            empty.push_back(j);
            continue;
        }
        tracks[j] = fit_single(data.select(members[j]), data.size(), cfg);
    }
    if (empty.empty()) return {std::move(tracks), cfg.order, delta};

    // Reseed: each empty track becomes the constant at the observation farthest
    // from its current center; distances are updated after every reseed.
    std::vector<double> dist2(static_cast<std::size_t>(data.size()), 0.0);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const auto j = static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(i)]);
        if (tracks[j].nodes() > 0) {
            dist2[static_cast<std::size_t>(i)] =
                squared_distance(tracks[j], locate(cfg.nodes, data.times()(i)), data.targets(), i);
        } else {
            dist2[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
        }
    }
    for (const std::size_t j : empty) {
        const auto far = static_cast<Eigen::Index>(
            std::distance(dist2.begin(), std::max_element(dist2.begin(), dist2.end())));
        tracks[j] = GridTrajectory::constant(cfg.nodes, data.targets().row(far).transpose());
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            const double d2 = (data.targets().row(i) - data.targets().row(far)).squaredNorm();
            dist2[static_cast<std::size_t>(i)] = std::min(dist2[static_cast<std::size_t>(i)], d2);
        }
    }
    return {std::move(tracks), cfg.order, delta};
}

LloydStep lloyd_step(const TrajectorySet& set, const Dataset& data, const SmootherConfig& cfg) {
    if (set.order() != cfg.order || set.nodes() != cfg.nodes)
        throw ShapeError("lloyd_step: smoother config does not match the trajectory set");
    Assignment labels = assign(set, data);
    TrajectorySet next = fit_assignment(labels, data, set.size(), cfg, set.delta());
    return {std::move(next), std::move(labels)};
}

InitStrategy parse_init_strategy(std::string_view name) {
    if (name == "perturbed-global") return InitStrategy::PerturbedGlobal;
    if (name == "random-points") return InitStrategy::RandomPoints;
    throw ConfigError("unknown initialization strategy '" + std::string(name) + "'");
}

std::string_view to_string(InitStrategy init) {
    return init == InitStrategy::PerturbedGlobal ? "perturbed-global" : "random-points";
}

TrajectorySet initialize(const Dataset& data, const SmootherConfig& cfg, const SolveOptions& opts,
                         int restart) {
    auto rng = restart_engine(opts.seed, restart);
    const Eigen::Index n = data.size();
    std::vector<GridTrajectory> tracks;
    tracks.reserve(opts.k);

    if (opts.init == InitStrategy::RandomPoints) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t j = 0; j < opts.k; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, idx.size() - 1);
            std::swap(idx[j], idx[pick(rng)]);
            tracks.push_back(GridTrajectory::constant(cfg.nodes, data.targets().row(idx[j]).transpose()));
        }
        return {std::move(tracks), cfg.order, opts.delta};
    }

    const GridTrajectory global = fit_single(data.all(), n, cfg);
    Eigen::MatrixXd residuals(n, data.dim());
    for (Eigen::Index i = 0; i < n; ++i)
        residuals.row(i) = data.targets().row(i) - eval(global, data.times()(i)).transpose();

    // k-means++ seeding on the residual vectors.
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Eigen::Index chosen = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    for (std::size_t j = 0;; ++j) {
        const Eigen::VectorXd offset = residuals.row(chosen).transpose();
        tracks.push_back(global + GridTrajectory::constant(cfg.nodes, offset));
        if (j + 1 == opts.k) break;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dist = (residuals.row(i) - residuals.row(chosen)).squaredNorm();
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], dist);
        }
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        if (total > 0.0) {
            std::discrete_distribution<Eigen::Index> pick(d2.begin(), d2.end());
            chosen = pick(rng);
        } else {
            chosen = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
        }
    }
    return {std::move(tracks), cfg.order, opts.delta};
}

SolveResult solve(const Dataset& data, const SmootherConfig& cfg, const SolveOptions& opts) {
    validate_problem(data, cfg, opts);
    std::vector<std::optional<SolveResult>> slots(static_cast<std::size_t>(opts.restarts));
    parallel_for(slots.size(), opts.threads, [&](std::size_t r) {
        slots[r] = iterate(initialize(data, cfg, opts, static_cast<int>(r)), data, cfg, opts);
    });
    return best_of(std::move(slots));
}

SolveResult solve_from_assignments(const Dataset& data, const SmootherConfig& cfg,
                                   const SolveOptions& opts,
                                   const std::vector<Assignment>& initial) {
    SolveOptions checked = opts;
    checked.restarts = static_cast<int>(initial.size());
    validate_problem(data, cfg, checked);
    std::vector<std::optional<SolveResult>> slots(initial.size());
    parallel_for(slots.size(), opts.threads, [&](std::size_t r) {
        slots[r] = iterate(fit_assignment(initial[r], data, opts.k, cfg, opts.delta), data, cfg, opts);
    });
    return best_of(std::move(slots));
}

}  // namespace sda
