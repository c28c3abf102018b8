#include "sda/config.hpp"
#include "sda/errors.hpp"
#include "sda/population.hpp"
#include "sda/smoother.hpp"
#include "sda/solver.hpp"
#include "sda/synth.hpp"
#include "sda/trajectory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

using Tracks = std::vector<Eigen::MatrixXd>;

sda::TrajectorySet to_set(const Tracks& tracks, int order, double delta) {
    std::vector<sda::GridTrajectory> out;
    out.reserve(tracks.size());
    for (const auto& t : tracks) out.emplace_back(t);
    return {std::move(out), order, delta};
}

Tracks from_set(const sda::TrajectorySet& set) {
    Tracks out;
    for (const auto& t : set.tracks()) out.push_back(t.values());
    return out;
}

sda::Dataset to_dataset(const Eigen::VectorXd& times, const Eigen::MatrixXd& targets) { return {times, targets}; }

py::dict solve(const Eigen::VectorXd& times, const Eigen::MatrixXd& targets, std::size_t k, int order, double lam,
               Eigen::Index nodes, double delta, int restarts, std::uint64_t seed, const std::string& init,
               int threads) {
    sda::SmootherConfig cfg{order, lam, nodes, 1e-12};
    sda::SolveOptions opts;
    opts.k = k;
    opts.delta = delta;
    opts.restarts = restarts;
    opts.seed = seed;
    opts.init = sda::parse_init_strategy(init);
    opts.threads = threads;
    sda::SolveResult res = [&] {
        py::gil_scoped_release release;
        return sda::solve(to_dataset(times, targets), cfg, opts);
    }();
    py::dict out;
    out["tracks"] = from_set(res.set);
    out["labels"] = res.assignment.labels;
    out["objective"] = res.objective();
    out["objective_trace"] = res.report.objective_trace;
    out["iterations"] = res.report.iterations;
    out["converged"] = res.report.converged;
    out["separation_ok"] = res.report.separation_ok;
    out["min_gap"] = res.report.min_gap;
    return out;
}

py::tuple generate(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<Eigen::Index> n) {
    auto cfg = sda::load_config(config_path, true);
    if (seed) cfg.set_seed(*seed);
    const auto model = cfg.require_model().build(cfg.smoother.order);
    const auto draw = sda::sample(model, n.value_or(cfg.n), cfg.seed);
    return py::make_tuple(draw.data.times(), draw.data.targets(), draw.labels.labels);
}

}  // namespace

PYBIND11_MODULE(_sda, m) {
    m.doc() = "Smoothing with data association: fit k trajectories to unlabeled (t, y) observations.";

    auto base = py::register_exception<sda::Error>(m, "SdaError", PyExc_ValueError);
    (void)base;

    m.def("eval", [](const Eigen::MatrixXd& values, double t) { return sda::eval(sda::GridTrajectory(values), t); },
          py::arg("values"), py::arg("t"), "Piecewise-linear value of a grid trajectory at time t.");
    m.def("penalty", [](const Eigen::MatrixXd& values, int order) { return sda::penalty(sda::GridTrajectory(values), order); },
          py::arg("values"), py::arg("order"));
    m.def("h0_norm", [](const Eigen::MatrixXd& values, int order) { return sda::h0_norm(sda::GridTrajectory(values), order); },
          py::arg("values"), py::arg("order"));
    m.def("hs_distance",
          [](const Tracks& a, const Tracks& b, int order) { return sda::hs_distance(to_set(a, order, 1.0), to_set(b, order, 1.0)); },
          py::arg("a"), py::arg("b"), py::arg("order"));
    m.def("fit_single",
          [](const Eigen::VectorXd& times, const Eigen::MatrixXd& targets, Eigen::Index n_total, int order, double lam,
             Eigen::Index nodes, double ridge) {
              const sda::WeightedPoints pts{times, targets};
              return sda::fit_single(pts, n_total, sda::SmootherConfig{order, lam, nodes, ridge}).values();
          },
          py::arg("times"), py::arg("targets"), py::arg("n_total"), py::arg("order") = 2, py::arg("lam") = 1e-3,
          py::arg("nodes") = 201, py::arg("ridge") = 1e-12, "Penalized least-squares fit of a single track.");
    m.def("objective_empirical",
          [](const Tracks& tracks, int order, const Eigen::VectorXd& times, const Eigen::MatrixXd& targets, double lam) {
              return sda::objective_empirical(to_set(tracks, order, 1.0), to_dataset(times, targets), lam);
          },
          py::arg("tracks"), py::arg("order"), py::arg("times"), py::arg("targets"), py::arg("lam"));
    m.def("assign",
          [](const Tracks& tracks, const Eigen::VectorXd& times, const Eigen::MatrixXd& targets) {
              return sda::assign(to_set(tracks, 1, 1.0), to_dataset(times, targets)).labels;
          },
          py::arg("tracks"), py::arg("times"), py::arg("targets"));
    m.def("solve", &solve, py::arg("times"), py::arg("targets"), py::arg("k") = 2, py::arg("order") = 2,
          py::arg("lam") = 1e-3, py::arg("nodes") = 201, py::arg("delta") = 1.0, py::arg("restarts") = 4,
          py::arg("seed") = 0, py::arg("init") = "perturbed-global", py::arg("threads") = 1,
          "Lloyd-type minimization of the empirical objective; returns a dict with tracks and the run report.");
    m.def("generate", &generate, py::arg("config"), py::arg("seed") = py::none(), py::arg("n") = py::none(),
          "Samples (times, targets, labels) from the model section of a JSON config.");
}
