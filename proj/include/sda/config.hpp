#pragma once

#include "sda/experiments.hpp"
#include "sda/population.hpp"
#include "sda/smoother.hpp"
#include "sda/solver.hpp"
#include "sda/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sda {

/// Ground-truth model as written in a config file.
struct ModelConfig {
    std::vector<TrajectoryFormula> tracks;
    Eigen::VectorXd weights;
    NoiseSpec noise;
    TimeSpec time;
    double delta = 1.0;
    Eigen::Index nodes = 201;

    [[nodiscard]] MixtureModel build(int order) const;
};

/// Everything a CLI command can read from one JSON config file. See
/// configs/README.md for the schema.
struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<ModelConfig> model;
    Eigen::Index n = 1000;
    SmootherConfig smoother;
    SolveOptions solver;
    QuadratureSpec quadrature;
    RateStudyConfig rate_study;
    GradCheckConfig grad_check;
    GammaCheckConfig gamma_check;
    std::string source;  // canonical JSON text of the "model" section, for hashing

    [[nodiscard]] const ModelConfig& require_model() const;
    /// Sets the seed of every section (solver, studies, Monte-Carlo fallback).
    void set_seed(std::uint64_t value);
};

/// Parses a config. Unknown keys are errors when `strict`, otherwise they are
/// appended to `warnings`. Parse errors carry the line and column.
RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings = nullptr);
RunConfig load_config(const std::string& path, bool strict, std::vector<std::string>* warnings = nullptr);

/// FNV-1a 64-bit hash, used to fingerprint model sections.
std::uint64_t fnv1a(const std::string& text);

}  // namespace sda
