#include "sda/config.hpp"

#include "sda/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace sda {

namespace {

using nlohmann::json;

struct Context {
    bool strict = false;
    std::vector<std::string>* warnings = nullptr;
};

/// Reads one JSON object, remembering which keys were consumed.
class Section {
public:
    Section(const json& obj, std::string path, Context& ctx) : obj_(obj), path_(std::move(path)), ctx_(ctx) {
        if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return required<T>(key);
    }

    template <class T>
    T required(const std::string& key) {
        used_.insert(key);
        if (!has(key)) throw ConfigError(where(key) + ": required key is missing");
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!has(key)) throw ConfigError(where(key) + ": required key is missing");
        return obj_.at(key);
    }

    Section child(const std::string& key) { return {raw(key), where(key), ctx_}; }

    /// Reports keys nobody asked for.
    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (used_.count(key)) continue;
            const std::string msg = where(key) + ": unknown key";
            if (ctx_.strict) throw ConfigError(msg);
            if (ctx_.warnings) ctx_.warnings->push_back(msg);
        }
    }

    [[nodiscard]] std::string where(const std::string& key) const { return path_ + "." + key; }
    [[nodiscard]] Context& context() const { return ctx_; }

private:
    const json& obj_;
    std::string path_;
    Context& ctx_;
    std::set<std::string> used_;
};

ScalarPrimitive parse_primitive(const json& node, const std::string& path, Context& ctx) {
    Section s(node, path, ctx);
    const auto kind = s.required<std::string>("kind");
    ScalarPrimitive p;
    if (kind == "constant") {
        p = ScalarPrimitive::constant(s.required<double>("value"));
    } else if (kind == "affine") {
        p = ScalarPrimitive::affine(s.required<double>("slope"), s.get<double>("intercept", 0.0));
    } else if (kind == "sinusoid") {
        p = ScalarPrimitive::sinusoid(s.required<double>("amplitude"), s.get<double>("frequency", 1.0),
                                      s.get<double>("phase", 0.0), s.get<double>("offset", 0.0));
    } else if (kind == "cubic") {
        const auto c = s.required<std::vector<double>>("coefficients");
        if (c.size() != 4) throw ConfigError(s.where("coefficients") + ": expected 4 numbers");
        p = ScalarPrimitive::cubic(c[0], c[1], c[2], c[3]);
    } else {
        throw ConfigError(s.where("kind") + ": unknown primitive '" + kind + "'");
    }
    s.finish();
    return p;
}

ModelConfig parse_model(Section s) {
    ModelConfig m;
    m.delta = s.required<double>("delta");
    m.nodes = s.get<Eigen::Index>("nodes", 201);

    const json& tracks = s.raw("tracks");
    if (!tracks.is_array() || tracks.empty()) throw ConfigError(s.where("tracks") + ": expected a non-empty array");
    for (std::size_t j = 0; j < tracks.size(); ++j) {
        const std::string path = s.where("tracks") + "[" + std::to_string(j) + "]";
        if (!tracks[j].is_array() || tracks[j].empty())
            throw ConfigError(path + ": expected an array of per-coordinate primitives");
        TrajectoryFormula f;
        for (std::size_t c = 0; c < tracks[j].size(); ++c)
            f.push_back(parse_primitive(tracks[j][c], path + "[" + std::to_string(c) + "]", s.context()));
        m.tracks.push_back(std::move(f));
    }

    if (s.has("weights")) {
        const auto w = s.required<std::vector<double>>("weights");
        m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    } else {
        const auto k = static_cast<Eigen::Index>(m.tracks.size());
        m.weights = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    }

    Section noise = s.child("noise");
    const auto family = noise.required<std::string>("family");
    if (family == "gaussian") {
        m.noise = NoiseSpec::gaussian(noise.required<double>("sigma"));
    } else if (family == "student_t") {
        m.noise = NoiseSpec::student_t(noise.required<double>("dof"), noise.get<double>("scale", 1.0));
    } else {
        throw ConfigError(noise.where("family") + ": unknown noise family '" + family + "'");
    }
    noise.finish();

    if (s.has("time")) {
        Section time = s.child("time");
        const auto tf = time.required<std::string>("family");
        if (tf == "uniform") {
            m.time = TimeSpec::uniform();
        } else if (tf == "beta") {
            m.time = TimeSpec::beta(time.required<double>("a"), time.required<double>("b"));
        } else {
            throw ConfigError(time.where("family") + ": unknown time family '" + tf + "'");
        }
        time.finish();
    }
    s.finish();
    return m;
}

std::vector<Eigen::Index> parse_sizes(Section& s, const std::string& key, std::vector<Eigen::Index> fallback) {
    return s.get<std::vector<Eigen::Index>>(key, std::move(fallback));
}

}  // namespace

MixtureModel ModelConfig::build(int order) const {
    return make_model(tracks, weights, noise, time, delta, nodes, order);
}

const ModelConfig& RunConfig::require_model() const {
    if (!model) throw ConfigError("config: this command needs a 'model' section");
    return *model;
}

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    solver.seed = value;
    quadrature.mc_seed = value;
    rate_study.base_seed = value;
    grad_check.seed = value;
    gamma_check.seed = value;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "parse error at line L, column C: ...".
        throw ConfigError(std::string("config: ") + e.what());
    }

    Context ctx{strict, warnings};
    Section root(doc, "config", ctx);
    RunConfig cfg;
    const auto seed = root.get<std::uint64_t>("seed", 0);

    if (root.has("model")) {
        cfg.model = parse_model(root.child("model"));
        cfg.source = doc.at("model").dump();
    }

    if (root.has("data")) {
        Section s = root.child("data");
        cfg.n = s.required<Eigen::Index>("n");
        s.finish();
    }

    if (root.has("smoother")) {
        Section s = root.child("smoother");
        cfg.smoother.order = s.get<int>("order", cfg.smoother.order);
        cfg.smoother.lambda = s.get<double>("lambda", cfg.smoother.lambda);
        cfg.smoother.nodes = s.get<Eigen::Index>("nodes", cfg.smoother.nodes);
        cfg.smoother.ridge = s.get<double>("ridge", cfg.smoother.ridge);
        s.finish();
    }
    try {
        cfg.smoother.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("config.smoother: ") + e.what());
    }

    cfg.solver.delta = cfg.model ? cfg.model->delta : cfg.solver.delta;
    if (root.has("solver")) {
        Section s = root.child("solver");
        cfg.solver.k = s.get<std::size_t>("k", cfg.model ? cfg.model->tracks.size() : cfg.solver.k);
        cfg.solver.restarts = s.get<int>("restarts", cfg.solver.restarts);
        cfg.solver.max_iterations = s.get<int>("max_iterations", cfg.solver.max_iterations);
        cfg.solver.relative_tolerance = s.get<double>("relative_tolerance", cfg.solver.relative_tolerance);
        cfg.solver.delta = s.get<double>("delta", cfg.solver.delta);
        if (s.has("init")) cfg.solver.init = parse_init_strategy(s.required<std::string>("init"));
        s.finish();
    } else if (cfg.model) {
        cfg.solver.k = cfg.model->tracks.size();
    }

    if (root.has("quadrature")) {
        Section s = root.child("quadrature");
        cfg.quadrature.t_nodes = s.get<int>("t_nodes", cfg.quadrature.t_nodes);
        cfg.quadrature.y_nodes = s.get<int>("y_nodes", cfg.quadrature.y_nodes);
        cfg.quadrature.y_radius = s.get<double>("y_radius", cfg.quadrature.y_radius);
        cfg.quadrature.mc_samples = s.get<std::uint64_t>("mc_samples", cfg.quadrature.mc_samples);
        s.finish();
    }

    if (root.has("rate_study")) {
        Section s = root.child("rate_study");
        cfg.rate_study.n_grid = parse_sizes(s, "n_grid", cfg.rate_study.n_grid);
        cfg.rate_study.replicates = s.get<int>("replicates", cfg.rate_study.replicates);
        cfg.rate_study.reference_n = s.get<Eigen::Index>("reference_n", cfg.rate_study.reference_n);
        cfg.rate_study.reference_restarts = s.get<int>("reference_restarts", cfg.rate_study.reference_restarts);
        s.finish();
    }

    if (root.has("grad_check")) {
        Section s = root.child("grad_check");
        cfg.grad_check.directions = s.get<int>("directions", cfg.grad_check.directions);
        cfg.grad_check.step = s.get<double>("step", cfg.grad_check.step);
        cfg.grad_check.perturbation = s.get<double>("perturbation", cfg.grad_check.perturbation);
        s.finish();
    }

    if (root.has("gamma_check")) {
        Section s = root.child("gamma_check");
        cfg.gamma_check.n_grid = parse_sizes(s, "n_grid", cfg.gamma_check.n_grid);
        cfg.gamma_check.replicates = s.get<int>("replicates", cfg.gamma_check.replicates);
        s.finish();
    }

    root.finish();
    cfg.set_seed(seed);
    return cfg;
}

RunConfig load_config(const std::string& path, bool strict, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), strict, warnings);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace sda
