#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* const kSmallConfig = R"({
  "seed": 11,
  "model": {
    "nodes": 41,
    "delta": 1.0,
    "weights": [0.5, 0.5],
    "noise": {"family": "gaussian", "sigma": 0.25},
    "tracks": [[{"kind": "sinusoid", "amplitude": 0.5, "frequency": 1, "phase": 0, "offset": 1}],
               [{"kind": "constant", "value": -1}]]
  },
  "data": {"n": 300},
  "smoother": {"order": 2, "lambda": 0.001, "nodes": 41},
  "solver": {"k": 2, "restarts": 2},
  "rate_study": {"n_grid": [64, 128, 256], "replicates": 3, "reference_n": 2048},
  "grad_check": {"directions": 3},
  "gamma_check": {"n_grid": [100, 200], "replicates": 4}
})";

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("sda_cli_" + std::to_string(::getpid()) + "_" +
                                           std::to_string(Catch::getSeed()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    [[nodiscard]] std::string path(const std::string& name) const { return (dir / name).string(); }
    [[nodiscard]] std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }
};

int run(const std::string& args) {
    const std::string cmd = std::string(SDA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("generate and fit", "[cli]") {
    Sandbox box;
    const auto cfg = box.write("small.json", kSmallConfig);
    REQUIRE(run("generate --config " + cfg + " --out " + box.path("data.csv")) == 0);
    const auto meta = nlohmann::json::parse(slurp(box.path("data.csv.meta.json")));
    CHECK(meta["n"] == 300);
    CHECK(meta["seed"] == 11);

    REQUIRE(run("fit --config " + cfg + " --data " + box.path("data.csv") + " --out " + box.path("fit.csv")) == 0);
    const auto report = nlohmann::json::parse(slurp(box.path("fit.csv.report.json")));
    CHECK(report.contains("objective_trace"));
    CHECK(report.contains("min_gap"));
    CHECK(report["iterations"].get<int>() >= 1);
    CHECK(slurp(box.path("fit.csv")).rfind("t,track,y1\n", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs and thread counts", "[cli]") {
    Sandbox box;
    const auto cfg = box.write("small.json", kSmallConfig);
    REQUIRE(run("generate --config " + cfg + " --out " + box.path("a.csv")) == 0);
    REQUIRE(run("generate --config " + cfg + " --out " + box.path("b.csv")) == 0);
    CHECK(slurp(box.path("a.csv")) == slurp(box.path("b.csv")));
    REQUIRE(run("generate --config " + cfg + " --seed 12 --out " + box.path("c.csv")) == 0);
    CHECK(slurp(box.path("a.csv")) != slurp(box.path("c.csv")));

    REQUIRE(run("rate-study --config " + cfg + " --threads 1 --out " + box.path("r1.csv")) == 0);
    REQUIRE(run("rate-study --config " + cfg + " --threads 3 --out " + box.path("r3.csv")) == 0);
    CHECK(slurp(box.path("r1.csv")) == slurp(box.path("r3.csv")));
    CHECK(slurp(box.path("r1.csv.summary.json")) == slurp(box.path("r3.csv.summary.json")));
}

TEST_CASE("diagnostic commands", "[cli]") {
    Sandbox box;
    const auto cfg = box.write("small.json", kSmallConfig);
    REQUIRE(run("grad-check --config " + cfg + " --out " + box.path("grad.json")) == 0);
    const auto grad = nlohmann::json::parse(slurp(box.path("grad.json")));
    CHECK(grad["max_relative_error"].get<double>() < 1e-3);
    REQUIRE(run("gamma-check --config " + cfg + " --out " + box.path("gamma.json")) == 0);
    const auto gamma = nlohmann::json::parse(slurp(box.path("gamma.json")));
    REQUIRE(!gamma["per_n"].empty());
    CHECK(gamma["per_n"][0].contains("yn_sd"));
}

TEST_CASE("exit codes", "[cli]") {
    Sandbox box;
    const auto cfg = box.write("small.json", kSmallConfig);
    SECTION("input errors exit with 2") {
        CHECK(run("") == 2);
        CHECK(run("generate --config " + cfg) == 2);
        CHECK(run("generate --config " + box.path("missing.json") + " --out " + box.path("x.csv")) == 2);
        const auto typo = box.write("typo.json", R"({"seed": 1, "smoother": {"lamda": 0.1}})");
        CHECK(run("grad-check --config " + typo + " --strict") == 2);
        const auto broken = box.write("broken.csv", "t,y1\n0.5,abc\n");
        CHECK(run("fit --config " + cfg + " --data " + broken + " --out " + box.path("f.csv")) == 2);
        const auto wide = box.write("wide.csv", "t,y1,y2\n0.5,1,2\n0.6,1,2\n");
        CHECK(run("fit --config " + cfg + " --data " + wide + " --out " + box.path("f.csv")) == 0);
        const auto crossing = box.write("crossing.json", R"({
          "model": {"nodes": 41, "delta": 0.1, "noise": {"family": "gaussian", "sigma": 0.1}, "tracks": [[{"kind": "affine", "slope": 1, "intercept": 0}],
                                                          [{"kind": "affine", "slope": -1, "intercept": 1}]]},
          "smoother": {"nodes": 41}
        })");
        CHECK(run("generate --config " + crossing + " --out " + box.path("g.csv")) == 2);
    }
    SECTION("numerical failures exit with 3") {
        auto json = nlohmann::json::parse(kSmallConfig);
        json["quadrature"] = {{"y_radius", 0.1}};
        const auto tight = box.write("tight.json", json.dump());
        CHECK(run("gamma-check --config " + tight) == 3);
    }
}
