#include "dense_oracle.hpp"
#include "helpers.hpp"

#include "sda/errors.hpp"
#include "sda/smoother.hpp"
#include "sda/trajectory.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace sda;
using Catch::Approx;
using sda::testing::dense_fit;
using sda::testing::random_points;

TEST_CASE("fit_single examples", "[smoother]") {
    SECTION("constant targets give the constant") {
        for (int s = 1; s <= 3; ++s) {
            WeightedPoints p{Eigen::Vector4d(0.1, 0.3, 0.6, 0.95), Eigen::MatrixXd::Constant(4, 2, 2.5)};
            const SmootherConfig cfg{s, 0.7, 11, 1e-12};
            const auto fit = fit_single(p, 4, cfg);
            CHECK((fit.values().array() - 2.5).abs().maxCoeff() < 1e-9);
            CHECK(single_objective(fit, p, 4, cfg) == Approx(0.0).margin(1e-15));
        }
    }
    SECTION("a single point with s = 1 gives the constant") {
        WeightedPoints p{Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 4.0)};
        const auto fit = fit_single(p, 1, SmootherConfig{1, 0.1, 21, 0.0});
        CHECK((fit.values().array() - 4.0).abs().maxCoeff() < 1e-10);
    }
    SECTION("noise-free affine data is reproduced for s = 2") {
        WeightedPoints p{Eigen::VectorXd::LinSpaced(50, 0.0, 1.0), Eigen::MatrixXd(50, 1)};
        p.targets.col(0) = p.times;
        const SmootherConfig cfg{2, 1.0, 31, 1e-12};
        const auto fit = fit_single(p, 50, cfg);
        for (Eigen::Index g = 0; g < fit.nodes(); ++g) CHECK(std::abs(fit.values()(g, 0) - fit.node_time(g)) < 1e-8);
    }
    SECTION("empty clusters and bad inputs") {
        WeightedPoints empty{Eigen::VectorXd(0), Eigen::MatrixXd(0, 1)};
        CHECK_THROWS_AS(fit_single(empty, 5, SmootherConfig{}), EmptyCluster);
        WeightedPoints bad{Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, std::nan(""))};
        CHECK_THROWS_AS(fit_single(bad, 1, SmootherConfig{}), DataError);
        WeightedPoints outside{Eigen::VectorXd::Constant(1, 1.5), Eigen::MatrixXd::Constant(1, 1, 0.0)};
        CHECK_THROWS_AS(fit_single(outside, 1, SmootherConfig{}), DataError);
        WeightedPoints ok{Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.0)};
        CHECK_THROWS_AS(fit_single(ok, 1, SmootherConfig{2, 0.0, 11, 1e-12}), DomainError);
        CHECK_THROWS_AS(fit_single(ok, 1, SmootherConfig{3, 0.1, 3, 1e-12}), GridTooCoarse);
    }
}

TEST_CASE("fit_single matches the dense normal equations", "[smoother][oracle]") {
    SECTION("small instance n = 6, m = 7, s = 1, lambda = 0.5") {
        std::mt19937_64 rng(2024);
        const auto p = random_points(6, 1, rng);
        const SmootherConfig cfg{1, 0.5, 7, 1e-12};
        const Eigen::MatrixXd dense = dense_fit(p, 6, cfg);
        const auto fit = fit_single(p, 6, cfg);
        CHECK((fit.values() - dense).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SECTION("random instances with m <= 50") {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<int> order(1, 3);
        std::uniform_int_distribution<Eigen::Index> size(5, 50);
        for (int trial = 0; trial < 40; ++trial) {
            const int s = order(rng);
            const Eigen::Index m = std::max<Eigen::Index>(size(rng), s + 2);
            const auto p = random_points(size(rng), 2, rng);
            const Eigen::Index n_total = p.count() + 3;
            const SmootherConfig cfg{s, std::pow(10.0, -static_cast<double>(trial % 5)), m, 1e-12};
            const Eigen::MatrixXd dense = dense_fit(p, n_total, cfg);
            const auto fit = fit_single(p, n_total, cfg);
            REQUIRE((fit.values() - dense).norm() <= 1e-10 * std::max(1.0, dense.norm()));
        }
    }
}

TEST_CASE("polynomial_limit_fit", "[smoother][oracle]") {
    SECTION("points on a line, s = 2") {
        WeightedPoints p{Eigen::Vector3d(0.1, 0.4, 0.8), Eigen::MatrixXd(3, 1)};
        p.targets.col(0) = (2.0 * p.times.array() - 1.0).matrix();
        const auto fit = polynomial_limit_fit(p, 2, 11);
        for (Eigen::Index g = 0; g < 11; ++g) CHECK(fit.values()(g, 0) == Approx(2.0 * fit.node_time(g) - 1.0).margin(1e-12));
    }
    SECTION("degree zero is the mean") {
        WeightedPoints p{Eigen::Vector2d(0.0, 1.0), Eigen::MatrixXd(2, 1)};
        p.targets << 0.0, 2.0;
        const auto fit = polynomial_limit_fit(p, 1, 5);
        CHECK((fit.values().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    SECTION("large lambda approaches the polynomial fit") {
        std::mt19937_64 rng(8);
        const auto p = random_points(20, 1, rng);
        const SmootherConfig cfg{2, 1e8, 51, 1e-12};
        const auto fit = fit_single(p, 20, cfg);
        const auto limit = polynomial_limit_fit(p, 2, 51);
        CHECK((fit.values() - limit.values()).cwiseAbs().maxCoeff() < 1e-4);
    }
    SECTION("large lambda limit for s = 1, 3") {
        std::mt19937_64 rng(9);
        for (const int s : {1, 3}) {
            const auto p = random_points(20, 2, rng);
            const auto fit = fit_single(p, 20, SmootherConfig{s, 1e8, 51, 1e-12});
            const auto limit = polynomial_limit_fit(p, s, 51);
            CHECK((fit.values() - limit.values()).cwiseAbs().maxCoeff() < 1e-4);
        }
    }
    SECTION("too few distinct times") {
        WeightedPoints p{Eigen::Vector3d(0.5, 0.5, 0.5), Eigen::MatrixXd::Zero(3, 1)};
        CHECK_THROWS_AS(polynomial_limit_fit(p, 2, 11), DegenerateDesign);
    }
}

TEST_CASE("fit_single is a stationary point of its objective", "[smoother][property]") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_points(25, 2, rng);
        const SmootherConfig cfg{1 + trial % 3, 0.01, 21, 1e-12};
        const auto fit = fit_single(p, 30, cfg);
        const double base = single_objective(fit, p, 30, cfg);
        for (int k = 0; k < 20; ++k) {
            Eigen::MatrixXd u(21, 2);
            for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = normal(rng);
            const GridTrajectory moved(fit.values() + 1e-4 * u);
            CHECK(single_objective(moved, p, 30, cfg) >= base - 1e-9);
        }
    }
}

TEST_CASE("fit_single is linear in the targets", "[smoother][property]") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        auto p1 = random_points(15, 1, rng);
        auto p2 = p1;
        p2.targets = random_points(15, 1, rng).targets;
        auto sum = p1;
        sum.targets = p1.targets + p2.targets;
        const SmootherConfig cfg{2, 0.05, 25, 1e-12};
        const Eigen::MatrixXd lhs = fit_single(sum, 15, cfg).values();
        const Eigen::MatrixXd rhs = fit_single(p1, 15, cfg).values() + fit_single(p2, 15, cfg).values();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("coordinates are fitted independently", "[smoother][property]") {
    std::mt19937_64 rng(41);
    const auto p = random_points(30, 3, rng);
    const SmootherConfig cfg{2, 0.01, 33, 1e-12};
    const auto joint = fit_single(p, 30, cfg);
    for (Eigen::Index c = 0; c < 3; ++c) {
        WeightedPoints one{p.times, p.targets.col(c)};
        const auto solo = fit_single(one, 30, cfg);
        CHECK((joint.values().col(c) - solo.values().col(0)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}
