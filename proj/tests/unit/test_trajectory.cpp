#include "helpers.hpp"

#include "sda/errors.hpp"
#include "sda/trajectory.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace sda;
using sda::testing::from_function;
using Catch::Approx;

namespace {

TrajectorySet single(GridTrajectory t, int s, double delta = 1.0) { return {{std::move(t)}, s, delta}; }

}  // namespace

TEST_CASE("eval interpolates between grid nodes", "[trajectory][eval]") {
    SECTION("constant trajectory") {
        const auto traj = GridTrajectory::constant(11, Eigen::Vector2d(1.5, -2.0));
        const Eigen::VectorXd v = eval(traj, 0.37);
        CHECK(v(0) == 1.5);
        CHECK(v(1) == -2.0);
    }
    SECTION("two-node midpoint") {
        const auto traj = from_function(2, [](double t) { return t; });
        CHECK(eval(traj, 0.5)(0) == Approx(0.5).margin(1e-15));
    }
    SECTION("quadratic within the interpolation error bound") {
        // Linear interpolation error is at most dt^2/8 * max|f''| = 0.01^2/8 * 2.
        const auto traj = from_function(101, [](double t) { return t * t; });
        const double bound = 0.01 * 0.01 / 8.0 * 2.0;
        CHECK(std::abs(eval(traj, 0.315)(0) - 0.315 * 0.315) <= bound + 1e-15);
        CHECK(bound <= 1e-4);
    }
    SECTION("times outside [0, 1] are rejected") {
        const auto traj = from_function(5, [](double t) { return t; });
        CHECK_THROWS_AS(eval(traj, -1e-9), DomainError);
        CHECK_THROWS_AS(eval(traj, 1.0 + 1e-9), DomainError);
        CHECK_THROWS_AS(eval(traj, std::nan("")), DomainError);
    }
}

TEST_CASE("eval reproduces grid values bit-exactly at the nodes", "[trajectory][eval][property]") {
    std::mt19937_64 rng(7);
    for (Eigen::Index m : {2, 3, 7, 101, 201, 1001}) {
        const auto traj = sda::testing::random_trajectory(m, 3, rng);
        for (Eigen::Index g = 0; g < m; ++g) {
            const Eigen::VectorXd v = eval(traj, traj.node_time(g));
            for (Eigen::Index c = 0; c < 3; ++c) REQUIRE(v(c) == traj.values()(g, c));
        }
    }
}

TEST_CASE("penalty approximates the integrated squared derivative", "[trajectory][penalty]") {
    SECTION("constants are free for s = 1") {
        CHECK(penalty(GridTrajectory::constant(9, Eigen::Vector3d(1, 2, 3)), 1) == 0.0);
    }
    SECTION("affine functions are free for s = 2") {
        const auto traj = from_function(51, [](double t) { return 3.0 * t - 1.0; });
        CHECK(penalty(traj, 2) == Approx(0.0).margin(1e-10));
    }
    SECTION("sin(2 pi t) with s = 1 matches 2 pi^2 within 1%") {
        // Analytic: int_0^1 4 pi^2 cos^2(2 pi t) dt = 2 pi^2.
        const auto traj = from_function(201, [](double t) { return std::sin(2.0 * std::numbers::pi * t); });
        const double exact = 2.0 * std::numbers::pi * std::numbers::pi;
        CHECK(std::abs(penalty(traj, 1) - exact) / exact < 0.01);
    }
    SECTION("grid too coarse for the order") {
        const auto traj = from_function(3, [](double t) { return t; });
        CHECK_THROWS_AS(penalty(traj, 3), GridTooCoarse);
        CHECK_THROWS_AS(h0_norm(traj, 3), GridTooCoarse);
        CHECK_NOTHROW(penalty(traj, 2));
    }
}

TEST_CASE("penalty vanishes on polynomials of degree below s", "[trajectory][penalty][property]") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int s = 1; s <= 4; ++s) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> coef(static_cast<std::size_t>(s));
            for (auto& c : coef) c = normal(rng);
            auto poly = [&coef](double t) {
                double v = 0.0;
                for (auto it = coef.rbegin(); it != coef.rend(); ++it) v = v * t + *it;
                return v;
            };
            const auto traj = from_function(41, poly);
            // Relative to the penalty scale of a non-polynomial of similar size.
            const double scale = std::max(1.0, penalty(from_function(41, [&](double t) { return poly(t) + t * t * t * t * t; }), s));
            CHECK(penalty(traj, s) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("penalty is absolutely homogeneous of degree 2", "[trajectory][penalty][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> alpha_dist(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto traj = sda::testing::random_trajectory(30, 2, rng);
        const double alpha = alpha_dist(rng);
        for (int s = 1; s <= 3; ++s) {
            const double base = penalty(traj, s);
            CHECK(penalty(alpha * traj, s) == Approx(alpha * alpha * base).epsilon(1e-12));
        }
    }
}

TEST_CASE("h0 norm uses derivatives at zero", "[trajectory][h0]") {
    CHECK(h0_norm(GridTrajectory::constant(5, Eigen::Vector2d(3.0, 4.0)), 1) == Approx(5.0));
    CHECK(h0_norm(from_function(11, [](double t) { return 3.0 * t; }), 2) == Approx(3.0).epsilon(1e-12));
    // e^t: |e^0| + |e^0| / 1! = 2.
    CHECK(std::abs(h0_norm(from_function(1001, [](double t) { return std::exp(t); }), 2) - 2.0) < 1e-2);
}

TEST_CASE("finite difference weights are exact on polynomials", "[trajectory][h0]") {
    const Eigen::Vector4d x(0.0, 0.1, 0.2, 0.3);
    const Eigen::MatrixXd w = finite_difference_weights(0.0, x, 3);
    // f(t) = 1 + 2t + 3t^2 + 4t^3: f(0) = 1, f'(0) = 2, f''(0) = 6, f'''(0) = 24.
    Eigen::Vector4d f;
    for (int i = 0; i < 4; ++i) f(i) = 1 + 2 * x(i) + 3 * x(i) * x(i) + 4 * x(i) * x(i) * x(i);
    CHECK(w.col(0).dot(f) == Approx(1.0));
    CHECK(w.col(1).dot(f) == Approx(2.0));
    CHECK(w.col(2).dot(f) == Approx(6.0));
    CHECK(w.col(3).dot(f) == Approx(24.0));
}

TEST_CASE("hs_distance", "[trajectory][distance]") {
    std::mt19937_64 rng(5);
    const auto mu1 = sda::testing::random_trajectory(21, 2, rng);
    const auto mu2 = sda::testing::random_trajectory(21, 2, rng);
    const TrajectorySet a({mu1, mu2}, 2, 0.1);
    const TrajectorySet b({mu2, mu1}, 2, 0.1);

    CHECK(hs_distance(a, a) == 0.0);
    CHECK(hs_distance(a, b) == 0.0);

    const auto zero = single(GridTrajectory::constant(11, Eigen::VectorXd::Zero(1)), 1);
    const auto three = single(GridTrajectory::constant(11, Eigen::VectorXd::Constant(1, 3.0)), 1);
    CHECK(hs_distance(zero, three) == Approx(3.0));

    const TrajectorySet other_order({mu1, mu2}, 1, 0.1);
    CHECK_THROWS_AS(hs_distance(a, other_order), ShapeError);
    CHECK_THROWS_AS(hs_distance(a, single(mu1, 2)), ShapeError);
}

TEST_CASE("hs_distance is a pseudometric", "[trajectory][distance][property]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        auto make = [&] {
            return TrajectorySet({sda::testing::random_trajectory(12, 2, rng), sda::testing::random_trajectory(12, 2, rng),
                                  sda::testing::random_trajectory(12, 2, rng)},
                                 2, 0.5);
        };
        const auto a = make();
        const auto b = make();
        const auto c = make();
        const double ab = hs_distance(a, b);
        CHECK(ab == Approx(hs_distance(b, a)).epsilon(1e-10));
        CHECK(hs_distance(a, c) <= ab + hs_distance(b, c) + 1e-10);
    }
}

TEST_CASE("separation_check", "[trajectory][separation]") {
    SECTION("constants at 0 and 10") {
        const TrajectorySet set({GridTrajectory::constant(11, Eigen::VectorXd::Zero(1)),
                                 GridTrajectory::constant(11, Eigen::VectorXd::Constant(1, 10.0))},
                                1, 1.0);
        const auto r = separation_check(set);
        CHECK(r.ok);
        CHECK(r.min_gap == 10.0);
    }
    SECTION("crossing tracks on an odd grid") {
        const TrajectorySet set({from_function(101, [](double t) { return t; }),
                                 from_function(101, [](double t) { return 1.0 - t; })},
                                1, 0.1);
        const auto r = separation_check(set);
        CHECK_FALSE(r.ok);
        CHECK(r.min_gap == Approx(0.0).margin(1e-15));
    }
    SECTION("sinusoid against a constant matches a brute-force scan") {
        const Eigen::Index m = 201;
        auto wave = [](double t) { return 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * t); };
        const TrajectorySet set({GridTrajectory::constant(m, Eigen::VectorXd::Zero(1)), from_function(m, wave)}, 1, 0.5);
        double brute = std::numeric_limits<double>::infinity();
        for (Eigen::Index g = 0; g < m; ++g) brute = std::min(brute, std::abs(wave(static_cast<double>(g) / (m - 1))));
        const auto r = separation_check(set);
        CHECK_FALSE(r.ok);
        CHECK(r.min_gap == Approx(brute).epsilon(1e-14));
        CHECK(r.min_gap == Approx(0.4).epsilon(1e-12));
    }
    SECTION("single track") {
        const auto r = separation_check(single(GridTrajectory::constant(5, Eigen::VectorXd::Zero(2)), 1));
        CHECK(r.ok);
        CHECK(std::isinf(r.min_gap));
    }
}

TEST_CASE("separation_check is permutation invariant", "[trajectory][separation][property]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<GridTrajectory> tracks;
        for (int j = 0; j < 4; ++j) tracks.push_back(sda::testing::random_trajectory(15, 2, rng));
        const TrajectorySet set(tracks, 1, 0.3);
        std::shuffle(tracks.begin(), tracks.end(), rng);
        const TrajectorySet shuffled(tracks, 1, 0.3);
        CHECK(separation_check(set).min_gap == separation_check(shuffled).min_gap);
        CHECK(separation_check(set).ok == separation_check(shuffled).ok);
    }
}

TEST_CASE("trajectory sets validate their invariants", "[trajectory]") {
    const auto a = GridTrajectory::constant(5, Eigen::VectorXd::Zero(2));
    const auto b = GridTrajectory::constant(6, Eigen::VectorXd::Zero(2));
    const auto c = GridTrajectory::constant(5, Eigen::VectorXd::Zero(3));
    CHECK_THROWS_AS(TrajectorySet({a, b}, 1, 1.0), ShapeError);
    CHECK_THROWS_AS(TrajectorySet({a, c}, 1, 1.0), ShapeError);
    CHECK_THROWS_AS(TrajectorySet({a}, 1, 0.0), DomainError);
    CHECK_THROWS_AS(TrajectorySet({a}, 0, 1.0), DomainError);
    CHECK_THROWS_AS(TrajectorySet({a}, 5, 1.0), GridTooCoarse);
    CHECK_THROWS_AS(TrajectorySet({}, 1, 1.0), ShapeError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 1);
    bad(2, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(GridTrajectory(bad), DataError);
}
