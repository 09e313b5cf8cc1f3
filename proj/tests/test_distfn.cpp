#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "pmstat/distfn.hpp"

using namespace pmstat;

namespace {

StepDistFn random_step(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = count(rng);
    std::vector<Jump> js;
    double loc = 0.0;
    double val = 0.0;
    for (int i = 0; i < n; ++i) {
        loc += 0.05 + 1.5 * u(rng);
        val = (i + 1 == n) ? 1.0 : val + (1.0 - val) * u(rng);
        js.push_back({loc, val});
    }
    return StepDistFn(js);
}

}  // namespace

TEST_CASE("unit steps and evaluation") {
    const auto e0 = unit_step(0.0);
    CHECK(e0.is_zero_step());
    CHECK(evaluate(e0, 0.0) == 0.0);
    CHECK(evaluate(e0, 0.5) == 1.0);

    const auto e3 = unit_step(0.3);
    CHECK(evaluate(e3, 0.3) == 0.0);
    CHECK(evaluate(e3, 0.30001) == 1.0);
    CHECK(evaluate(unit_step(2.0), 2.0) == 0.0);

    const StepDistFn f({{1.0, 0.4}, {2.0, 1.0}});
    CHECK(evaluate(f, 1.5) == 0.4);
    CHECK(evaluate(f, 1.0) == 0.0);
    CHECK(evaluate(f, std::numeric_limits<double>::infinity()) == 1.0);

    CHECK_THROWS_AS(unit_step(-1.0), std::invalid_argument);
    CHECK(unit_step(std::numeric_limits<double>::infinity()).is_infinity_step());
}

TEST_CASE("jump lists are validated and canonical") {
    CHECK_THROWS_AS(StepDistFn({{1.0, 0.5}, {1.0, 0.7}}), std::invalid_argument);
    CHECK_THROWS_AS(StepDistFn({{1.0, 0.5}, {2.0, 0.3}}), std::invalid_argument);
    CHECK_THROWS_AS(StepDistFn({{-1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(StepDistFn({{1.0, 1.5}}), std::invalid_argument);
    CHECK(StepDistFn({{0.5, 0.0}, {1.0, 0.5}, {2.0, 0.5}, {3.0, 1.0}}) ==
          StepDistFn({{1.0, 0.5}, {3.0, 1.0}}));
}

TEST_CASE("close_tail appends the missing mass") {
    const StepDistFn f({{1.0, 0.6}});
    const auto g = close_tail(f, 100.0);
    CHECK(g(50.0) == 0.6);
    CHECK(g(101.0) == 1.0);
    CHECK(close_tail(unit_step(0.0), 1.0) == unit_step(0.0));
    CHECK_THROWS_AS(close_tail(f, 0.5), std::invalid_argument);
}

TEST_CASE("pointwise order and lattice operations") {
    const StepDistFn f({{1.0, 0.5}, {2.0, 1.0}});
    const StepDistFn g({{1.5, 1.0}});
    CHECK(pointwise_min(f, g) == StepDistFn({{1.5, 0.5}, {2.0, 1.0}}));
    CHECK(pointwise_max(f, g) == StepDistFn({{1.0, 0.5}, {1.5, 1.0}}));
    CHECK(pointwise_leq(unit_step(3.0), unit_step(2.0)));
    CHECK_FALSE(pointwise_leq(unit_step(2.0), unit_step(3.0)));
    CHECK(pointwise_leq(f, unit_step(0.0)));
    CHECK(excess_over(f, g) == doctest::Approx(0.5));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto a = random_step(rng);
        const auto b = random_step(rng);
        if (pointwise_leq(a, b) && pointwise_leq(b, a)) CHECK(a == b);
        CHECK(pointwise_leq(pointwise_min(a, b), a));
        CHECK(pointwise_leq(a, pointwise_max(a, b)));
    }
}

TEST_CASE("Levy distance closed forms") {
    const double tol = 1e-6;
    CHECK(levy_distance(unit_step(0.0), unit_step(0.0), tol) == 0.0);
    CHECK(std::abs(levy_distance(unit_step(0.3), unit_step(0.0), tol) - 0.3) <= tol);
    CHECK(std::abs(levy_distance(unit_step(5.0), unit_step(0.0), tol) - 1.0) <= tol);
    CHECK(std::abs(levy_distance(unit_step(0.7), unit_step(0.2), tol) - 0.5) <= tol);
    CHECK_THROWS_AS(levy_distance(unit_step(0.0), unit_step(1.0), 0.0), std::invalid_argument);

    CHECK(levy_distance_to_zero(unit_step(0.3)) == 0.3);
    CHECK(levy_distance_to_zero(unit_step(5.0)) == 1.0);
    CHECK(levy_distance_to_zero(unit_step(0.0)) == 0.0);
    // f = 0.9 on (0.05, 2]: f(t) > 1 - t once t > 0.1
    CHECK(levy_distance_to_zero(StepDistFn({{0.05, 0.9}, {2.0, 1.0}})) == doctest::Approx(0.1));
}

TEST_CASE("Levy distance is a metric on random samples") {
    std::mt19937_64 rng(11);
    const double tol = 1e-6;
    for (int i = 0; i < 150; ++i) {
        const auto f = random_step(rng);
        const auto g = random_step(rng);
        const auto h = random_step(rng);
        const double fg = levy_distance(f, g, tol);
        CHECK(fg == levy_distance(g, f, tol));
        CHECK(levy_distance(f, f, tol) <= tol);
        CHECK(levy_distance(f, h, tol) <= fg + levy_distance(g, h, tol) + 3 * tol);
        CHECK(std::abs(levy_distance(f, unit_step(0.0), tol) - levy_distance_to_zero(f)) <= tol);
    }
}

TEST_CASE("threshold equivalence against the distance to eps_0") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-6;
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const auto f = random_step(rng);
        const double t = u(rng);
        if (t <= 0.0) continue;
        const double d = levy_distance(f, unit_step(0.0), tol);
        if (std::abs(d - t) <= tol) continue;
        CHECK((f(t) > 1.0 - t) == (d < t));
        ++checked;
    }
    CHECK(checked > 400);
}

TEST_CASE("weak convergence") {
    const auto e0 = unit_step(0.0);
    std::vector<StepDistFn> shrinking, constant, alternating;
    for (int k = 1; k <= 1000; ++k) {
        shrinking.push_back(unit_step(1.0 / k));
        constant.push_back(e0);
        alternating.push_back(k % 2 ? unit_step(1.0) : e0);
    }
    const auto a = weakly_converges(shrinking, e0, 1000, 1e-2);
    CHECK(a.converged);
    CHECK(a.levy_agrees);
    CHECK(weakly_converges(constant, e0, 1000, 1e-3).converged);
    const auto c = weakly_converges(alternating, e0, 1000, 1e-3);
    CHECK_FALSE(c.converged);
    CHECK(c.levy_residual == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(c.levy_agrees);
    CHECK_THROWS_AS(weakly_converges(std::vector<StepDistFn>{}, e0, 1, 1e-3), std::invalid_argument);
}
