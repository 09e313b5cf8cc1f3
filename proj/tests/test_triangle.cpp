#include "doctest.h"

#include <random>
#include <vector>

#include "pmstat/triangle.hpp"

using namespace pmstat;

namespace {

std::vector<StepDistFn> sample(unsigned seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<StepDistFn> out;
    for (int i = 0; i < n; ++i) {
        std::vector<Jump> js;
        double loc = 0.0, val = 0.0;
        const int m = 1 + static_cast<int>(u(rng) * 3);
        for (int j = 0; j < m; ++j) {
            loc += 0.1 + u(rng);
            val = (j + 1 == m) ? 1.0 : val + (1.0 - val) * u(rng);
            js.push_back({loc, val});
        }
        out.emplace_back(js);
    }
    return out;
}

// brute force sup over u + v = t on a fine grid of u
double brute_supconv(TNorm t, const StepDistFn& f, const StepDistFn& g, double x) {
    double best = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double u = x * i / 4000.0;
        best = std::max(best, apply_tnorm(t, f(u), g(x - u)));
    }
    return best;
}

}  // namespace

TEST_CASE("maximal triangle function") {
    const auto e0 = unit_step(0.0);
    const StepDistFn g({{0.5, 0.3}, {1.0, 1.0}});
    CHECK(apply_maximal(e0, g) == g);
    CHECK(apply_maximal(unit_step(2.0), unit_step(3.0)) == unit_step(3.0));
    CHECK(apply_maximal(StepDistFn({{1.0, 0.5}, {2.0, 1.0}}), StepDistFn({{1.5, 1.0}})) ==
          StepDistFn({{1.5, 0.5}, {2.0, 1.0}}));
}

TEST_CASE("sup-convolution") {
    const auto e0 = unit_step(0.0);
    CHECK(apply_supconv(TNorm::minimum, unit_step(0.4), unit_step(1.1)) == unit_step(0.4 + 1.1));
    CHECK(apply_supconv(TNorm::product, e0, e0) == e0);
    const StepDistFn f({{0.5, 0.3}, {1.0, 1.0}});
    for (TNorm t : {TNorm::minimum, TNorm::product, TNorm::lukasiewicz}) {
        CHECK(apply_supconv(t, e0, f) == f);
        CHECK(apply_supconv(t, f, e0) == f);
    }
    CHECK_THROWS(apply_supconv(TNorm::minimum, f, f, 0.0));
    CHECK_THROWS(TriangleFn::from_tag("bogus"));

    const auto s = sample(3, 6);
    for (TNorm t : {TNorm::minimum, TNorm::product, TNorm::lukasiewicz}) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            const auto h = apply_supconv(t, s[i], s[i + 1]);
            for (double x : {0.3, 0.9, 1.7, 2.5, 3.3, 4.9}) {
                // the grid brute force can only under-estimate the supremum
                CHECK(brute_supconv(t, s[i], s[i + 1], x) <= h(x) + 1e-12);
            }
            CHECK(pointwise_leq(h, apply_maximal(s[i], s[i + 1])));
        }
    }
}

TEST_CASE("sup-convolution matches a fine brute force away from sum points") {
    const StepDistFn f({{0.25, 0.5}, {1.0, 1.0}});
    const StepDistFn g({{0.5, 0.4}, {0.75, 1.0}});
    for (TNorm t : {TNorm::minimum, TNorm::product, TNorm::lukasiewicz}) {
        const auto h = apply_supconv(t, f, g);
        for (double x : {0.6, 0.9, 1.2, 1.6, 1.9}) {
            CHECK(h(x) == doctest::Approx(brute_supconv(t, f, g, x)));
        }
    }
}

TEST_CASE("axiom checks") {
    const auto s = sample(9, 20);
    const auto m = check_triangle_axioms(TriangleFn::maximal(), s, 1e-9);
    CHECK(m.passed());
    for (const auto& c : m.checks) CHECK(c.worst_residual == 0.0);
    for (const char* tag : {"min", "prod", "luka"}) {
        const auto r = check_triangle_axioms(TriangleFn::from_tag(tag), s, 1e-6, 5);
        CHECK(r.passed());
        CHECK(TriangleFn::from_tag(tag).tag() == tag);
    }

    // left projection is associative but not commutative
    BinaryOp left = [](const StepDistFn& f, const StepDistFn& g) { return apply_maximal(f, pointwise_max(f, g)); };
    const auto bad = check_triangle_axioms(left, s, 1e-6, 4);
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.at("commutativity").passed);
}

TEST_CASE("continuity proxy") {
    const auto s = sample(21, 10);
    const auto tau = TriangleFn::from_tag("min");
    for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        const double lhs = levy_distance(tau(s[i], s[i + 2]), tau(s[i + 1], s[i + 2]), 1e-7);
        CHECK(lhs <= levy_distance(s[i], s[i + 1], 1e-7) + 1e-6);
    }
}
