#include "doctest.h"

#include "json.hpp"
#include "pmstat/harness.hpp"

using namespace pmstat;

TEST_CASE("suite generation is deterministic") {
    const auto a = generate_suite(3, 14);
    const auto b = generate_suite(3, 14);
    REQUIRE(a.size() == 14);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].recipe == b[i].recipe);
        CHECK(a[i].space.points() == b[i].space.points());
        CHECK(a[i].sequence.materialize(200) == b[i].sequence.materialize(200));
        CHECK(validate_axioms(a[i].space).passed);
    }
    CHECK(a[5].recipe == "squares-weighted");
    CHECK_FALSE(a[5].sequence.annotation.limit.has_value());
    CHECK(a[0].companion.has_value());
}

TEST_CASE("random step functions are canonical") {
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const StepDistFn f = random_step_fn(rng);
        CHECK(f.final_value() == 1.0);
        CHECK(f.jumps().size() <= 3);
        CHECK(f.jumps().front().location > 0.0);
    }
}

TEST_CASE("oracles") {
    const StepDistFn e0 = unit_step(0.0);
    CHECK(oracle_dl(unit_step(0.3), e0, 1e-3) == doctest::Approx(0.3).epsilon(0.01));
    CHECK(oracle_dl(unit_step(5.0), e0, 1e-3) == 1.0);
    CHECK(oracle_dl(e0, e0, 1e-3) == doctest::Approx(1e-3));
    CHECK_THROWS(oracle_dl(e0, e0, 0.0));

    const auto evens = oracle_density(SummMatrix::cesaro(), IndexSet::evens(), 1000);
    CHECK(evens.liminf == doctest::Approx(0.5).epsilon(0.01));
    CHECK(evens.limsup == doctest::Approx(0.5).epsilon(0.01));
    const auto sq = oracle_density(SummMatrix::squares_weighted(), IndexSet::squares(), 1000);
    CHECK(sq.liminf > 0.5);
    CHECK_THROWS(oracle_density(SummMatrix::cesaro(), IndexSet::evens(), 10));
}

TEST_CASE("small suite passes and reports") {
    SuiteConfig cfg;
    cfg.size = 7;
    cfg.dl_samples = 10;
    cfg.density_pairs = 5;
    const auto rep = run_theorem_suite(generate_suite(cfg.seed, cfg.size), cfg);
    for (const auto& c : rep.checks) {
        INFO(c.name);
        CHECK(c.passed);
    }
    CHECK(rep.passed());
    CHECK(rep.instances.size() == 7);

    const auto j = nlohmann::json::parse(report_json(rep));
    CHECK(j["command"] == "suite");
    CHECK(j["status"] == "pass");
    CHECK(j["result"]["summary"]["instances"] == 7);
    CHECK(report_json(rep) == report_json(run_theorem_suite(generate_suite(cfg.seed, cfg.size), cfg)));
    const std::string csv = report_csv(rep);
    CHECK(csv.rfind("check,negative_control,passed,cases,failures,worst_residual\n", 0) == 0);

    bool has_negative = false;
    for (const auto& c : rep.checks) has_negative = has_negative || c.negative_control;
    CHECK(has_negative);
}

TEST_CASE("empty suite") {
    const auto rep = run_theorem_suite({}, SuiteConfig{});
    CHECK(rep.checks.empty());
    CHECK(rep.passed());
    CHECK(nlohmann::json::parse(report_json(rep))["status"] == "pass");
}

TEST_CASE("density properties") {
    const auto c = check_density_properties(SummMatrix::cesaro(), Ideal::fin(), 10, 5000, 0.02, 4);
    CHECK(c.cases > 0);
    CHECK(c.passed);
}
