#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pmstat/cli.hpp"

using namespace pmstat;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string line = R"({"points":["a","b","c"],"metric":[[0,0.25,1],[0.25,0,0.75],[1,0.75,0]]})";

std::string tmp(const std::string& name) { return "pmstat_test_" + name; }

json load(const std::string& path) {
    std::ifstream in(path);
    return json::parse(in);
}

}  // namespace

TEST_CASE("dl prints the distance rounded to the tolerance") {
    const Run r = run({"dl", "--f", "eps:0.3", "--g", "eps:0"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.3\n");
    CHECK(run({"dl", "--f", "[[0.5,0.4],[1.5,1]]", "--g", "eps:0", "--dl-tol", "1e-3"}).code == 0);
    CHECK(run({"dl", "--f", "eps:-1", "--g", "eps:0"}).code == 2);
    CHECK(run({"dl", "--f", "[[1,0.5],[0.5,1]]", "--g", "eps:0"}).code == 2);
}

TEST_CASE("usage errors and help") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"suite", "--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"dl", "--bogus"}).code == 2);
    CHECK(run({"matrix-check", "--N", "-5"}).code == 2);
    CHECK(run({"matrix-check", "--tol", "0"}).code == 2);
    CHECK(run({"matrix-check", "--matrix", "nope"}).code == 2);
    CHECK(run({"density", "--set", "primes"}).code == 2);
    CHECK(run({"converge", "--space", line, "--seq", "const:z"}).code == 2);
    CHECK(run({"converge", "--seq", "const:a"}).code == 2);
}

TEST_CASE("matrix-check prints three condition lines") {
    const Run ok = run({"matrix-check", "--matrix", "cesaro", "--N", "1000"});
    CHECK(ok.code == 0);
    std::size_t passes = 0;
    for (std::size_t pos = 0; (pos = ok.out.find("PASS", pos)) != std::string::npos; ++pos) ++passes;
    CHECK(passes == 3);
    const Run bad = run({"matrix-check", "--matrix", "column1", "--N", "1000"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL (ii)") != std::string::npos);
}

TEST_CASE("space-validate reports the violated axiom") {
    CHECK(run({"space-validate", "--space", line}).code == 0);
    const std::string out = tmp("space.json");
    const Run bad = run({"space-validate", "--space", R"({"points":["a","b"],"F":[[[[0,1]],[[1,1]]],[[[2,1]],[[0,1]]]]})",
                         "--out", out});
    CHECK(bad.code == 1);
    const json j = load(out);
    CHECK(j["status"] == "fail");
    CHECK(j["result"]["violation"]["axiom"] == "P-3");
    CHECK(validate_report(j).empty());
    std::remove(out.c_str());
    CHECK(run({"space-validate", "--space", R"({"points":["a","b"],"equilateral":[[0,1]]})"}).code == 1);
    CHECK(run({"space-validate", "--space", R"({"points":["a"],"colour":1,"metric":[[0]]})"}).code == 2);
}

TEST_CASE("detectors on sequences") {
    const std::string out = tmp("conv.json");
    CHECK(run({"converge", "--space", line, "--seq", "except:a:squares:c", "--out", out}).code == 0);
    CHECK(load(out)["result"]["limit"] == "a");
    CHECK(run({"converge", "--space", line, "--seq", "alternate:a,b:evens", "--out", out}).code == 0);
    CHECK(load(out)["result"]["limit"].is_null());
    CHECK(run({"cauchy", "--space", line, "--seq", "splice:b:squares:random", "--out", out}).code == 0);
    CHECK(load(out)["result"]["verdict"] == "converged");
    CHECK(load(out)["result"]["metric_forms"]["pairwise_form"] == "converged");
    CHECK(run({"lambda", "--space", line, "--seq", "alternate:a,b:evens", "--out", out}).code == 0);
    CHECK(load(out)["result"]["members"] == json::array({"a", "b"}));
    CHECK(run({"gamma", "--space", line, "--seq", "alternate:a,c:mod3=0", "--out", out}).code == 0);
    CHECK(load(out)["result"]["members"] == json::array({"a", "c"}));
    CHECK(run({"density", "--set", "evens", "--out", out}).code == 0);
    CHECK(load(out)["result"]["value"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
    CHECK(run({"density", "--set", "squares", "--matrix", "sqweight", "--out", out}).code == 0);
    CHECK(load(out)["result"]["nonthin"] == true);
    std::remove(out.c_str());
}

TEST_CASE("config files and seed fallback") {
    const std::string cfg = tmp("cfg.json"), out = tmp("cfg_out.json");
    {
        std::ofstream(cfg) << R"({"N": 2000, "set": "odds"})";
    }
    CHECK(run({"density", "--config", cfg, "--N", "3000", "--out", out}).code == 0);
    CHECK(load(out)["config"]["N"] == 3000);
    CHECK(load(out)["config"]["set"] == "odds");
    {
        std::ofstream(cfg) << R"({"N": 2000, "colour": "red"})";
    }
    CHECK(run({"density", "--set", "odds", "--config", cfg}).code == 2);
    {
        std::ofstream(cfg) << R"({"tol": -1})";
    }
    CHECK(run({"density", "--set", "odds", "--config", cfg}).code == 2);

    setenv("PMSTAT_SEED", "17", 1);
    CHECK(run({"tnorm-check", "--samples", "3", "--out", out}).code == 0);
    CHECK(load(out)["config"]["seed"] == 17);
    CHECK(run({"tnorm-check", "--samples", "3", "--seed", "4", "--out", out}).code == 0);
    CHECK(load(out)["config"]["seed"] == 4);
    setenv("PMSTAT_SEED", "x", 1);
    CHECK(run({"tnorm-check", "--samples", "3"}).code == 2);
    unsetenv("PMSTAT_SEED");
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("report validator") {
    CHECK_FALSE(validate_report(json::object()).empty());
    CHECK_FALSE(validate_report(json{{"command", "dl"}, {"status", "ok"}, {"config", json::object()}, {"result", json::object()}}).empty());
    CHECK(validate_report(json{{"command", "dl"}, {"status", "error"}, {"config", json::object()}, {"error", "x"}}).empty());
}

TEST_CASE("small suite writes JSON and CSV") {
    const std::string out = tmp("suite.json"), csv = tmp("suite.csv");
    const Run r = run({"suite", "--size", "7", "--out", out, "--csv", csv});
    CHECK(r.code == 0);
    const json j = load(out);
    CHECK(j["status"] == "pass");
    CHECK(j["result"]["summary"]["instances"] == 7);
    CHECK(validate_report(j).empty());
    std::ifstream c(csv);
    std::string header;
    std::getline(c, header);
    CHECK(header == "check,negative_control,passed,cases,failures,worst_residual");
    std::remove(out.c_str());
    std::remove(csv.c_str());
}
