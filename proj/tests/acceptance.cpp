// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "pmstat/harness.hpp"

using namespace pmstat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << "criterion " << n << ' ' << (ok ? "PASS" : "FAIL") << ": " << detail << std::endl;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void levy_metric() {
    const auto t0 = Clock::now();
    Rng rng(101);
    const double step = 1e-4, tol = 1e-6;
    double worst_oracle = 0.0, worst_triangle = -1.0;
    std::size_t oracle_bad = 0, symmetry_bad = 0, triangle_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const StepDistFn f = random_step_fn(rng), g = random_step_fn(rng), h = random_step_fn(rng);
        const double fg = levy_distance(f, g, tol);
        const double gap = std::abs(fg - oracle_dl(f, g, step));
        worst_oracle = std::max(worst_oracle, gap);
        oracle_bad += gap > step + tol;
        symmetry_bad += fg != levy_distance(g, f, tol);
        const double excess = levy_distance(f, h, tol) - fg - levy_distance(g, h, tol);
        worst_triangle = std::max(worst_triangle, excess);
        triangle_bad += excess > 3e-6;
    }
    const double secs = seconds_since(t0);
    report(1, oracle_bad == 0 && symmetry_bad == 0 && triangle_bad == 0 && secs < 30.0,
           "1000 pairs, oracle gap max " + fmt(worst_oracle) + " (bound " + fmt(step + tol) + "), symmetry violations " +
               std::to_string(symmetry_bad) + ", triangle excess max " + fmt(worst_triangle) + ", " + fmt(secs) + " s");
}

void threshold_equivalence() {
    Rng rng(202);
    const StepDistFn e0 = unit_step(0.0);
    const double band = 1e-6;
    std::size_t checked = 0, banded = 0, bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const StepDistFn f = random_step_fn(rng);
        const double t = rng.uniform(1e-3, 1.0);
        const double d = levy_distance(f, e0, band);
        if (std::abs(d - t) <= band) {
            ++banded;
            continue;
        }
        ++checked;
        bad += (f(t) > 1.0 - t) != (d < t);
    }
    report(2, bad == 0 && checked + banded == 1000,
           std::to_string(checked) + " draws outside the band, " + std::to_string(banded) + " inside, " +
               std::to_string(bad) + " violations");
}

void regularity() {
    const auto t0 = Clock::now();
    const std::size_t N = 10000;
    const double tol = 2e-3;
    const auto c1 = check_regularity(SummMatrix::cesaro(), N, tol);
    const auto id = check_regularity(SummMatrix::identity(), N, tol);
    const auto col = check_regularity(SummMatrix::constant_column(), N, tol);
    double worst = 0.0;
    for (const auto* r : {&c1, &id}) {
        for (const auto& c : r->conditions) worst = std::max(worst, c.residual);
    }
    const double secs = seconds_since(t0);
    report(3, c1.passed() && id.passed() && worst < tol && !col.conditions[1].passed && secs < 5.0,
           "C1 and identity worst residual " + fmt(worst) + ", constant column (ii) residual " +
               fmt(col.conditions[1].residual) + (col.conditions[1].passed ? " (passed)" : " (failed)") + ", " +
               fmt(secs) + " s");
}

void density_calculus() {
    const std::size_t N = 10000;
    const auto C1 = SummMatrix::cesaro();
    const Ideal fin = Ideal::fin();
    const double evens = ai_density(C1, fin, IndexSet::evens(), N, 0.01).value;
    const double squares = ai_density(C1, fin, IndexSet::squares(), N, 0.01).value;
    const double finite = ai_density(C1, fin, IndexSet::finite({1, 5, 10, 50, 100}), N, 0.001).value;
    const double empty = ai_density(C1, fin, IndexSet::none(), N, 0.001).value;
    const bool values = std::abs(evens - 0.5) <= 0.01 && std::abs(squares) <= 0.01 && std::abs(finite) <= 0.001 &&
                        empty == 0.0;
    const CheckResult props = check_density_properties(C1, fin, 50, N, 0.02, 404);
    report(4, values && props.passed && props.cases >= 50,
           "evens " + fmt(evens) + ", squares " + fmt(squares) + ", finite " + fmt(finite) + ", empty " + fmt(empty) +
               "; properties on 50 pairs: " + std::to_string(props.cases) + " cases, " +
               std::to_string(props.failures) + " failures, worst " + fmt(props.worst_residual));
}

void detectors() {
    const SuiteConfig cfg;
    const auto instances = generate_suite(cfg.seed, 100);
    std::size_t agree = 0, without_limit = 0, rejected = 0;
    for (const auto& in : instances) {
        const VisitFrequencies vf(in.sequence.materialize(cfg.N), in.space.size(), in.matrix, in.ideal, cfg.tol);
        PointSet found;
        for (std::size_t c = 0; c < in.space.size(); ++c) {
            if (ai_stat_conv_detect(in.space, vf, c).converged()) found.insert(c);
        }
        const auto& limit = in.sequence.annotation.limit;
        const bool ok = limit ? found == PointSet{*limit} : found.empty();
        agree += ok;
        if (!limit) {
            ++without_limit;
            rejected += found.empty();
        }
    }
    report(5, agree == instances.size(),
           std::to_string(agree) + "/" + std::to_string(instances.size()) + " instances agree; " +
               std::to_string(rejected) + "/" + std::to_string(without_limit) + " limitless instances reject every point");
}

void theorem_suite() {
    const auto t0 = Clock::now();
    const SuiteConfig cfg;
    const SuiteReport rep = run_theorem_suite(generate_suite(cfg.seed, cfg.size), cfg);
    std::size_t positive = 0, negative = 0;
    std::string failed;
    for (const auto& c : rep.checks) {
        (c.negative_control ? negative : positive) += 1;
        if (!c.passed) failed += " " + c.name;
    }
    const double secs = seconds_since(t0);
    report(6, rep.passed() && negative > 0 && secs < 300.0,
           std::to_string(positive) + " checks and " + std::to_string(negative) + " negative controls on " +
               std::to_string(rep.instances.size()) + " instances, " + fmt(secs) + " s" +
               (failed.empty() ? "" : "; failed:" + failed));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism() {
    const std::string a = "acceptance_suite_a.json", b = "acceptance_suite_b.json";
    const std::string base = std::string("\"") + PMSTAT_CLI + "\" suite --seed 1 --out ";
    const int ra = std::system((base + a + " > /dev/null").c_str());
    const int rb = std::system((base + b + " > /dev/null").c_str());
    const std::string ta = slurp(a), tb = slurp(b);
    report(7, ra == 0 && rb == 0 && !ta.empty() && ta == tb,
           "two runs of suite --seed 1: exit " + std::to_string(ra) + "/" + std::to_string(rb) + ", " +
               std::to_string(ta.size()) + " bytes, " + (ta == tb ? "identical" : "different"));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

}  // namespace

int main() {
    levy_metric();
    threshold_equivalence();
    regularity();
    density_calculus();
    detectors();
    theorem_suite();
    determinism();
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
