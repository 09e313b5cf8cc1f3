#pragma once

// Ground-truth instances, brute-force oracles and the property suite.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmstat/convergence.hpp"
#include "pmstat/rng.hpp"

namespace pmstat {

struct Instance {
    std::size_t id = 0;
    std::string recipe;
    FinitePMSpace space;
    IndexedSequence sequence;  // carries the expected annotations
    SummMatrix matrix;
    Ideal ideal;
    std::optional<IndexedSequence> companion;  // second sequence with its own limit
    std::optional<IndexedSequence> twin;       // equals `sequence` off `twin_diff`
    std::optional<IndexSet> twin_diff;
};

/// Recipes cycle with the instance index:
///  0 eventually-L off a null set (squares, powers of 2 or sparse blocks), C1
///  1 two-cluster alternator on residue classes, C1
///  2 random values spliced in on a null set, C1 with the C1-density ideal
///  3 eventually constant after a finite random prefix, block matrix
///  4 alternator with a third point on the squares, C1
///  5 eventually-L off the squares under the squares-weighted matrix
///  6 eventually-L off a null set, block matrix with the C1-density ideal
std::vector<Instance> generate_suite(std::uint64_t seed, std::size_t size);

/// Random step function with 1..max_jumps jumps in (0.05, 2.5].
StepDistFn random_step_fn(Rng& rng, int max_jumps = 3);

/// Smallest a in {step, 2 step, ..., 1} passing an independent feasibility
/// test that evaluates both functions around every critical point.
double oracle_dl(const StepDistFn& f, const StepDistFn& g, double step);
bool oracle_feasible(const StepDistFn& f, const StepDistFn& g, double a);

struct DensityRange {
    double liminf = 0.0;
    double limsup = 0.0;
};

/// min / max of sum_{k in M} a_nk over n in [N/2, N] by direct summation of
/// the entries.
DensityRange oracle_density(const SummMatrix& A, const IndexSet& M, std::size_t N);

struct SuiteConfig {
    std::uint64_t seed = 1;
    std::size_t size = 100;
    std::size_t N = 10000;
    double tol = 0.02;
    double dl_tol = 1e-6;
    std::size_t dl_samples = 40;      // random pairs for the metric checks
    std::size_t density_pairs = 20;   // set pairs for the density rules
};

struct CheckResult {
    std::string name;
    bool negative_control = false;
    bool passed = true;  // for a negative control: the sabotaged run failed
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst_residual = 0.0;
    std::vector<std::string> counterexamples;  // first few only

    void record(bool ok, double residual = 0.0, const std::string& what = {});
};

struct InstanceSummary {
    std::size_t id = 0;
    std::string recipe;
    std::string sequence;
    std::string matrix;
    std::string ideal;
    std::vector<std::string> points;
    std::optional<std::string> expected_limit;
    std::vector<std::string> expected_gamma;
    std::vector<std::string> detected_limits;
    std::vector<std::string> gamma;
    std::vector<std::string> lambda;
};

struct SuiteReport {
    SuiteConfig config;
    std::vector<InstanceSummary> instances;
    std::vector<CheckResult> checks;
    bool passed() const;
};

SuiteReport run_theorem_suite(const std::vector<Instance>& instances, const SuiteConfig& config);

/// Density rules on pairs of constructed sets: finite changes, disjoint
/// additivity, complements, unions of null sets, intersections of full sets.
CheckResult check_density_properties(const SummMatrix& A, const Ideal& I, std::size_t pairs, std::size_t N,
                                     double tol, std::uint64_t seed);

std::string report_json(const SuiteReport& r);
std::string report_csv(const SuiteReport& r);

}  // namespace pmstat
