#pragma once

// Finite probabilistic metric spaces and their strong topology.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmstat/distfn.hpp"
#include "pmstat/triangle.hpp"

namespace pmstat {

using PointSet = std::set<std::size_t>;
using PairSet = std::set<std::pair<std::size_t, std::size_t>>;

struct SpaceViolation {
    std::string axiom;                // "P-1" ... "P-4", or "metric"
    std::vector<std::size_t> witness; // offending point indices
    std::string message;
};

class SpaceError : public std::invalid_argument {
public:
    explicit SpaceError(SpaceViolation v) : std::invalid_argument(v.message), violation_(std::move(v)) {}
    const SpaceViolation& violation() const { return violation_; }

private:
    SpaceViolation violation_;
};

class FinitePMSpace {
public:
    /// Stores the table as given (row-major, n x n) without validating it;
    /// use validate_axioms or the build_* constructors for checked spaces.
    FinitePMSpace(std::vector<std::string> points, std::vector<StepDistFn> table, TriangleFn tau);

    std::size_t size() const { return points_.size(); }
    const std::vector<std::string>& points() const { return points_; }
    const std::string& name(std::size_t p) const { return points_.at(p); }
    std::size_t index_of(const std::string& name) const;

    const StepDistFn& F(std::size_t p, std::size_t q) const { return table_[p * size() + q]; }
    const TriangleFn& tau() const { return tau_; }

    /// d_L(F_pq, eps_0) in closed form.
    double r(std::size_t p, std::size_t q) const { return r_[p * size() + q]; }

    /// One representative t per interval on which every strong neighborhood
    /// is constant: half the smallest positive r, the midpoints between
    /// consecutive distinct positive r values, and the largest r plus 0.5.
    const std::vector<double>& gap_grid() const { return gap_grid_; }

    /// Distance table when the space was induced by a metric.
    const std::optional<std::vector<double>>& metric() const { return metric_; }
    double metric(std::size_t p, std::size_t q) const;

private:
    friend FinitePMSpace build_metric_induced(std::vector<std::string>, const std::vector<std::vector<double>>&);

    std::vector<std::string> points_;
    std::vector<StepDistFn> table_;
    TriangleFn tau_;
    std::vector<double> r_;
    std::vector<double> gap_grid_;
    std::optional<std::vector<double>> metric_;
};

/// F_uv = F for u != v, eps_0 on the diagonal, maximal triangle function.
FinitePMSpace build_equilateral(std::vector<std::string> points, const StepDistFn& F);

/// F_pq = eps_{d(p, q)} with tau = sup-convolution of min.
FinitePMSpace build_metric_induced(std::vector<std::string> points, const std::vector<std::vector<double>>& d);

struct SpaceAxiomReport {
    bool passed = true;
    std::optional<SpaceViolation> violation;  // first violation found
    std::size_t pairs_checked = 0;
    std::size_t triples_checked = 0;
};

/// Exhaustive P-1 ... P-4 scan. P-4 allows a pointwise excess of p4_tol.
SpaceAxiomReport validate_axioms(const FinitePMSpace& S, double p4_tol = 0.0);

/// q is in N_p(t) iff F_pq(t) > 1 - t.
bool in_strong_neighborhood(const FinitePMSpace& S, std::size_t p, std::size_t q, double t);
PointSet strong_neighborhood(const FinitePMSpace& S, std::size_t p, double t);
/// Same set through d_L(F_pq, eps_0) < t with the bisection distance.
PointSet strong_neighborhood_dl(const FinitePMSpace& S, std::size_t p, double t, double dl_tol = 1e-7);

PairSet strong_vicinity(const FinitePMSpace& S, double u);

struct AlphaSearch {
    bool found = false;
    double alpha = 0.0;  // the admissible alpha, or the smallest one tried
    std::size_t tried = 0;
};

/// Descends alpha = u, u/2, u/4, ... (61 values) and returns the first alpha
/// with V(alpha) o V(alpha) contained in V(u), verified over all triples.
AlphaSearch vicinity_composition_alpha(const FinitePMSpace& S, double u);
bool vicinity_composition_holds(const FinitePMSpace& S, double alpha, double u);

/// k(M). On a finite carrier c belongs to k(M) iff every strong neighborhood
/// of c meets M, i.e. iff F_ce = eps_0 for some e in M.
PointSet strong_closure(const FinitePMSpace& S, const PointSet& M);
bool is_strongly_closed(const FinitePMSpace& S, const PointSet& M);

/// Finite subsets are compact under any topology.
bool is_strongly_compact(const FinitePMSpace& S, const PointSet& M);

/// L_M^F: points l with N_l(t) meeting M \ {l} for every t > 0.
PointSet set_limit_points(const FinitePMSpace& S, const PointSet& M);

}  // namespace pmstat
