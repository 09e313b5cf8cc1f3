#pragma once

// Distance distribution functions on [0, +inf] represented as left-continuous
// step functions, plus the modified Levy metric between them.

#include <cstddef>
#include <span>
#include <vector>

namespace pmstat {

struct Jump {
    double location = 0.0;  // >= 0
    double value = 0.0;     // cumulative value attained just after `location`

    friend bool operator==(const Jump&, const Jump&) = default;
};

/// A distance distribution function given by finitely many jumps.
///
/// f(t) is the value of the last jump strictly below t, 0 when no jump lies
/// below t, f(0) = 0 and f(+inf) = 1. A final value below 1 means the missing
/// mass sits at infinity (the empty jump list is the step at infinity).
///
/// Jump lists are stored canonically: jumps that do not change the value are
/// dropped, so two StepDistFn compare equal iff they agree on (0, +inf).
class StepDistFn {
public:
    StepDistFn() = default;
    explicit StepDistFn(std::vector<Jump> jumps);

    /// Unit step at b: 0 on [0, b], 1 on (b, +inf). b = +inf gives the
    /// step at infinity.
    static StepDistFn unit_step(double b);

    double operator()(double t) const;

    std::span<const Jump> jumps() const { return jumps_; }
    double final_value() const { return jumps_.empty() ? 0.0 : jumps_.back().value; }
    bool is_zero_step() const;  // f == eps_0
    bool is_infinity_step() const { return jumps_.empty(); }

    friend bool operator==(const StepDistFn&, const StepDistFn&) = default;

private:
    std::vector<Jump> jumps_;
};

inline StepDistFn unit_step(double b) { return StepDistFn::unit_step(b); }
double evaluate(const StepDistFn& f, double t);

/// Appends a jump to 1 at `far` when the final value is below 1, so that a
/// function with mass escaping to infinity is approximated inside D+.
StepDistFn close_tail(const StepDistFn& f, double far);

/// Sorted union of the jump locations of f and g.
std::vector<double> merged_locations(const StepDistFn& f, const StepDistFn& g);

StepDistFn pointwise_min(const StepDistFn& f, const StepDistFn& g);
StepDistFn pointwise_max(const StepDistFn& f, const StepDistFn& g);

/// f <= g everywhere. Exact: both sides are constant on the pieces of the
/// merged jump grid.
bool pointwise_leq(const StepDistFn& f, const StepDistFn& g);

/// max_t (f(t) - g(t)), clamped below at 0; zero iff f <= g.
double excess_over(const StepDistFn& f, const StepDistFn& g);

/// Whether the Levy inequalities hold with slack a in both directions, for
/// every xi in (-1/a, 1/a). Monotone in a; always true at a = 1.
bool levy_feasible(const StepDistFn& f, const StepDistFn& g, double a);

/// Levy distance by bisection over a in (0, 1]; |result - d_L(f, g)| <= tol.
double levy_distance(const StepDistFn& f, const StepDistFn& g, double tol = 1e-6);

/// Exact d_L(f, eps_0) = inf{ t > 0 : f(t) > 1 - t }, capped at 1.
double levy_distance_to_zero(const StepDistFn& f);

struct WeakConvergenceReport {
    bool converged = false;          // pointwise test at continuity points
    double pointwise_residual = 0.0; // max |f_k(xi) - f(xi)| over the tail
    double levy_residual = 0.0;      // max d_L(f_k, f) over the tail
    bool levy_agrees = false;        // (levy_residual <= tol) == converged
    std::size_t tail_begin = 0;      // 1-based, inclusive
    std::size_t tail_end = 0;
    std::size_t sample_points = 0;
};

/// Finite-horizon check of f_k -> f weakly. Terms f_k with k in
/// [horizon/2, horizon] are compared with f at the continuity points of f
/// (midpoints between jumps and the given grid), and cross-checked against
/// the Levy distance.
WeakConvergenceReport weakly_converges(std::span<const StepDistFn> fs, const StepDistFn& f,
                                       std::size_t horizon, double tol,
                                       std::span<const double> grid = {}, double dl_tol = 1e-6);

/// Default sample grid for weakly_converges: 0.1, 0.2, ..., 5.0.
std::vector<double> default_weak_grid();

}  // namespace pmstat
