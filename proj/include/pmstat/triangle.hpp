#pragma once

// Triangle functions on D+: sup-convolutions of t-norms and the maximal
// triangle function, with sampled axiom checks.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmstat/distfn.hpp"

namespace pmstat {

enum class TNorm { minimum, product, lukasiewicz };

double apply_tnorm(TNorm t, double x, double y);

/// Pointwise minimum, which realizes the maximal triangle function.
StepDistFn apply_maximal(const StepDistFn& f, const StepDistFn& g);

/// tau_T(f, g)(t) = sup_{u + v = t} T(f(u), g(v)).
///
/// For left-continuous steps the supremum over u + v = t equals the maximum of
/// T(f-value, g-value) over jump pairs whose locations sum strictly below t, so
/// the result is computed exactly on the sum-set of jump locations. `grid` is
/// validated and kept as the comparison resolution of the operation.
StepDistFn apply_supconv(TNorm t, const StepDistFn& f, const StepDistFn& g, double grid = 1e-9);

class TriangleFn {
public:
    enum class Kind { sup_convolution, maximal };

    static TriangleFn maximal() { return TriangleFn(Kind::maximal, TNorm::minimum, 1e-9); }
    static TriangleFn sup_convolution(TNorm t, double grid = 1e-9);

    /// "maximal", "min", "prod" or "luka".
    static TriangleFn from_tag(std::string_view tag);
    std::string tag() const;

    StepDistFn operator()(const StepDistFn& f, const StepDistFn& g) const;

    Kind kind() const { return kind_; }
    std::optional<TNorm> tnorm() const;
    double grid() const { return grid_; }

private:
    TriangleFn(Kind k, TNorm t, double grid) : kind_(k), tnorm_(t), grid_(grid) {}

    Kind kind_;
    TNorm tnorm_;
    double grid_;
};

using BinaryOp = std::function<StepDistFn(const StepDistFn&, const StepDistFn&)>;

struct AxiomCheck {
    std::string axiom;  // commutativity, associativity, monotonicity, identity
    bool passed = true;
    double worst_residual = 0.0;
    std::size_t cases = 0;
};

struct TriangleAxiomReport {
    std::vector<AxiomCheck> checks;
    bool passed() const;
    const AxiomCheck& at(std::string_view axiom) const;
};

/// Checks the triangle-function axioms on the sample. Commutativity,
/// associativity and identity residuals are Levy distances (0 when the two
/// sides are identical); the monotonicity residual is the largest pointwise
/// excess of tau(f, h) over tau(g, h) for f <= g. At most `max_triples`
/// leading sample members enter the triple loops.
TriangleAxiomReport check_triangle_axioms(const BinaryOp& op, std::span<const StepDistFn> sample,
                                          double tol, std::size_t max_triples = 8);
TriangleAxiomReport check_triangle_axioms(const TriangleFn& tau, std::span<const StepDistFn> sample,
                                          double tol, std::size_t max_triples = 8);

}  // namespace pmstat
