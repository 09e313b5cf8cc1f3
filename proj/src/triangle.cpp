#include "pmstat/triangle.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace pmstat {

double apply_tnorm(TNorm t, double x, double y) {
    switch (t) {
        case TNorm::minimum: return std::min(x, y);
        case TNorm::product: return x * y;
        case TNorm::lukasiewicz: {
            // ordered so that T(x, 1) = x holds exactly
            const double hi = std::max(x, y), lo = std::min(x, y);
            return std::max(0.0, lo - (1.0 - hi));
        }
    }
    throw std::invalid_argument("unknown t-norm");
}

StepDistFn apply_maximal(const StepDistFn& f, const StepDistFn& g) { return pointwise_min(f, g); }

StepDistFn apply_supconv(TNorm t, const StepDistFn& f, const StepDistFn& g, double grid) {
    if (!(grid > 0.0)) throw std::invalid_argument("sup-convolution grid must be positive");
    (void)apply_tnorm(t, 0.0, 0.0);  // rejects out-of-range tags

    struct Cand {
        double at;
        double value;
    };
    std::vector<Cand> cands;
    cands.reserve(f.jumps().size() * g.jumps().size());
    for (const Jump& a : f.jumps()) {
        for (const Jump& b : g.jumps()) {
            cands.push_back({a.location + b.location, apply_tnorm(t, a.value, b.value)});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) { return l.at < r.at; });

    // Just after s the value is the running maximum over candidates at <= s.
    std::vector<Jump> out;
    double running = 0.0;
    for (std::size_t i = 0; i < cands.size();) {
        const double s = cands[i].at;
        for (; i < cands.size() && cands[i].at == s; ++i) running = std::max(running, cands[i].value);
        out.push_back({s, running});
    }
    return StepDistFn(std::move(out));
}

TriangleFn TriangleFn::sup_convolution(TNorm t, double grid) {
    if (!(grid > 0.0)) throw std::invalid_argument("sup-convolution grid must be positive");
    return TriangleFn(Kind::sup_convolution, t, grid);
}

TriangleFn TriangleFn::from_tag(std::string_view tag) {
    if (tag == "maximal") return maximal();
    if (tag == "min") return sup_convolution(TNorm::minimum);
    if (tag == "prod") return sup_convolution(TNorm::product);
    if (tag == "luka") return sup_convolution(TNorm::lukasiewicz);
    throw std::invalid_argument("unknown t-norm tag: " + std::string(tag));
}

std::string TriangleFn::tag() const {
    if (kind_ == Kind::maximal) return "maximal";
    switch (tnorm_) {
        case TNorm::minimum: return "min";
        case TNorm::product: return "prod";
        case TNorm::lukasiewicz: return "luka";
    }
    return "?";
}

std::optional<TNorm> TriangleFn::tnorm() const {
    if (kind_ == Kind::maximal) return std::nullopt;
    return tnorm_;
}

StepDistFn TriangleFn::operator()(const StepDistFn& f, const StepDistFn& g) const {
    if (kind_ == Kind::maximal) return apply_maximal(f, g);
    return apply_supconv(tnorm_, f, g, grid_);
}

bool TriangleAxiomReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

const AxiomCheck& TriangleAxiomReport::at(std::string_view axiom) const {
    for (const auto& c : checks) {
        if (c.axiom == axiom) return c;
    }
    throw std::out_of_range("no such axiom check: " + std::string(axiom));
}

namespace {

double gap(const StepDistFn& a, const StepDistFn& b, double tol) {
    if (a == b) return 0.0;
    // resolve the distance well below the pass threshold
    return levy_distance(a, b, tol / 4.0);
}

}  // namespace

TriangleAxiomReport check_triangle_axioms(const BinaryOp& op, std::span<const StepDistFn> sample,
                                          double tol, std::size_t max_triples) {
    if (sample.empty()) throw std::invalid_argument("axiom check needs a non-empty sample");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    AxiomCheck comm{"commutativity"}, assoc{"associativity"}, mono{"monotonicity"}, ident{"identity"};
    const StepDistFn e0 = unit_step(0.0);
    const std::size_t n = sample.size();
    const std::size_t m = std::min(n, max_triples);

    for (const auto& f : sample) {
        ident.worst_residual = std::max({ident.worst_residual, gap(op(e0, f), f, tol), gap(op(f, e0), f, tol)});
        ++ident.cases;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            comm.worst_residual = std::max(comm.worst_residual, gap(op(sample[i], sample[j]), op(sample[j], sample[i]), tol));
            ++comm.cases;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const StepDistFn ij = op(sample[i], sample[j]);
            // g >= f_i by construction, so tau(f_i, h) <= tau(g, h) is required.
            const StepDistFn upper = pointwise_max(sample[i], sample[j]);
            for (std::size_t k = 0; k < m; ++k) {
                const auto& h = sample[k];
                assoc.worst_residual =
                    std::max(assoc.worst_residual, gap(op(ij, h), op(sample[i], op(sample[j], h)), tol));
                ++assoc.cases;
                mono.worst_residual = std::max({mono.worst_residual, excess_over(op(sample[i], h), op(upper, h)),
                                                excess_over(op(h, sample[i]), op(h, upper))});
                ++mono.cases;
            }
        }
    }
    TriangleAxiomReport rep;
    for (AxiomCheck* c : {&comm, &assoc, &mono, &ident}) {
        c->passed = c->worst_residual <= tol;
        rep.checks.push_back(*c);
    }
    return rep;
}

TriangleAxiomReport check_triangle_axioms(const TriangleFn& tau, std::span<const StepDistFn> sample,
                                          double tol, std::size_t max_triples) {
    return check_triangle_axioms(BinaryOp([tau](const StepDistFn& f, const StepDistFn& g) { return tau(f, g); }),
                                 sample, tol, max_triples);
}

}  // namespace pmstat
