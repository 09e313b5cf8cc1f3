#include "pmstat/distfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pmstat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Value of the last jump whose shifted location (loc + shift) lies strictly
// below xi. shift = a gives f(xi - a), shift = -a gives f(xi + a); comparing
// shifted locations keeps breakpoints built from the same expression exact.
double shifted_value(std::span<const Jump> jumps, double xi, double shift) {
    double v = 0.0;
    for (const Jump& j : jumps) {
        if (j.location + shift < xi) {
            v = j.value;
        } else {
            break;
        }
    }
    return v;
}

// f(xi - a) - a <= g(xi) <= f(xi + a) + a for every xi in (0, 1/a). For
// xi <= 0 the inequalities hold trivially because both functions vanish there.
bool levy_half(const StepDistFn& f, const StepDistFn& g, double a) {
    const double hi = 1.0 / a;
    std::vector<double> cuts;
    cuts.reserve(3 * f.jumps().size() + g.jumps().size() + 2);
    auto keep = [&](double c) {
        if (c > 0.0 && c < hi) cuts.push_back(c);
    };
    for (const Jump& j : g.jumps()) keep(j.location);
    for (const Jump& j : f.jumps()) {
        keep(j.location + a);
        keep(j.location - a);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto holds = [&](double xi) {
        const double gv = shifted_value(g.jumps(), xi, 0.0);
        const double lower = shifted_value(f.jumps(), xi, a) - a;
        const double upper = shifted_value(f.jumps(), xi, -a) + a;
        return lower <= gv && gv <= upper;
    };

    // Every piece (c_i, c_{i+1}] is tested at its right end and at an
    // interior point; the last piece ends at the open bound 1/a.
    double prev = 0.0;
    for (double c : cuts) {
        if (!holds(0.5 * (prev + c)) || !holds(c)) return false;
        prev = c;
    }
    const double last_mid = std::isfinite(hi) ? 0.5 * (prev + hi) : prev + 1.0;
    return holds(last_mid);
}

void require_tol(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

}  // namespace

StepDistFn::StepDistFn(std::vector<Jump> jumps) {
    double prev_loc = -1.0;
    double prev_val = 0.0;
    for (const Jump& j : jumps) {
        if (!std::isfinite(j.location) || j.location < 0.0) {
            throw std::invalid_argument("jump location must be finite and non-negative");
        }
        if (!(j.location > prev_loc)) {
            throw std::invalid_argument("jump locations must be strictly increasing");
        }
        if (!(j.value >= 0.0 && j.value <= 1.0)) {
            throw std::invalid_argument("jump value must lie in [0, 1]");
        }
        if (j.value < prev_val) {
            throw std::invalid_argument("jump values must be non-decreasing");
        }
        if (j.value > prev_val) jumps_.push_back(j);
        prev_loc = j.location;
        prev_val = j.value;
    }
}

StepDistFn StepDistFn::unit_step(double b) {
    if (std::isnan(b) || b < 0.0) throw std::invalid_argument("unit step location must be >= 0");
    if (std::isinf(b)) return StepDistFn{};
    return StepDistFn({{b, 1.0}});
}

double StepDistFn::operator()(double t) const {
    if (std::isnan(t)) throw std::invalid_argument("cannot evaluate at NaN");
    if (t == kInf) return 1.0;
    if (t <= 0.0) return 0.0;
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const Jump& j, double x) { return j.location < x; });
    return it == jumps_.begin() ? 0.0 : std::prev(it)->value;
}

bool StepDistFn::is_zero_step() const {
    return jumps_.size() == 1 && jumps_[0].location == 0.0 && jumps_[0].value == 1.0;
}

double evaluate(const StepDistFn& f, double t) { return f(t); }

StepDistFn close_tail(const StepDistFn& f, double far) {
    if (f.final_value() >= 1.0) return f;
    std::vector<Jump> js(f.jumps().begin(), f.jumps().end());
    if (!js.empty() && !(far > js.back().location)) {
        throw std::invalid_argument("tail location must exceed the last jump");
    }
    js.push_back({far, 1.0});
    return StepDistFn(std::move(js));
}

std::vector<double> merged_locations(const StepDistFn& f, const StepDistFn& g) {
    std::vector<double> out;
    out.reserve(f.jumps().size() + g.jumps().size());
    for (const Jump& j : f.jumps()) out.push_back(j.location);
    for (const Jump& j : g.jumps()) out.push_back(j.location);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

template <class Op>
StepDistFn combine_pointwise(const StepDistFn& f, const StepDistFn& g, Op op) {
    // Just after location x the value is f(x+) op g(x+); right limits at a
    // jump location are the jump values themselves.
    std::vector<Jump> out;
    std::size_t i = 0, j = 0;
    double fv = 0.0, gv = 0.0;
    const auto fj = f.jumps();
    const auto gj = g.jumps();
    while (i < fj.size() || j < gj.size()) {
        double x;
        if (j >= gj.size() || (i < fj.size() && fj[i].location <= gj[j].location)) {
            x = fj[i].location;
        } else {
            x = gj[j].location;
        }
        if (i < fj.size() && fj[i].location == x) fv = fj[i++].value;
        if (j < gj.size() && gj[j].location == x) gv = gj[j++].value;
        out.push_back({x, op(fv, gv)});
    }
    return StepDistFn(std::move(out));
}

}  // namespace

StepDistFn pointwise_min(const StepDistFn& f, const StepDistFn& g) {
    return combine_pointwise(f, g, [](double a, double b) { return std::min(a, b); });
}

StepDistFn pointwise_max(const StepDistFn& f, const StepDistFn& g) {
    return combine_pointwise(f, g, [](double a, double b) { return std::max(a, b); });
}

double excess_over(const StepDistFn& f, const StepDistFn& g) {
    // Both are constant on (x_i, x_{i+1}]; the value there is read at x_{i+1},
    // and the unbounded last piece at (last + 1).
    const auto locs = merged_locations(f, g);
    double worst = 0.0;
    for (double x : locs) worst = std::max(worst, f(x) - g(x));
    if (!locs.empty()) worst = std::max(worst, f(locs.back() + 1.0) - g(locs.back() + 1.0));
    return worst;
}

bool pointwise_leq(const StepDistFn& f, const StepDistFn& g) { return excess_over(f, g) == 0.0; }

bool levy_feasible(const StepDistFn& f, const StepDistFn& g, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("Levy slack must be positive");
    if (a >= 1.0) return true;
    return levy_half(f, g, a) && levy_half(g, f, a);
}

double levy_distance(const StepDistFn& f, const StepDistFn& g, double tol) {
    require_tol(tol);
    if (f == g) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (levy_feasible(f, g, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double levy_distance_to_zero(const StepDistFn& f) {
    // f(t) = p_i on (x_i, x_{i+1}]; there f(t) > 1 - t iff t > 1 - p_i. The set
    // {t : f(t) > 1 - t} is an up-set, so its infimum is the first piece that
    // meets it. Below the first jump f = 0 and the condition reads t > 1.
    const auto js = f.jumps();
    double best = 1.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const double start = std::max(js[i].location, 1.0 - js[i].value);
        const double end = i + 1 < js.size() ? js[i + 1].location : kInf;
        if (start < end) {
            best = std::min(best, start);
            break;
        }
    }
    return best;
}

std::vector<double> default_weak_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 50; ++i) g.push_back(0.1 * i);
    return g;
}

WeakConvergenceReport weakly_converges(std::span<const StepDistFn> fs, const StepDistFn& f,
                                       std::size_t horizon, double tol,
                                       std::span<const double> grid, double dl_tol) {
    if (fs.empty()) throw std::invalid_argument("weak convergence needs a non-empty sequence");
    if (horizon == 0 || horizon > fs.size()) {
        throw std::invalid_argument("horizon must lie in [1, number of terms]");
    }
    require_tol(tol);

    std::vector<double> xs;
    const auto js = f.jumps();
    if (!js.empty() && js.front().location > 0.0) xs.push_back(0.5 * js.front().location);
    for (std::size_t i = 0; i + 1 < js.size(); ++i) {
        xs.push_back(0.5 * (js[i].location + js[i + 1].location));
    }
    if (!js.empty()) xs.push_back(js.back().location + 1.0);
    const std::vector<double> fallback = default_weak_grid();
    if (grid.empty()) grid = fallback;
    for (double x : grid) {
        const bool is_jump = std::any_of(js.begin(), js.end(), [x](const Jump& j) { return j.location == x; });
        if (x > 0.0 && !is_jump) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    WeakConvergenceReport rep;
    rep.tail_begin = std::max<std::size_t>(1, horizon / 2);
    rep.tail_end = horizon;
    rep.sample_points = xs.size();
    for (std::size_t k = rep.tail_begin; k <= rep.tail_end; ++k) {
        const StepDistFn& fk = fs[k - 1];
        for (double x : xs) rep.pointwise_residual = std::max(rep.pointwise_residual, std::abs(fk(x) - f(x)));
        rep.levy_residual = std::max(rep.levy_residual, levy_distance(fk, f, dl_tol));
    }
    rep.converged = rep.pointwise_residual <= tol;
    rep.levy_agrees = (rep.levy_residual <= tol) == rep.converged;
    return rep;
}

}  // namespace pmstat
