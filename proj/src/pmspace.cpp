#include "pmstat/pmspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmstat {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::string describe(const std::vector<std::string>& pts, std::initializer_list<std::size_t> idx) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (std::size_t i : idx) {
        os << (first ? "" : ", ") << pts[i];
        first = false;
    }
    os << ")";
    return os.str();
}

}  // namespace

FinitePMSpace::FinitePMSpace(std::vector<std::string> points, std::vector<StepDistFn> table, TriangleFn tau)
    : points_(std::move(points)), table_(std::move(table)), tau_(std::move(tau)) {
    const std::size_t n = points_.size();
    if (table_.size() != n * n) throw std::invalid_argument("distribution table must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (points_[i] == points_[j]) throw std::invalid_argument("duplicate point name: " + points_[i]);
        }
    }
    r_.resize(n * n);
    std::vector<double> positive;
    for (std::size_t k = 0; k < n * n; ++k) {
        r_[k] = levy_distance_to_zero(table_[k]);
        if (r_[k] > 0.0) positive.push_back(r_[k]);
    }
    std::sort(positive.begin(), positive.end());
    positive.erase(std::unique(positive.begin(), positive.end()), positive.end());
    if (positive.empty()) {
        gap_grid_ = {0.5};
    } else {
        gap_grid_.push_back(0.5 * positive.front());
        for (std::size_t i = 0; i + 1 < positive.size(); ++i) {
            gap_grid_.push_back(0.5 * (positive[i] + positive[i + 1]));
        }
        gap_grid_.push_back(positive.back() + 0.5);
    }
}

std::size_t FinitePMSpace::index_of(const std::string& name) const {
    auto it = std::find(points_.begin(), points_.end(), name);
    if (it == points_.end()) throw std::invalid_argument("unknown point: " + name);
    return static_cast<std::size_t>(it - points_.begin());
}

double FinitePMSpace::metric(std::size_t p, std::size_t q) const {
    if (!metric_) throw std::logic_error("space is not metric-induced");
    return (*metric_)[p * size() + q];
}

FinitePMSpace build_equilateral(std::vector<std::string> points, const StepDistFn& F) {
    const std::size_t n = points.size();
    if (n >= 2 && F.is_zero_step()) {
        throw SpaceError({"P-2", {0, 1}, "equilateral distribution eps_0 violates P-2"});
    }
    if (n >= 2 && F.is_infinity_step()) {
        throw std::invalid_argument("equilateral distribution must not be the step at infinity");
    }
    std::vector<StepDistFn> table(n * n, F);
    for (std::size_t i = 0; i < n; ++i) table[i * n + i] = unit_step(0.0);
    FinitePMSpace S(std::move(points), std::move(table), TriangleFn::maximal());
    const auto rep = validate_axioms(S);
    if (!rep.passed) throw SpaceError(*rep.violation);
    return S;
}

FinitePMSpace build_metric_induced(std::vector<std::string> points, const std::vector<std::vector<double>>& d) {
    const std::size_t n = points.size();
    if (d.size() != n) throw std::invalid_argument("metric table must be n x n");
    for (const auto& row : d) {
        if (row.size() != n) throw std::invalid_argument("metric table must be n x n");
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            const double v = d[p][q];
            if (!std::isfinite(v) || v < 0.0) {
                throw SpaceError({"metric", {p, q}, "distance " + describe(points, {p, q}) + " must be finite and >= 0"});
            }
            if (p == q && v != 0.0) throw SpaceError({"P-1", {p}, "d(p, p) must be 0 at " + points[p]});
            if (p != q && v == 0.0) {
                throw SpaceError({"P-2", {p, q}, "distinct points at distance 0: " + describe(points, {p, q})});
            }
            if (v != d[q][p]) throw SpaceError({"P-3", {p, q}, "asymmetric distance at " + describe(points, {p, q})});
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t s = 0; s < n; ++s) {
                if (d[p][s] > d[p][q] + d[q][s]) {
                    throw SpaceError({"metric", {p, q, s},
                                      "triangle inequality fails on " + describe(points, {p, q, s})});
                }
            }
        }
    }
    std::vector<StepDistFn> table;
    table.reserve(n * n);
    std::vector<double> flat;
    flat.reserve(n * n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            table.push_back(unit_step(d[p][q]));
            flat.push_back(d[p][q]);
        }
    }
    FinitePMSpace S(std::move(points), std::move(table), TriangleFn::sup_convolution(TNorm::minimum));
    S.metric_ = std::move(flat);
    return S;
}

SpaceAxiomReport validate_axioms(const FinitePMSpace& S, double p4_tol) {
    SpaceAxiomReport rep;
    const std::size_t n = S.size();
    const auto& pts = S.points();
    auto fail = [&](SpaceViolation v) {
        rep.passed = false;
        rep.violation = std::move(v);
        return rep;
    };
    for (std::size_t a = 0; a < n; ++a) {
        if (!S.F(a, a).is_zero_step()) return fail({"P-1", {a}, "F(a, a) != eps_0 at " + pts[a]});
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            ++rep.pairs_checked;
            if (S.F(a, b).is_zero_step()) {
                return fail({"P-2", {a, b}, "F(a, b) = eps_0 for distinct " + describe(pts, {a, b})});
            }
            if (!(S.F(a, b) == S.F(b, a))) return fail({"P-3", {a, b}, "F(a, b) != F(b, a) at " + describe(pts, {a, b})});
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                ++rep.triples_checked;
                const double excess = excess_over(S.tau()(S.F(a, b), S.F(b, c)), S.F(a, c));
                if (excess > p4_tol) {
                    std::ostringstream os;
                    os << "F(a, c) < tau(F(a, b), F(b, c)) at " << describe(pts, {a, b, c}) << " by " << excess;
                    return fail({"P-4", {a, b, c}, os.str()});
                }
            }
        }
    }
    return rep;
}

bool in_strong_neighborhood(const FinitePMSpace& S, std::size_t p, std::size_t q, double t) {
    return S.F(p, q)(t) > 1.0 - t;
}

PointSet strong_neighborhood(const FinitePMSpace& S, std::size_t p, double t) {
    require_positive(t, "neighborhood radius");
    PointSet out;
    for (std::size_t q = 0; q < S.size(); ++q) {
        if (in_strong_neighborhood(S, p, q, t)) out.insert(q);
    }
    return out;
}

PointSet strong_neighborhood_dl(const FinitePMSpace& S, std::size_t p, double t, double dl_tol) {
    require_positive(t, "neighborhood radius");
    const StepDistFn e0 = unit_step(0.0);
    PointSet out;
    for (std::size_t q = 0; q < S.size(); ++q) {
        if (levy_distance(S.F(p, q), e0, dl_tol) < t) out.insert(q);
    }
    return out;
}

PairSet strong_vicinity(const FinitePMSpace& S, double u) {
    require_positive(u, "vicinity parameter");
    PairSet out;
    for (std::size_t p = 0; p < S.size(); ++p) {
        for (std::size_t q = 0; q < S.size(); ++q) {
            if (in_strong_neighborhood(S, p, q, u)) out.emplace(p, q);
        }
    }
    return out;
}

bool vicinity_composition_holds(const FinitePMSpace& S, double alpha, double u) {
    const std::size_t n = S.size();
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (!in_strong_neighborhood(S, p, q, alpha)) continue;
            for (std::size_t s = 0; s < n; ++s) {
                if (in_strong_neighborhood(S, q, s, alpha) && !in_strong_neighborhood(S, p, s, u)) return false;
            }
        }
    }
    return true;
}

AlphaSearch vicinity_composition_alpha(const FinitePMSpace& S, double u) {
    require_positive(u, "vicinity parameter");
    AlphaSearch res;
    double alpha = u;
    for (int k = 0; k <= 60; ++k, alpha *= 0.5) {
        ++res.tried;
        res.alpha = alpha;
        if (vicinity_composition_holds(S, alpha, u)) {
            res.found = true;
            return res;
        }
    }
    return res;
}

PointSet strong_closure(const FinitePMSpace& S, const PointSet& M) {
    PointSet out = M;
    for (std::size_t c = 0; c < S.size(); ++c) {
        if (M.count(c)) continue;
        // r_ce > 0 for all e means N_c(t) misses M once t <= min r_ce
        for (std::size_t e : M) {
            if (S.r(c, e) == 0.0) {
                out.insert(c);
                break;
            }
        }
    }
    return out;
}

bool is_strongly_closed(const FinitePMSpace& S, const PointSet& M) { return strong_closure(S, M) == M; }

bool is_strongly_compact(const FinitePMSpace&, const PointSet&) { return true; }

PointSet set_limit_points(const FinitePMSpace& S, const PointSet& M) {
    PointSet out;
    for (std::size_t l = 0; l < S.size(); ++l) {
        for (std::size_t e : M) {
            if (e != l && S.r(l, e) == 0.0) {
                out.insert(l);
                break;
            }
        }
    }
    return out;
}

}  // namespace pmstat
