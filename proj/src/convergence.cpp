#include "pmstat/convergence.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "pmstat/rng.hpp"

namespace pmstat {

// ---------------------------------------------------------------- sequences

IndexedSequence::IndexedSequence(std::string description, Gen gen)
    : description_(std::move(description)), gen_(std::move(gen)) {
    if (!gen_) throw std::invalid_argument("sequence needs a generator");
}

std::size_t IndexedSequence::operator()(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("sequence indices are 1-based");
    return gen_(k);
}

std::vector<std::size_t> IndexedSequence::materialize(std::size_t N) const {
    std::vector<std::size_t> v(N);
    for (std::size_t k = 1; k <= N; ++k) v[k - 1] = gen_(k);
    return v;
}

IndexedSequence IndexedSequence::constant(std::size_t L) {
    IndexedSequence x("const:" + std::to_string(L), [L](std::size_t) { return L; });
    x.annotation.limit = L;
    x.annotation.gamma = PointSet{L};
    x.annotation.cauchy = true;
    return x;
}

IndexedSequence IndexedSequence::eventually(std::size_t L, const IndexSet& E, std::size_t r) {
    IndexedSequence x("except:" + std::to_string(L) + ":" + E.name() + ":" + std::to_string(r),
                      [L, E, r](std::size_t k) { return E.contains(k) ? r : L; });
    x.annotation.null_set = E;
    return x;
}

IndexedSequence IndexedSequence::alternator(std::vector<std::size_t> points, std::vector<IndexSet> parts) {
    if (points.empty() || points.size() != parts.size()) {
        throw std::invalid_argument("alternator needs one index set per point");
    }
    std::string desc = "alternate:";
    for (std::size_t i = 0; i < points.size(); ++i) desc += (i ? "," : "") + std::to_string(points[i]);
    for (const auto& p : parts) desc += ":" + p.name();
    return IndexedSequence(desc, [points, parts](std::size_t k) {
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i].contains(k)) return points[i];
        }
        throw std::logic_error("alternator parts do not cover index " + std::to_string(k));
    });
}

IndexedSequence IndexedSequence::from_list(std::vector<std::size_t> points) {
    return IndexedSequence("list", [points](std::size_t k) {
        if (k > points.size()) throw std::out_of_range("sequence list has only " + std::to_string(points.size()) + " terms");
        return points[k - 1];
    });
}

IndexedSequence IndexedSequence::scrambled(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("scrambled sequence needs points");
    return IndexedSequence("scrambled:" + std::to_string(n) + ":" + std::to_string(seed), [n, seed](std::size_t k) {
        return static_cast<std::size_t>(splitmix64(splitmix64(seed) ^ k) % n);
    });
}

IndexedSequence splice(const IndexedSequence& x, const IndexSet& M, std::size_t L) {
    IndexedSequence y("splice:" + std::to_string(L) + ":" + M.name() + ":" + x.description(),
                      [x, M, L](std::size_t k) { return M.contains(k) ? x(k) : L; });
    y.annotation.agreement = M;
    return y;
}

// ---------------------------------------------------------------- visit densities

VisitFrequencies::VisitFrequencies(std::vector<std::size_t> values, std::size_t labels, SummMatrix A, Ideal I,
                                   double tol)
    : values_(std::move(values)), labels_(labels), A_(std::move(A)), I_(std::move(I)), tol_(tol), cache_(labels) {
    if (values_.empty()) throw std::invalid_argument("visit frequencies need a positive horizon");
    if (!(tol_ > 0.0)) throw std::invalid_argument("tolerance must be positive");
    for (std::size_t v : values_) {
        if (v >= labels_) throw std::out_of_range("sequence value outside the carrier");
    }
}

std::optional<std::size_t> VisitFrequencies::first_index(std::size_t c) const {
    for (std::size_t k = 1; k <= values_.size(); ++k) {
        if (values_[k - 1] == c) return k;
    }
    return std::nullopt;
}

const std::vector<double>& VisitFrequencies::partial(std::size_t c) const {
    auto& slot = cache_.at(c);
    if (!slot) {
        std::vector<char> flags(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) flags[i] = values_[i] == c;
        slot = std::make_unique<std::vector<double>>(a_density_partial(A_, Indicator(flags)));
    }
    return *slot;
}

std::vector<double> VisitFrequencies::partial(const PointSet& cs) const {
    std::vector<double> y(values_.size(), 0.0);
    for (std::size_t c : cs) {
        const auto& p = partial(c);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += p[i];
    }
    return y;
}

Verdict VisitFrequencies::density(const PointSet& cs) const { return ideal_limit(partial(cs), I_, tol_); }

Verdict VisitFrequencies::density(const Indicator& M) const { return ai_density(A_, I_, M, tol_); }

Verdict VisitFrequencies::density(const IndexSet& M) const { return density(Indicator(M, values_.size())); }

VisitFrequencies visit_frequencies(const FinitePMSpace& S, const IndexedSequence& x, const SummMatrix& A,
                                   const Ideal& I, std::size_t N, double tol) {
    return VisitFrequencies(x.materialize(N), S.size(), A, I, tol);
}

// ---------------------------------------------------------------- detectors

PointSet outside_neighborhood(const FinitePMSpace& S, std::size_t L, double t) {
    PointSet out;
    for (std::size_t q = 0; q < S.size(); ++q) {
        if (!in_strong_neighborhood(S, q, L, t)) out.insert(q);
    }
    return out;
}

Verdict strong_conv_detect(const FinitePMSpace& S, const std::vector<std::size_t>& values, std::size_t L,
                           const IndexSet* K) {
    const std::size_t N = values.size();
    std::size_t k0 = 1;
    for (double t : S.gap_grid()) {
        const PointSet bad = outside_neighborhood(S, L, t);
        for (std::size_t k = N; k >= 1; --k) {
            if (K && !K->contains(k)) continue;
            if (bad.count(values[k - 1])) {
                k0 = std::max(k0, k + 1);
                break;
            }
        }
    }
    Verdict v;
    v.point = L;
    v.witness = k0;
    v.value = static_cast<double>(k0);
    v.residual = static_cast<double>(k0 - 1) / static_cast<double>(N);
    v.status = k0 <= N / 2 ? Status::converged : Status::diverged;
    return v;
}

Verdict ai_stat_conv_detect(const FinitePMSpace& S, const VisitFrequencies& vf, std::size_t L) {
    Verdict v;
    v.point = L;
    v.status = Status::converged;
    bool first = true;
    for (double t : S.gap_grid()) {
        const Verdict d = vf.density(outside_neighborhood(S, L, t));
        if (first || d.value > v.value) {
            v.value = d.value;
            v.liminf = d.liminf;
            v.limsup = d.limsup;
            first = false;
        }
        v.residual = std::max(v.residual, d.value);
        if (is_null(d, vf.tol())) continue;
        if (is_nonthin(d, vf.tol())) {
            v.status = Status::diverged;
        } else if (v.status == Status::converged) {
            v.status = Status::inconclusive;
        }
    }
    return v;
}

bool defect_forms_agree(const FinitePMSpace& S, std::size_t L, double dl_tol) {
    const StepDistFn e0 = unit_step(0.0);
    for (double t : S.gap_grid()) {
        PointSet by_dl;
        for (std::size_t q = 0; q < S.size(); ++q) {
            if (levy_distance(S.F(q, L), e0, dl_tol) >= t) by_dl.insert(q);
        }
        if (by_dl != outside_neighborhood(S, L, t)) return false;
    }
    return true;
}

namespace {

std::vector<std::size_t> centers_by_first_visit(const std::vector<std::size_t>& values, const IndexSet* K = nullptr) {
    std::vector<std::size_t> out;
    std::vector<char> seen;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        if (K && !K->contains(k)) continue;
        const std::size_t c = values[k - 1];
        if (c >= seen.size()) seen.resize(c + 1, 0);
        if (!seen[c]) {
            seen[c] = 1;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

Verdict ai_stat_cauchy_detect(const FinitePMSpace& S, const VisitFrequencies& vf) {
    std::optional<Verdict> best;
    for (std::size_t c : centers_by_first_visit(vf.values())) {
        Verdict v = ai_stat_conv_detect(S, vf, c);
        v.witness = vf.first_index(c);
        if (v.converged()) return v;
        if (!best || v.value < best->value) best = v;
    }
    return *best;
}

Verdict ai_star_conv_detect(const FinitePMSpace& S, const VisitFrequencies& vf, std::size_t L, const IndexSet& K,
                            StarMode mode) {
    const Verdict d = vf.density(K.complement());
    if (d.status == Status::inconclusive) {
        throw std::invalid_argument("density of the complement of " + K.name() + " is inconclusive");
    }
    Verdict inner;
    if (mode == StarMode::convergence) {
        inner = strong_conv_detect(S, vf.values(), L, &K);
    } else {
        inner.status = Status::diverged;
        for (std::size_t c : centers_by_first_visit(vf.values(), &K)) {
            inner = strong_conv_detect(S, vf.values(), c, &K);
            if (inner.converged()) break;
        }
    }
    Verdict v = inner;
    v.value = d.value;
    v.residual = d.value;
    v.liminf = d.liminf;
    v.limsup = d.limsup;
    v.status = is_null(d, vf.tol()) && inner.converged() ? Status::converged : Status::diverged;
    return v;
}

// ---------------------------------------------------------------- metric sequences

MetricSequence metric_sequence(const FinitePMSpace& S, const std::vector<std::size_t>& values) {
    if (!S.metric()) throw std::invalid_argument("Cauchy predicates need a metric-induced space or a d_L reading");
    MetricSequence ms;
    ms.labels = S.points();
    ms.rho = *S.metric();
    ms.values = values;
    return ms;
}

MetricSequence dl_sequence(const FinitePMSpace& S, const std::vector<std::size_t>& x,
                           const std::vector<std::size_t>& y, double dl_tol) {
    if (x.size() != y.size()) throw std::invalid_argument("sequences must share the horizon");
    MetricSequence ms;
    std::vector<StepDistFn> fns;
    ms.values.reserve(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const StepDistFn& f = S.F(x[k], y[k]);
        auto it = std::find(fns.begin(), fns.end(), f);
        if (it == fns.end()) {
            fns.push_back(f);
            ms.labels.push_back("F(" + S.name(x[k]) + "," + S.name(y[k]) + ")");
            it = fns.end() - 1;
        }
        ms.values.push_back(static_cast<std::size_t>(it - fns.begin()));
    }
    const std::size_t m = fns.size();
    ms.rho.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            ms.rho[a * m + b] = ms.rho[b * m + a] = levy_distance(fns[a], fns[b], dl_tol);
        }
    }
    return ms;
}

std::vector<double> gamma_grid(const MetricSequence& ms, double zeta) {
    std::vector<double> vals;
    for (double r : ms.rho) {
        if (r > zeta) vals.push_back(r);
    }
    std::sort(vals.begin(), vals.end());
    std::vector<double> levels{0.0};
    for (double r : vals) {
        if (levels.size() == 1 || r - levels.back() > zeta) levels.push_back(r);
    }
    std::vector<double> grid;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) grid.push_back(0.5 * (levels[i] + levels[i + 1]));
    return grid;
}

CauchyForms cauchy_forms(const MetricSequence& ms, const SummMatrix& A, const Ideal& I, double tol,
                         const std::optional<IndexSet>& annotated, double zeta) {
    const std::size_t m = ms.labels.size();
    const std::size_t N = ms.values.size();
    const VisitFrequencies vf(ms.values, m, A, I, tol);
    const auto grid = gamma_grid(ms, zeta);
    const auto centers = centers_by_first_visit(ms.values);
    auto far_from = [&](std::size_t c, double g) {
        PointSet out;
        for (std::size_t b = 0; b < m; ++b) {
            if (ms.d(b, c) > zeta && ms.d(b, c) >= g) out.insert(b);
        }
        return out;
    };

    CauchyForms res;
    // p1
    res.p1.status = Status::diverged;
    res.p1.value = std::numeric_limits<double>::infinity();
    for (std::size_t c : centers) {
        double worst = 0.0;
        bool ok = true;
        for (double g : grid) {
            const Verdict d = vf.density(far_from(c, g));
            worst = std::max(worst, d.value);
            ok = ok && is_null(d, tol);
        }
        if (ok || worst < res.p1.value) {
            res.p1.value = worst;
            res.p1.residual = worst;
            res.p1.point = c;
            res.p1.witness = vf.first_index(c);
        }
        if (ok) {
            res.p1.status = Status::converged;
            break;
        }
    }

    // p2
    res.p2.status = Status::converged;
    for (double g : grid) {
        std::vector<std::vector<char>> cands;
        if (annotated) {
            std::vector<char> f(N);
            for (std::size_t k = 1; k <= N; ++k) f[k - 1] = annotated->contains(k);
            cands.push_back(std::move(f));
        }
        for (std::size_t c : centers) {
            std::vector<char> f(N);
            for (std::size_t k = 1; k <= N; ++k) f[k - 1] = ms.d(ms.values[k - 1], c) >= 0.5 * g;
            cands.push_back(std::move(f));
        }
        bool found = false;
        for (const auto& f : cands) {
            const Verdict d = vf.density(Indicator(f));
            if (!is_null(d, tol)) continue;
            std::vector<std::size_t> kept;
            for (std::size_t k = 1; k <= N; ++k) {
                if (!f[k - 1]) kept.push_back(ms.values[k - 1]);
            }
            std::sort(kept.begin(), kept.end());
            kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
            double diam = 0.0;
            for (std::size_t a : kept) {
                for (std::size_t b : kept) diam = std::max(diam, ms.d(a, b) > zeta ? ms.d(a, b) : 0.0);
            }
            if (diam < g) {
                found = true;
                res.p2.residual = std::max(res.p2.residual, d.value);
                break;
            }
        }
        if (!found) {
            res.p2.status = Status::diverged;
            res.p2.value = g;
            break;
        }
    }

    // p3
    res.p3.status = Status::converged;
    for (double g : grid) {
        PointSet bad;
        for (std::size_t c : centers) {
            if (!is_null(vf.density(far_from(c, g)), tol)) bad.insert(c);
        }
        const Verdict d = vf.density(bad);
        res.p3.value = std::max(res.p3.value, d.value);
        res.p3.residual = res.p3.value;
        if (!is_null(d, tol)) res.p3.status = Status::diverged;
    }
    return res;
}

// ---------------------------------------------------------------- limit and cluster points

LambdaResult lambda_set(const FinitePMSpace& S, const VisitFrequencies& vf, const PointSet& candidates,
                        const std::vector<std::pair<std::size_t, IndexSet>>& witnesses) {
    LambdaResult res;
    for (std::size_t c : candidates) {
        bool any = false;
        for (const auto& [p, W] : witnesses) {
            if (p != c) continue;
            any = true;
            if (is_nonthin(vf.density(W), vf.tol()) && strong_conv_detect(S, vf.values(), c, &W).converged()) {
                res.members.insert(c);
                break;
            }
        }
        if (!any) res.warnings.push_back("no witness for " + S.name(c) + "; skipped");
    }
    return res;
}

GammaResult gamma_set(const FinitePMSpace& S, const VisitFrequencies& vf) {
    GammaResult res;
    for (std::size_t nu = 0; nu < S.size(); ++nu) {
        bool member = true;
        for (double t : S.gap_grid()) {
            PointSet hits;
            for (std::size_t q = 0; q < S.size(); ++q) {
                if (S.F(q, nu)(t) > 1.0 - t) hits.insert(q);
            }
            const Verdict d = vf.density(hits);
            if (d.status == Status::inconclusive) res.inconclusive.insert(nu);
            if (is_null(d, vf.tol())) {
                member = false;
                break;
            }
        }
        if (member) res.members.insert(nu);
    }
    return res;
}

PointSet strong_limit_point_set(const std::vector<std::size_t>& values) {
    PointSet out;
    for (std::size_t k = std::max<std::size_t>(1, values.size() / 2); k <= values.size(); ++k) out.insert(values[k - 1]);
    return out;
}

Verdict stat_bounded_check(const VisitFrequencies& vf, const PointSet& C) {
    PointSet outside;
    for (std::size_t c = 0; c < vf.labels(); ++c) {
        if (!C.count(c)) outside.insert(c);
    }
    Verdict v = vf.density(outside);
    v.residual = v.value;
    if (is_null(v, vf.tol())) {
        v.status = Status::converged;
    } else {
        v.status = is_nonthin(v, vf.tol()) ? Status::diverged : Status::inconclusive;
    }
    return v;
}

}  // namespace pmstat
