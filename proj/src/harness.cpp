#include "pmstat/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace pmstat {

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

std::vector<std::string> names(const FinitePMSpace& S, const PointSet& ps) {
    std::vector<std::string> out;
    for (std::size_t p : ps) out.push_back(S.name(p));
    return out;
}

bool subset(const PointSet& a, const PointSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

PointSet all_points(const FinitePMSpace& S) {
    PointSet out;
    for (std::size_t p = 0; p < S.size(); ++p) out.insert(p);
    return out;
}

std::vector<PointSet> subsets_of(const PointSet& base) {
    const std::vector<std::size_t> items(base.begin(), base.end());
    std::vector<PointSet> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
        PointSet s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (mask >> i & 1u) s.insert(items[i]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- generation

StepDistFn random_step_fn(Rng& rng, int max_jumps) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_jumps)));
    std::vector<Jump> js;
    double loc = 0.0, val = 0.0;
    for (int i = 0; i < n; ++i) {
        loc += 0.05 + rng.uniform() * (2.45 / n - 0.05);
        val = (i + 1 == n) ? 1.0 : val + (1.0 - val) * rng.uniform(0.1, 0.9);
        js.push_back({loc, val});
    }
    return StepDistFn(std::move(js));
}

namespace {

std::vector<std::string> point_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
    return out;
}

FinitePMSpace random_space(Rng& rng) {
    const std::size_t n = 3 + rng.below(3);
    if (rng.below(2) == 0) return build_equilateral(point_names(n), random_step_fn(rng));
    // dyadic coordinates keep the L1 distances exact
    std::vector<std::pair<int, int>> pts;
    while (pts.size() < n) {
        const std::pair<int, int> p{static_cast<int>(rng.below(17)), static_cast<int>(rng.below(17))};
        if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i][j] = (std::abs(pts[i].first - pts[j].first) + std::abs(pts[i].second - pts[j].second)) / 8.0;
        }
    }
    return build_metric_induced(point_names(n), d);
}

IndexSet random_null_set(Rng& rng) {
    switch (rng.below(3)) {
        case 0: return IndexSet::squares();
        case 1: return IndexSet::powers_of_two();
        default: return IndexSet::sparse_blocks();
    }
}

std::size_t other_point(Rng& rng, std::size_t n, std::size_t avoid) { return (avoid + 1 + rng.below(n - 1)) % n; }

void converge_annotation(IndexedSequence& x, std::size_t L, const IndexSet& E) {
    x.annotation.limit = L;
    x.annotation.gamma = PointSet{L};
    x.annotation.cauchy = true;
    x.annotation.null_set = E;
    x.annotation.witnesses = {{L, E.complement()}};
}

IndexedSequence companion_for(Rng& rng, std::size_t n) {
    const std::size_t L = rng.below(n);
    // sparse, so the union with the main null set stays below tol
    const IndexSet E = rng.below(2) == 0 ? IndexSet::powers_of_two() : IndexSet::geometric3();
    IndexedSequence y = IndexedSequence::eventually(L, E, other_point(rng, n, L));
    converge_annotation(y, L, E);
    return y;
}

IndexedSequence twin_of(const IndexedSequence& x, const IndexSet& D, std::size_t n) {
    IndexedSequence t("twin:" + x.description(), [x, D, n](std::size_t k) { return D.contains(k) ? (x(k) + 1) % n : x(k); });
    t.annotation = x.annotation;
    return t;
}

}  // namespace

std::vector<Instance> generate_suite(std::uint64_t seed, std::size_t size) {
    std::vector<Instance> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Rng rng(splitmix64(seed) ^ splitmix64(i + 1));
        FinitePMSpace S = random_space(rng);
        const std::size_t n = S.size();
        const std::size_t L = rng.below(n);
        const std::size_t r = other_point(rng, n, L);
        const auto cesaro = SummMatrix::cesaro();
        std::optional<IndexedSequence> x;
        std::string recipe;
        SummMatrix A = cesaro;
        Ideal I = Ideal::fin();
        bool convergent = false;

        switch (i % 7) {
            case 0: {
                recipe = "eventually";
                const IndexSet E = random_null_set(rng);
                x = IndexedSequence::eventually(L, E, r);
                converge_annotation(*x, L, E);
                convergent = true;
                break;
            }
            case 1: {
                recipe = "alternator";
                const std::size_t m = 2 + rng.below(3);
                std::vector<std::size_t> r1, r2;
                const std::size_t mask = 1 + rng.below((std::size_t{1} << m) - 2);
                for (std::size_t j = 0; j < m; ++j) (mask >> j & 1u ? r1 : r2).push_back(j);
                const IndexSet s1 = IndexSet::residues(m, r1), s2 = IndexSet::residues(m, r2);
                x = IndexedSequence::alternator({L, r}, {s1, s2});
                x->annotation.gamma = PointSet{L, r};
                x->annotation.cauchy = false;
                x->annotation.witnesses = {{L, s1}, {r, s2}};
                break;
            }
            case 2: {
                recipe = "splice";
                const IndexSet E = random_null_set(rng);
                x = splice(IndexedSequence::scrambled(n, rng.next()), E, L);
                converge_annotation(*x, L, E);
                I = Ideal::density_zero(cesaro);
                convergent = true;
                break;
            }
            case 3: {
                recipe = "finite-prefix";
                const std::size_t k0 = 5 + rng.below(46);
                const IndexSet E = IndexSet::range(1, k0);
                x = splice(IndexedSequence::scrambled(n, rng.next()), E, L);
                converge_annotation(*x, L, E);
                A = SummMatrix::block(0.8);
                convergent = true;
                break;
            }
            case 4: {
                recipe = "thin-visit";
                const std::size_t q = other_point(rng, n, L);
                std::size_t third = 0;
                while (third == L || third == q) ++third;
                x = IndexedSequence::alternator({third, L, q},
                                                {IndexSet::squares(), IndexSet::evens(), IndexSet::odds()});
                x->annotation.gamma = PointSet{L, q};
                x->annotation.cauchy = false;
                x->annotation.null_set = IndexSet::squares();
                x->annotation.witnesses = {{L, IndexSet::evens().minus(IndexSet::squares())},
                                           {q, IndexSet::odds().minus(IndexSet::squares())}};
                break;
            }
            case 5: {
                recipe = "squares-weighted";
                x = IndexedSequence::eventually(L, IndexSet::squares(), r);
                x->annotation.gamma = PointSet{L, r};
                x->annotation.cauchy = false;
                x->annotation.null_set.reset();
                x->annotation.witnesses = {{L, IndexSet::squares().complement()}, {r, IndexSet::squares()}};
                A = SummMatrix::squares_weighted();
                break;
            }
            default: {
                recipe = "block-density";
                const IndexSet E = random_null_set(rng);
                x = IndexedSequence::eventually(L, E, r);
                converge_annotation(*x, L, E);
                A = SummMatrix::block(0.8);
                I = Ideal::density_zero(cesaro);
                convergent = true;
                break;
            }
        }
        const IndexSet D = IndexSet::geometric3();
        IndexedSequence twin = twin_of(*x, D, n);
        Instance inst{i, recipe, std::move(S), *x, A, I, std::nullopt, std::move(twin), D};
        if (convergent) inst.companion = companion_for(rng, n);
        out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------- oracles

bool oracle_feasible(const StepDistFn& f, const StepDistFn& g, double a) {
    if (a >= 1.0) return true;
    const double h = 1e-9;
    const double bound = 1.0 / a;
    auto ev = [](const StepDistFn& fn, double x) { return x <= 0.0 ? 0.0 : fn(x); };
    std::vector<double> critical{0.0, bound};
    for (const StepDistFn* fn : {&f, &g}) {
        for (const Jump& j : fn->jumps()) {
            critical.push_back(j.location);
            critical.push_back(j.location + a);
            critical.push_back(j.location - a);
        }
    }
    for (double c : critical) {
        for (double xi : {c - h, c + h}) {
            if (!(xi > -bound && xi < bound)) continue;
            if (ev(f, xi - a) - a > ev(g, xi) || ev(g, xi) > ev(f, xi + a) + a) return false;
            if (ev(g, xi - a) - a > ev(f, xi) || ev(f, xi) > ev(g, xi + a) + a) return false;
        }
    }
    return true;
}

double oracle_dl(const StepDistFn& f, const StepDistFn& g, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("oracle grid step must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
    for (std::size_t i = 1; i <= steps; ++i) {
        const double a = std::min(1.0, step * static_cast<double>(i));
        if (oracle_feasible(f, g, a)) return a;
    }
    return 1.0;
}

DensityRange oracle_density(const SummMatrix& A, const IndexSet& M, std::size_t N) {
    if (N < 100) throw std::invalid_argument("density oracle needs a horizon of at least 100");
    std::vector<char> in(N + 1, 0);
    for (std::size_t k = 1; k <= N; ++k) in[k] = M.contains(k);
    DensityRange r;
    bool first = true;
    for (std::size_t n = N / 2; n <= N; ++n) {
        double y = 0.0;
        for (const auto& s : A.row(n)) {
            for (std::size_t k = s.first; k <= s.last; ++k) {
                if (k <= N && in[k]) y += s.weight;
            }
        }
        r.liminf = first ? y : std::min(r.liminf, y);
        r.limsup = first ? y : std::max(r.limsup, y);
        first = false;
    }
    return r;
}

// ---------------------------------------------------------------- suite

void CheckResult::record(bool ok, double residual, const std::string& what) {
    ++cases;
    worst_residual = std::max(worst_residual, residual);
    if (ok) return;
    ++failures;
    if (!negative_control) passed = false;
    if (counterexamples.size() < kMaxCounterexamples && !what.empty()) counterexamples.push_back(what);
}

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

class Checks {
public:
    CheckResult& get(const std::string& name, bool negative = false) {
        for (auto& c : list_) {
            if (c.name == name) return c;
        }
        list_.push_back({});
        list_.back().name = name;
        list_.back().negative_control = negative;
        if (negative) list_.back().passed = false;
        return list_.back();
    }
    std::vector<CheckResult> take() { return std::move(list_); }

private:
    std::vector<CheckResult> list_;
};

std::string tag(const Instance& in) { return "instance " + std::to_string(in.id) + " (" + in.recipe + ")"; }

class OracleCache {
public:
    DensityRange get(const SummMatrix& A, const IndexSet& M, std::size_t N) {
        const auto key = std::make_tuple(A.name(), M.name(), N);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, oracle_density(A, M, N)).first;
        return it->second;
    }

private:
    std::map<std::tuple<std::string, std::string, std::size_t>, DensityRange> cache_;
};

PointSet lambda_of(const FinitePMSpace& S, const VisitFrequencies& vf,
                   const std::vector<std::pair<std::size_t, IndexSet>>& w) {
    return lambda_set(S, vf, all_points(S), w).members;
}

void run_instance(const Instance& in, const SuiteConfig& cfg, Checks& ck, OracleCache& oracle,
                  InstanceSummary& summary) {
    const FinitePMSpace& S = in.space;
    const std::size_t N = cfg.N;
    const double tol = cfg.tol;
    const auto& ann = in.sequence.annotation;
    const auto vals = in.sequence.materialize(N);
    const VisitFrequencies vf(vals, S.size(), in.matrix, in.ideal, tol);
    const std::string who = tag(in);

    std::vector<Verdict> conv;
    PointSet detected;
    for (std::size_t c = 0; c < S.size(); ++c) {
        conv.push_back(ai_stat_conv_detect(S, vf, c));
        if (conv.back().converged()) detected.insert(c);
    }

    // limits
    {
        const bool ok = ann.limit ? detected == PointSet{*ann.limit} : detected.empty();
        ck.get("limit_recovery").record(ok, ann.limit ? conv[*ann.limit].value : 0.0,
                                        who + ": detected " + std::to_string(detected.size()) + " limits");
        ck.get("limit_uniqueness").record(detected.size() <= 1, 0.0, who + ": several limits");
        for (std::size_t c = 0; c < S.size(); ++c) {
            ck.get("defect_forms_agree").record(defect_forms_agree(S, c), 0.0, who + ": point " + S.name(c));
            const bool strong = strong_conv_detect(S, vals, c).converged();
            ck.get("strong_implies_statistical").record(!strong || conv[c].converged(), 0.0, who + ": point " + S.name(c));

            // the witness y_k = c off {x_k = c} is strongly convergent; it agrees
            // with x a.a.k exactly when x converges to c
            std::vector<char> agree(N);
            for (std::size_t k = 0; k < N; ++k) agree[k] = vals[k] == c;
            const IndexSet M = IndexSet::from_flags("visits", agree);
            const auto y = splice(in.sequence, M, c).materialize(N);
            std::vector<char> differ(N);
            for (std::size_t k = 0; k < N; ++k) differ[k] = y[k] != vals[k];
            const bool witness_ok = strong_conv_detect(S, y, c).converged() && is_null(vf.density(Indicator(differ)), tol);
            ck.get("splice_equivalence").record(witness_ok == conv[c].converged(), 0.0, who + ": point " + S.name(c));
        }
    }

    // witness-carrying star convergence
    if (ann.limit && ann.null_set) {
        const IndexSet K = ann.null_set->complement();
        for (StarMode mode : {StarMode::convergence, StarMode::cauchy}) {
            const char* name = mode == StarMode::convergence ? "star_witness_convergence" : "star_witness_cauchy";
            try {
                const Verdict s = ai_star_conv_detect(S, vf, *ann.limit, K, mode);
                const bool target = mode == StarMode::convergence ? conv[*ann.limit].converged()
                                                                  : ai_stat_cauchy_detect(S, vf).converged();
                ck.get(name).record(s.converged() && target, s.residual, who + ": witness " + K.name());
            } catch (const std::invalid_argument& e) {
                ck.get(name).record(false, 0.0, who + ": " + e.what());
            }
        }
    }

    // Cauchy
    const Verdict cauchy = ai_stat_cauchy_detect(S, vf);
    ck.get("convergent_implies_cauchy").record(detected.empty() || cauchy.converged(), 0.0, who);
    if (ann.cauchy) ck.get("cauchy_recovery").record(*ann.cauchy == cauchy.converged(), cauchy.value, who);
    if (cauchy.converged()) {
        const std::size_t c = *cauchy.point;
        for (double t : S.gap_grid()) {
            const AlphaSearch a = vicinity_composition_alpha(S, t);
            std::vector<char> P(N);
            PointSet kept;
            for (std::size_t k = 0; k < N; ++k) {
                P[k] = !in_strong_neighborhood(S, vals[k], c, a.alpha);
                if (!P[k]) kept.insert(vals[k]);
            }
            bool pairs_ok = a.found;
            for (std::size_t m : kept) {
                for (std::size_t j : kept) pairs_ok = pairs_ok && in_strong_neighborhood(S, m, j, t);
            }
            const Verdict d = vf.density(Indicator(P));
            ck.get("cauchy_defect_sets").record(pairs_ok && is_null(d, tol), d.value, who + ": t=" + std::to_string(t));
        }
    }
    if (S.metric()) {
        const CauchyForms l = cauchy_forms(metric_sequence(S, vals), in.matrix, in.ideal, tol, ann.null_set);
        ck.get("cauchy_forms_equivalent")
            .record((l.all() || l.none()) && l.p1.converged() == cauchy.converged(), 0.0, who);
    }

    // pair sequences
    if (ann.limit && in.companion && in.companion->annotation.limit) {
        const auto yv = in.companion->materialize(N);
        const std::size_t L2 = *in.companion->annotation.limit;
        const StepDistFn& target = S.F(*ann.limit, L2);
        std::map<std::pair<std::size_t, std::size_t>, double> dl;
        std::vector<char> defect(N);
        for (std::size_t k = 0; k < N; ++k) {
            const auto key = std::make_pair(vals[k], yv[k]);
            auto it = dl.find(key);
            if (it == dl.end()) it = dl.emplace(key, levy_distance(S.F(key.first, key.second), target, cfg.dl_tol)).first;
            defect[k] = it->second > 0.0;
        }
        const Verdict d = vf.density(Indicator(defect));
        ck.get("pair_distance_convergence").record(is_null(d, tol), d.value, who);

        const VisitFrequencies vy(yv, S.size(), in.matrix, in.ideal, tol);
        if (cauchy.converged() && ai_stat_cauchy_detect(S, vy).converged()) {
            const CauchyForms l = cauchy_forms(dl_sequence(S, vals, yv, cfg.dl_tol), in.matrix, in.ideal, tol);
            ck.get("dl_pair_cauchy").record(l.all(), l.p1.value, who);
        }
    }

    // limit and cluster points
    const PointSet lam = lambda_of(S, vf, ann.witnesses);
    const GammaResult gam = gamma_set(S, vf);
    const PointSet lim = strong_limit_point_set(vals);
    ck.get("lambda_gamma_limit_chain").record(subset(lam, gam.members) && subset(gam.members, lim), 0.0, who);
    if (ann.gamma) {
        ck.get("gamma_recovery").record(gam.members == *ann.gamma, 0.0, who);
        ck.get("lambda_recovery").record(lam == *ann.gamma, 0.0, who);
    }
    if (!detected.empty()) {
        ck.get("gamma_of_convergent").record(gam.members == detected && lam == detected, 0.0, who);
    }
    if (in.twin && in.twin_diff) {
        const auto tv = in.twin->materialize(N);
        std::vector<char> differ(N);
        for (std::size_t k = 0; k < N; ++k) differ[k] = tv[k] != vals[k];
        const Verdict d = vf.density(Indicator(differ));
        const VisitFrequencies vt(tv, S.size(), in.matrix, in.ideal, tol);
        std::vector<std::pair<std::size_t, IndexSet>> w;
        for (const auto& [p, W] : ann.witnesses) w.emplace_back(p, W.minus(*in.twin_diff));
        const bool same = lambda_of(S, vf, w) == lambda_of(S, vt, w) && gamma_set(S, vt).members == gam.members;
        ck.get("null_modification_invariance").record(is_null(d, tol) && same, d.value, who);
    }
    ck.get("gamma_closed").record(strong_closure(S, gam.members) == gam.members, 0.0, who);
    {
        PointSet rest;
        for (std::size_t p = 0; p < S.size(); ++p) {
            if (!gam.members.count(p)) rest.insert(p);
        }
        for (const PointSet& C : subsets_of(rest)) {
            if (C.empty()) continue;
            const Verdict d = vf.density(C);
            ck.get("disjoint_from_gamma_null").record(is_null(d, tol), d.value, who);
        }
    }
    for (const PointSet& C : subsets_of(all_points(S))) {
        if (C.empty() || !stat_bounded_check(vf, C).converged()) continue;
        ck.get("bounded_gamma_nonempty").record(!gam.members.empty(), 0.0, who);
        ck.get("bounded_gamma_compact")
            .record(subset(gam.members, C) && is_strongly_compact(S, gam.members) &&
                        is_strongly_closed(S, gam.members),
                    0.0, who);
    }

    // space-level properties
    const auto axioms = validate_axioms(S);
    ck.get("space_axioms").record(axioms.passed, 0.0, who + (axioms.violation ? ": " + axioms.violation->message : ""));
    for (std::size_t p = 0; p < S.size(); ++p) {
        for (double t : S.gap_grid()) {
            ck.get("neighborhood_forms").record(strong_neighborhood(S, p, t) == strong_neighborhood_dl(S, p, t), 0.0, who);
        }
    }
    for (const PointSet& M : subsets_of(all_points(S))) {
        const PointSet k = strong_closure(S, M);
        ck.get("closure_idempotent").record(subset(M, k) && strong_closure(S, k) == k, 0.0, who);
        ck.get("finite_limit_points_empty").record(set_limit_points(S, M).empty(), 0.0, who);
    }
    for (double u : S.gap_grid()) {
        const AlphaSearch a = vicinity_composition_alpha(S, u);
        ck.get("vicinity_composition").record(a.found && a.alpha <= u, 0.0, who);
    }

    // annotations against the brute-force density oracle
    if (ann.null_set) {
        const DensityRange r = oracle.get(in.matrix, *ann.null_set, N);
        ck.get("annotation_rederivation").record(r.limsup <= tol, r.limsup, who + ": null set " + ann.null_set->name());
    }
    for (const auto& [p, W] : ann.witnesses) {
        const DensityRange r = oracle.get(in.matrix, W, N);
        ck.get("annotation_rederivation").record(r.liminf > tol, 0.0, who + ": witness " + W.name());
    }
    if (in.twin_diff) {
        const DensityRange r = oracle.get(in.matrix, *in.twin_diff, N);
        ck.get("annotation_rederivation").record(r.limsup <= tol, r.limsup, who + ": modified set");
    }

    if (in.recipe == "squares-weighted" && ann.gamma) {
        // the same sequence converges under C1 but not under the weighted matrix
        const VisitFrequencies vc(vals, S.size(), SummMatrix::cesaro(), in.ideal, tol);
        const std::size_t L = ann.witnesses.front().first;
        ck.get("matrix_separation").record(ai_stat_conv_detect(S, vc, L).converged() && detected.empty(), 0.0, who);
    }

    summary.id = in.id;
    summary.recipe = in.recipe;
    summary.sequence = in.sequence.description();
    summary.matrix = in.matrix.name();
    summary.ideal = in.ideal.name();
    summary.points = S.points();
    if (ann.limit) summary.expected_limit = S.name(*ann.limit);
    if (ann.gamma) summary.expected_gamma = names(S, *ann.gamma);
    summary.detected_limits = names(S, detected);
    summary.gamma = names(S, gam.members);
    summary.lambda = names(S, lam);
}

void run_module_invariants(const SuiteConfig& cfg, Checks& ck) {
    Rng rng(splitmix64(cfg.seed) ^ 0x5eedULL);
    const double tol = cfg.dl_tol;
    const StepDistFn e0 = unit_step(0.0);

    for (std::size_t i = 0; i < cfg.dl_samples; ++i) {
        const StepDistFn f = random_step_fn(rng), g = random_step_fn(rng), h = random_step_fn(rng);
        const double fg = levy_distance(f, g, tol), gf = levy_distance(g, f, tol);
        const double tri = levy_distance(f, h, tol) - fg - levy_distance(g, h, tol);
        ck.get("dl_metric_axioms").record(fg == gf && levy_distance(f, f, tol) <= tol && tri <= 3 * tol,
                                          std::max(0.0, tri), "sample " + std::to_string(i));
        const double step = 1e-3;
        const double o = oracle_dl(f, g, step);
        ck.get("dl_oracle_agreement").record(std::abs(o - fg) <= step + tol, std::abs(o - fg), "sample " + std::to_string(i));
        const double t = rng.uniform(0.001, 0.999);
        const double d = levy_distance(f, e0, tol);
        if (std::abs(d - t) > tol) {
            ck.get("threshold_equivalence").record((f(t) > 1.0 - t) == (d < t), 0.0, "sample " + std::to_string(i));
        }
    }
    {
        std::vector<StepDistFn> shrinking;
        for (std::size_t k = 1; k <= 1000; ++k) shrinking.push_back(unit_step(1.0 / static_cast<double>(k)));
        const auto w = weakly_converges(shrinking, e0, 1000, cfg.tol);
        ck.get("weak_convergence").record(w.converged && w.levy_agrees, w.levy_residual, "eps_{1/k}");
    }

    std::vector<StepDistFn> sample;
    for (int i = 0; i < 8; ++i) sample.push_back(random_step_fn(rng));
    for (const char* t : {"maximal", "min", "prod", "luka"}) {
        const auto rep = check_triangle_axioms(TriangleFn::from_tag(t), sample, 1e-6, 5);
        double worst = 0.0;
        for (const auto& c : rep.checks) worst = std::max(worst, c.worst_residual);
        ck.get("triangle_axioms").record(rep.passed(), worst, t);
    }
    for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
        for (TNorm t : {TNorm::minimum, TNorm::product, TNorm::lukasiewicz}) {
            ck.get("supconv_below_maximal")
                .record(pointwise_leq(apply_supconv(t, sample[i], sample[i + 1]), apply_maximal(sample[i], sample[i + 1])));
        }
    }

    for (const auto& A : {SummMatrix::cesaro(), SummMatrix::identity(), SummMatrix::block(0.8),
                          SummMatrix::squares_weighted()}) {
        const auto rep = check_regularity(A, cfg.N, 2e-3);
        double worst = 0.0;
        for (const auto& c : rep.conditions) worst = std::max(worst, c.residual);
        ck.get("regularity").record(rep.passed(), worst, A.name());
    }
    auto dens = check_density_properties(SummMatrix::cesaro(), Ideal::fin(), cfg.density_pairs, cfg.N, cfg.tol, cfg.seed);
    dens.name = "density_properties";
    ck.get("density_properties") = dens;

    std::vector<double> inv, shifted;
    for (std::size_t k = 1; k <= cfg.N; ++k) {
        inv.push_back(1.0 / static_cast<double>(k));
        shifted.push_back(2.0 + 1.0 / static_cast<double>(k * k));
    }
    const double two = 2.0;
    ck.get("fin_limit_extends_limit").record(ideal_limit(inv, Ideal::fin(), cfg.tol).converged() &&
                                             ideal_limit(shifted, Ideal::fin(), cfg.tol, {&two, 1}).converged());
}

void run_negative_controls(const std::vector<Instance>& instances, const SuiteConfig& cfg, Checks& ck) {
    // each control passes only if the sabotaged run is rejected
    {
        auto& c = ck.get("neg_zero_tolerance", true);
        for (const auto& in : instances) {
            if (!in.sequence.annotation.limit || in.recipe == "finite-prefix") continue;
            const VisitFrequencies vf(in.sequence.materialize(cfg.N), in.space.size(), in.matrix, in.ideal, 1e-12);
            c.record(!ai_stat_conv_detect(in.space, vf, *in.sequence.annotation.limit).converged(), 0.0, tag(in));
        }
        c.passed = c.cases > 0 && c.failures == 0;
    }
    for (const auto& [name, recipe] : {std::pair<const char*, const char*>{"neg_alternator_claim", "alternator"},
                                       {"neg_squares_weighted", "squares-weighted"}}) {
        auto& c = ck.get(name, true);
        for (const auto& in : instances) {
            if (in.recipe != recipe) continue;
            const VisitFrequencies vf(in.sequence.materialize(cfg.N), in.space.size(), in.matrix, in.ideal, cfg.tol);
            const std::size_t claimed = in.sequence.annotation.witnesses.front().first;
            c.record(!ai_stat_conv_detect(in.space, vf, claimed).converged(), 0.0, tag(in));
        }
        c.passed = c.cases > 0 && c.failures == 0;
    }
    {
        auto& c = ck.get("neg_left_projection", true);
        Rng rng(splitmix64(cfg.seed) ^ 0x1ef7ULL);
        std::vector<StepDistFn> sample;
        for (int i = 0; i < 6; ++i) sample.push_back(random_step_fn(rng));
        const BinaryOp left = [](const StepDistFn& f, const StepDistFn&) { return f; };
        const auto rep = check_triangle_axioms(left, sample, 1e-6, 4);
        c.record(!rep.at("commutativity").passed, rep.at("commutativity").worst_residual, "commutativity held");
        c.passed = c.failures == 0;
    }
    {
        auto& c = ck.get("neg_constant_column", true);
        const auto rep = check_regularity(SummMatrix::constant_column(), cfg.N, 2e-3);
        c.record(!rep.conditions[1].passed, rep.conditions[1].residual, "column condition held");
        c.passed = c.failures == 0;
    }
    {
        auto& c = ck.get("neg_asymmetric_table", true);
        const StepDistFn e0 = unit_step(0.0);
        const FinitePMSpace S({"a", "b"}, {e0, unit_step(1.0), unit_step(2.0), e0}, TriangleFn::maximal());
        const auto rep = validate_axioms(S);
        c.record(!rep.passed && rep.violation->axiom == "P-3", 0.0, "asymmetry not reported");
        c.passed = c.failures == 0;
    }
}

}  // namespace

SuiteReport run_theorem_suite(const std::vector<Instance>& instances, const SuiteConfig& config) {
    SuiteReport rep;
    rep.config = config;
    if (instances.empty()) return rep;
    Checks ck;
    OracleCache oracle;
    for (const auto& in : instances) {
        rep.instances.emplace_back();
        run_instance(in, config, ck, oracle, rep.instances.back());
    }
    run_module_invariants(config, ck);
    run_negative_controls(instances, config, ck);
    rep.checks = ck.take();
    return rep;
}

CheckResult check_density_properties(const SummMatrix& A, const Ideal& I, std::size_t pairs, std::size_t N,
                                     double tol, std::uint64_t seed) {
    CheckResult res;
    res.name = "density_properties";
    const std::vector<IndexSet> pool{IndexSet::evens(),
                                     IndexSet::odds(),
                                     IndexSet::residues(3, {0}),
                                     IndexSet::residues(4, {0, 1}),
                                     IndexSet::residues(5, {1, 2, 4}),
                                     IndexSet::residues(6, {5}),
                                     IndexSet::squares(),
                                     IndexSet::powers_of_two(),
                                     IndexSet::sparse_blocks(),
                                     IndexSet::geometric3(),
                                     IndexSet::squares().complement(),
                                     IndexSet::powers_of_two().complement(),
                                     IndexSet::finite({1, 2, 3, 10, 20})};
    Rng rng(splitmix64(seed) ^ 0xd5ULL);
    auto dens = [&](const IndexSet& M) { return ai_density(A, I, M, N, tol); };
    for (std::size_t i = 0; i < pairs; ++i) {
        const IndexSet& M1 = pool[rng.below(pool.size())];
        const IndexSet& M2 = pool[rng.below(pool.size())];
        const std::string who = M1.name() + " / " + M2.name();
        const Verdict d1 = dens(M1), d2 = dens(M2);
        if (!d1.converged() || !d2.converged()) continue;

        // finite symmetric difference
        std::vector<std::size_t> extra;
        for (int j = 0; j < 5; ++j) extra.push_back(1 + rng.below(50));
        const IndexSet F = IndexSet::finite(extra);
        const IndexSet M1f = M1.minus(F).united(F.minus(M1));
        const Verdict df = dens(M1f);
        res.record(df.converged() && std::abs(df.value - d1.value) <= tol, std::abs(df.value - d1.value),
                   "finite change of " + who);

        // disjoint union
        const IndexSet B = M2.minus(M1);
        const Verdict db = dens(B), du = dens(M1.united(B));
        if (db.converged() && du.converged()) {
            const double e = std::abs(du.value - d1.value - db.value);
            res.record(e <= 2 * tol, e, "additivity of " + who);
        }

        // complement
        const Verdict dc = dens(M1.complement());
        res.record(dc.converged() && std::abs(dc.value - (1.0 - d1.value)) <= tol, std::abs(dc.value - 1.0 + d1.value),
                   "complement of " + who);

        // null and full sets
        if (is_null(d1, tol) && is_null(d2, tol)) {
            const Verdict v = dens(M1.united(M2));
            res.record(is_null(v, 2 * tol), v.value, "union of null sets " + who);
        }
        const Verdict c1 = dens(M1.complement()), c2 = dens(M2.complement());
        if (is_null(c1, tol) && is_null(c2, tol)) {
            const Verdict v = dens(M1.intersected(M2));
            res.record(v.converged() && v.value >= 1.0 - 2 * tol, 1.0 - v.value, "intersection of full sets " + who);
        }
    }
    if (res.cases == 0) res.record(false, 0.0, "no applicable pairs");
    return res;
}

// ---------------------------------------------------------------- reports

std::string report_json(const SuiteReport& r) {
    using nlohmann::json;
    json checks = json::array();
    std::size_t passed = 0;
    for (const auto& c : r.checks) {
        passed += c.passed ? 1 : 0;
        checks.push_back({{"name", c.name},
                          {"negative_control", c.negative_control},
                          {"passed", c.passed},
                          {"cases", c.cases},
                          {"failures", c.failures},
                          {"worst_residual", c.worst_residual},
                          {"counterexamples", c.counterexamples}});
    }
    json inst = json::array();
    for (const auto& s : r.instances) {
        json j{{"id", s.id},
               {"recipe", s.recipe},
               {"sequence", s.sequence},
               {"matrix", s.matrix},
               {"ideal", s.ideal},
               {"points", s.points},
               {"expected_limit", s.expected_limit ? json(*s.expected_limit) : json(nullptr)},
               {"expected_gamma", s.expected_gamma},
               {"detected_limits", s.detected_limits},
               {"gamma", s.gamma},
               {"lambda", s.lambda}};
        inst.push_back(std::move(j));
    }
    const auto& c = r.config;
    json doc{{"command", "suite"},
             {"status", r.passed() ? "pass" : "fail"},
             {"config",
              {{"seed", c.seed},
               {"size", c.size},
               {"N", c.N},
               {"tol", c.tol},
               {"dl_tol", c.dl_tol},
               {"dl_samples", c.dl_samples},
               {"density_pairs", c.density_pairs}}},
             {"result",
              {{"summary",
                {{"instances", r.instances.size()},
                 {"checks", r.checks.size()},
                 {"passed", passed},
                 {"failed", r.checks.size() - passed}}},
               {"checks", checks},
               {"instances", inst}}}};
    return doc.dump(2) + "\n";
}

std::string report_csv(const SuiteReport& r) {
    std::ostringstream os;
    os << "check,negative_control,passed,cases,failures,worst_residual\n";
    os.precision(17);
    for (const auto& c : r.checks) {
        os << c.name << ',' << (c.negative_control ? 1 : 0) << ',' << (c.passed ? 1 : 0) << ',' << c.cases << ','
           << c.failures << ',' << c.worst_residual << '\n';
    }
    return os.str();
}

}  // namespace pmstat
