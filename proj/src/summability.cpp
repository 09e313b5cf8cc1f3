#include "pmstat/summability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pmstat {

namespace {

std::size_t ceil_pow(std::size_t n, double theta) {
    const double v = std::ceil(std::pow(static_cast<double>(n), theta) - 1e-12);
    return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

std::size_t isqrt(std::size_t k) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(k)));
    while (r * r > k) --r;
    while ((r + 1) * (r + 1) <= k) ++r;
    return r;
}

std::size_t tail_start(std::size_t N) { return std::max<std::size_t>(1, N / 2); }

}  // namespace

bool is_square(std::size_t k) {
    const std::size_t r = isqrt(k);
    return k > 0 && r * r == k;
}

// ---------------------------------------------------------------- matrices

SummMatrix::SummMatrix(std::string name, RowFn rows) : name_(std::move(name)), rows_(std::move(rows)) {
    if (!rows_) throw std::invalid_argument("matrix needs a row generator");
}

std::vector<RowSegment> SummMatrix::row(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("matrix rows are 1-based");
    auto segs = rows_(n);
    for (const auto& s : segs) {
        if (s.first == 0 || s.last < s.first) throw std::invalid_argument("bad row segment in " + name_);
        if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
            throw std::invalid_argument("matrix entries must be finite and non-negative in " + name_);
        }
    }
    return segs;
}

double SummMatrix::entry(std::size_t n, std::size_t k) const {
    double v = 0.0;
    for (const auto& s : row(n)) {
        if (s.first <= k && k <= s.last) v += s.weight;
    }
    return v;
}

double SummMatrix::row_sum(std::size_t n) const {
    double v = 0.0;
    for (const auto& s : row(n)) v += s.weight * static_cast<double>(s.last - s.first + 1);
    return v;
}

std::size_t SummMatrix::support_bound(std::size_t n) const {
    std::size_t b = 0;
    for (const auto& s : row(n)) b = std::max(b, s.last);
    return b;
}

SummMatrix SummMatrix::cesaro() {
    return SummMatrix("cesaro", [](std::size_t n) {
        return std::vector<RowSegment>{{1, n, 1.0 / static_cast<double>(n)}};
    });
}

SummMatrix SummMatrix::identity() {
    return SummMatrix("identity", [](std::size_t n) { return std::vector<RowSegment>{{n, n, 1.0}}; });
}

SummMatrix SummMatrix::block(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("block exponent must lie in (0, 1)");
    std::string name = "block:" + std::to_string(theta);
    while (name.back() == '0') name.pop_back();
    return SummMatrix(name, [theta](std::size_t n) {
        const std::size_t w = std::min(n, ceil_pow(n, theta));
        return std::vector<RowSegment>{{n - w + 1, n, 1.0 / static_cast<double>(w)}};
    });
}

SummMatrix SummMatrix::squares_weighted() {
    return SummMatrix("sqweight", [](std::size_t n) {
        const std::size_t s = isqrt(n);
        return std::vector<RowSegment>{{1, n, 0.5 / static_cast<double>(n)}, {s * s, s * s, 0.5}};
    });
}

SummMatrix SummMatrix::constant_column() {
    return SummMatrix("column1", [](std::size_t) { return std::vector<RowSegment>{{1, 1, 1.0}}; });
}

SummMatrix SummMatrix::from_rows(std::string name, std::vector<std::vector<RowSegment>> rows) {
    auto shared = std::make_shared<const std::vector<std::vector<RowSegment>>>(std::move(rows));
    std::string label = name;
    return SummMatrix(std::move(name), [shared, label](std::size_t n) {
        if (n > shared->size()) {
            throw std::out_of_range("matrix " + label + " defines only " + std::to_string(shared->size()) + " rows");
        }
        return (*shared)[n - 1];
    });
}

// ---------------------------------------------------------------- index sets

IndexSet IndexSet::all() { return {"all", [](std::size_t) { return true; }}; }
IndexSet IndexSet::none() { return {"none", [](std::size_t) { return false; }}; }
IndexSet IndexSet::evens() { return {"evens", [](std::size_t k) { return k % 2 == 0; }}; }
IndexSet IndexSet::odds() { return {"odds", [](std::size_t k) { return k % 2 == 1; }}; }
IndexSet IndexSet::squares() { return {"squares", [](std::size_t k) { return is_square(k); }}; }

IndexSet IndexSet::powers_of_two() {
    return {"pow2", [](std::size_t k) { return k > 0 && (k & (k - 1)) == 0; }};
}

IndexSet IndexSet::sparse_blocks() {
    return {"blocks", [](std::size_t k) {
                if (k == 0) return false;
                std::size_t j = 0;
                while ((std::size_t{2} << j) <= k) ++j;
                return k - (std::size_t{1} << j) <= j;
            }};
}

IndexSet IndexSet::geometric3() {
    return {"geom3", [](std::size_t k) {
                if (k == 0 || k % 3 != 0) return false;
                const std::size_t q = k / 3;
                return (q & (q - 1)) == 0;
            }};
}

IndexSet IndexSet::residues(std::size_t m, std::vector<std::size_t> rs) {
    if (m == 0) throw std::invalid_argument("modulus must be positive");
    std::vector<char> mask(m, 0);
    std::string name = "mod" + std::to_string(m) + "=";
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i] >= m) throw std::invalid_argument("residue out of range");
        mask[rs[i]] = 1;
        name += (i ? "," : "") + std::to_string(rs[i]);
    }
    return {name, [m, mask](std::size_t k) { return mask[k % m] != 0; }};
}

IndexSet IndexSet::finite(std::vector<std::size_t> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::string name = "fin=";
    for (std::size_t i = 0; i < members.size(); ++i) name += (i ? "," : "") + std::to_string(members[i]);
    return {name, [members](std::size_t k) { return std::binary_search(members.begin(), members.end(), k); }};
}

IndexSet IndexSet::range(std::size_t a, std::size_t b) {
    return {"range=" + std::to_string(a) + ".." + std::to_string(b),
            [a, b](std::size_t k) { return a <= k && k <= b; }};
}

IndexSet IndexSet::from_flags(std::string name, std::vector<char> flags) {
    auto shared = std::make_shared<const std::vector<char>>(std::move(flags));
    return {std::move(name), [shared](std::size_t k) { return k >= 1 && k <= shared->size() && (*shared)[k - 1]; }};
}

IndexSet IndexSet::complement() const {
    return {"not(" + name_ + ")", [p = pred_](std::size_t k) { return !p(k); }};
}

IndexSet IndexSet::united(const IndexSet& o) const {
    return {"(" + name_ + "|" + o.name_ + ")", [p = pred_, q = o.pred_](std::size_t k) { return p(k) || q(k); }};
}

IndexSet IndexSet::intersected(const IndexSet& o) const {
    return {"(" + name_ + "&" + o.name_ + ")", [p = pred_, q = o.pred_](std::size_t k) { return p(k) && q(k); }};
}

IndexSet IndexSet::minus(const IndexSet& o) const {
    return {"(" + name_ + "-" + o.name_ + ")", [p = pred_, q = o.pred_](std::size_t k) { return p(k) && !q(k); }};
}

Indicator::Indicator(const IndexSet& M, std::size_t N) : prefix_(N + 1, 0) {
    for (std::size_t k = 1; k <= N; ++k) prefix_[k] = prefix_[k - 1] + (M.contains(k) ? 1 : 0);
}

Indicator::Indicator(std::span<const char> flags) : prefix_(flags.size() + 1, 0) {
    for (std::size_t k = 1; k <= flags.size(); ++k) prefix_[k] = prefix_[k - 1] + (flags[k - 1] ? 1 : 0);
}

std::size_t Indicator::count(std::size_t a, std::size_t b) const {
    b = std::min(b, horizon());
    a = std::max<std::size_t>(a, 1);
    if (a > b) return 0;
    return prefix_[b] - prefix_[a - 1];
}

// ---------------------------------------------------------------- densities

std::vector<double> a_density_partial(const SummMatrix& A, const Indicator& M) {
    const std::size_t N = M.horizon();
    std::vector<double> y(N, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        double v = 0.0;
        for (const auto& s : A.row(n)) {
            if (s.last > N) throw std::out_of_range("row support of " + A.name() + " exceeds the horizon");
            v += s.weight * static_cast<double>(M.count(s.first, s.last));
        }
        y[n - 1] = v;
    }
    return y;
}

std::vector<double> a_density_partial(const SummMatrix& A, const IndexSet& M, std::size_t N) {
    return a_density_partial(A, Indicator(M, N));
}

const char* to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::inconclusive: return "inconclusive";
        case Status::diverged: return "diverged";
    }
    return "?";
}

Ideal Ideal::fin() { return Ideal(Kind::fin, "fin"); }

Ideal Ideal::density_zero(SummMatrix B) {
    Ideal I(Kind::density_zero, "density:" + B.name());
    I.matrix_ = std::make_shared<const SummMatrix>(std::move(B));
    return I;
}

Ideal Ideal::predicate(std::string name, Member member) {
    if (!member) throw std::invalid_argument("predicate ideal needs a membership procedure");
    Ideal I(Kind::predicate, std::move(name));
    I.member_ = std::move(member);
    return I;
}

std::string Ideal::name() const { return name_; }

const SummMatrix& Ideal::matrix() const {
    if (!matrix_) throw std::logic_error("ideal " + name_ + " has no density matrix");
    return *matrix_;
}

bool Ideal::contains(const IndexSet& M, std::size_t N, double tol) const {
    switch (kind_) {
        case Kind::fin: return Indicator(M, N).count(tail_start(N), N) == 0;
        case Kind::density_zero: return is_null(ai_density(*matrix_, fin(), M, N, tol), tol);
        case Kind::predicate: return member_(M, N, tol);
    }
    return false;
}

namespace {

void tail_range(std::span<const double> y, Verdict& v) {
    const std::size_t N = y.size();
    v.liminf = v.limsup = y[tail_start(N) - 1];
    for (std::size_t n = tail_start(N); n <= N; ++n) {
        v.liminf = std::min(v.liminf, y[n - 1]);
        v.limsup = std::max(v.limsup, y[n - 1]);
    }
}

double tail_deviation(std::span<const double> y, double L) {
    double worst = 0.0;
    for (std::size_t n = tail_start(y.size()); n <= y.size(); ++n) worst = std::max(worst, std::abs(y[n - 1] - L));
    return worst;
}

Verdict fin_limit(std::span<const double> y, double tol, std::span<const double> candidates) {
    Verdict v;
    tail_range(y, v);
    if (candidates.empty()) {
        v.value = y.back();
        v.residual = tail_deviation(y, v.value);
    } else {
        v.value = candidates.front();
        v.residual = tail_deviation(y, v.value);
        for (double c : candidates.subspan(1)) {
            const double r = tail_deviation(y, c);
            if (r < v.residual) {
                v.value = c;
                v.residual = r;
            }
        }
    }
    if (v.residual <= tol) {
        v.status = Status::converged;
    } else if (v.limsup - v.liminf > 2 * tol) {
        v.status = Status::diverged;
    } else {
        v.status = Status::inconclusive;
    }
    return v;
}

struct DensityFit {
    double L = 0.0;
    Verdict at_tol;        // density of {n : |y_n - L| >= tol}
    double worst = 0.0;    // largest estimate over the eps grid
    bool all_null = true;
};

DensityFit density_fit(std::span<const double> y, const SummMatrix& B, double burn_in, double tol, double L) {
    const std::size_t N = y.size();
    const auto skip = static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(N)));
    DensityFit fit;
    fit.L = L;
    std::vector<char> flags(N, 0);
    for (int i = 0; i < 4; ++i) {
        const double eps = tol * static_cast<double>(1 << i);
        for (std::size_t n = skip + 1; n <= N; ++n) flags[n - 1] = std::abs(y[n - 1] - L) >= eps;
        const Verdict d = ai_density(B, Ideal::fin(), Indicator(flags), tol);
        if (i == 0) fit.at_tol = d;
        fit.worst = std::max(fit.worst, d.value);
        fit.all_null = fit.all_null && is_null(d, tol);
    }
    return fit;
}

Verdict density_limit(std::span<const double> y, const Ideal& I, double tol, std::span<const double> candidates) {
    Verdict v;
    tail_range(y, v);
    std::vector<double> cands(candidates.begin(), candidates.end());
    if (cands.empty()) {
        std::vector<double> tail(y.begin() + static_cast<std::ptrdiff_t>(tail_start(y.size()) - 1), y.end());
        auto mid = tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2);
        std::nth_element(tail.begin(), mid, tail.end());
        cands.push_back(*mid);
    }
    std::optional<DensityFit> best;
    for (double c : cands) {
        DensityFit f = density_fit(y, I.matrix(), I.burn_in(), tol, c);
        if (!best || f.at_tol.value < best->at_tol.value) best = std::move(f);
    }
    v.value = best->L;
    v.residual = best->worst;
    if (best->all_null) {
        v.status = Status::converged;
    } else if (is_nonthin(best->at_tol, tol)) {
        v.status = Status::diverged;
    } else {
        v.status = Status::inconclusive;
    }
    return v;
}

}  // namespace

Verdict ideal_limit(std::span<const double> y, const Ideal& I, double tol, std::span<const double> candidates) {
    if (y.empty()) throw std::invalid_argument("ideal limit needs a non-empty sequence");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    switch (I.kind()) {
        case Ideal::Kind::fin: return fin_limit(y, tol, candidates);
        case Ideal::Kind::density_zero: return density_limit(y, I, tol, candidates);
        case Ideal::Kind::predicate: break;
    }
    throw std::invalid_argument("unsupported ideal kind for limit extraction: " + I.name());
}

Verdict ai_density(const SummMatrix& A, const Ideal& I, const IndexSet& M, std::size_t N, double tol,
                   std::span<const double> candidates) {
    return ideal_limit(a_density_partial(A, M, N), I, tol, candidates);
}

Verdict ai_density(const SummMatrix& A, const Ideal& I, const Indicator& M, double tol,
                   std::span<const double> candidates) {
    return ideal_limit(a_density_partial(A, M), I, tol, candidates);
}

bool is_null(const Verdict& v, double tol) { return v.converged() && v.value <= tol; }

bool is_nonthin(const Verdict& v, double tol) {
    switch (v.status) {
        case Status::converged: return v.value > tol;
        case Status::diverged: return true;
        case Status::inconclusive: return v.liminf > tol;
    }
    return false;
}

// ---------------------------------------------------------------- regularity

bool RegularityReport::passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

RegularityReport check_regularity(const SummMatrix& A, std::size_t N, double tol) {
    if (N < 10) throw std::invalid_argument("regularity check needs a horizon of at least 10");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const std::size_t t0 = tail_start(N);
    RegularityReport rep;

    for (std::size_t k = 1; k <= 10; ++k) rep.sampled_columns.push_back(k);
    for (std::size_t k = 16; k <= N / 4; k *= 2) rep.sampled_columns.push_back(k);

    double head_sup = 0.0, tail_sup = 0.0, sum_dev = 0.0, col = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const auto segs = A.row(n);
        double s = 0.0;
        for (const auto& g : segs) s += g.weight * static_cast<double>(g.last - g.first + 1);
        rep.running_sup = std::max(rep.running_sup, s);
        if (n < t0) {
            head_sup = std::max(head_sup, s);
            continue;
        }
        tail_sup = std::max(tail_sup, s);
        sum_dev = std::max(sum_dev, std::abs(s - 1.0));
        for (std::size_t k : rep.sampled_columns) {
            double a = 0.0;
            for (const auto& g : segs) {
                if (g.first <= k && k <= g.last) a += g.weight;
            }
            col = std::max(col, a);
        }
    }
    const double growth = std::max(0.0, tail_sup - head_sup);
    rep.conditions.push_back({"(i) bounded row sums", growth <= tol, growth});
    rep.conditions.push_back({"(ii) null columns", col <= tol, col});
    rep.conditions.push_back({"(iii) row sums tend to 1", sum_dev <= tol, sum_dev});
    return rep;
}

APWitnessReport check_ap_witness(const SummMatrix& A, const Ideal& I, std::span<const IndexSet> family,
                                 std::span<const IndexSet> witness, std::size_t N, double tol) {
    if (family.size() != witness.size()) throw std::invalid_argument("witness family size mismatch");
    APWitnessReport rep;
    rep.family_null = true;
    rep.family_disjoint = true;
    rep.finite_differences = true;
    std::vector<char> owner(N, 0), uni(N, 0);
    for (std::size_t j = 0; j < family.size(); ++j) {
        const Indicator a(family[j], N);
        rep.family_null = rep.family_null && is_null(ai_density(A, I, a, tol), tol);
        for (std::size_t k = 1; k <= N; ++k) {
            const bool in_a = a.contains(k);
            const bool in_b = witness[j].contains(k);
            if (in_a && owner[k - 1]) rep.family_disjoint = false;
            if (in_a) owner[k - 1] = 1;
            if (in_b) uni[k - 1] = 1;
            if (k >= tail_start(N) && in_a != in_b) rep.finite_differences = false;
        }
    }
    const Verdict u = ai_density(A, I, Indicator(uni), tol);
    rep.union_density = u.value;
    rep.union_null = is_null(u, tol);
    rep.passed = rep.family_null && rep.family_disjoint && rep.finite_differences && rep.union_null;
    return rep;
}

}  // namespace pmstat
