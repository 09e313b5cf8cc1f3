#include "doctest.h"

#include <cmath>

#include "pmstat/summability.hpp"

using namespace pmstat;

TEST_CASE("index sets") {
    CHECK(IndexSet::squares().contains(49));
    CHECK_FALSE(IndexSet::squares().contains(50));
    CHECK(IndexSet::powers_of_two().contains(1024));
    CHECK_FALSE(IndexSet::powers_of_two().contains(1023));
    const auto b = IndexSet::sparse_blocks();
    for (std::size_t k : {1, 2, 3, 4, 5, 6, 8, 11, 16, 20}) CHECK(b.contains(k));
    for (std::size_t k : {7, 12, 15, 21}) CHECK_FALSE(b.contains(k));
    CHECK(IndexSet::geometric3().contains(96));
    CHECK_FALSE(IndexSet::geometric3().contains(9));
    const auto r = IndexSet::residues(4, {0, 1});
    CHECK(r.contains(8));
    CHECK(r.contains(9));
    CHECK_FALSE(r.contains(10));
    CHECK(r.name() == "mod4=0,1");
    CHECK(IndexSet::evens().complement().contains(3));
    CHECK(IndexSet::evens().united(IndexSet::squares()).contains(9));
    CHECK_FALSE(IndexSet::evens().intersected(IndexSet::squares()).contains(9));
    CHECK(IndexSet::all().minus(IndexSet::finite({1, 2})).contains(3));
    const Indicator ind(IndexSet::evens(), 10);
    CHECK(ind.count(1, 10) == 5);
    CHECK(ind.count(3, 100) == 4);
}

TEST_CASE("matrices") {
    const auto c = SummMatrix::cesaro();
    CHECK(c.entry(4, 3) == 0.25);
    CHECK(c.entry(4, 5) == 0.0);
    CHECK(c.row_sum(7) == doctest::Approx(1.0));
    const auto s = SummMatrix::squares_weighted();
    CHECK(s.entry(10, 9) == doctest::Approx(0.55));
    CHECK(s.row_sum(10) == doctest::Approx(1.0));
    const auto bl = SummMatrix::block(0.5);
    CHECK(bl.name() == "block:0.5");
    CHECK(bl.entry(100, 91) == doctest::Approx(0.1));
    CHECK(bl.entry(100, 90) == 0.0);
    const auto f = SummMatrix::from_rows("file", {{{1, 1, 1.0}}, {{1, 2, 0.5}}});
    CHECK(f.entry(2, 2) == 0.5);
    CHECK_THROWS_AS(f.row(3), std::out_of_range);
    CHECK_THROWS(SummMatrix::from_rows("bad", {{{1, 1, -1.0}}}).row(1));
}

TEST_CASE("partial densities") {
    const auto c = SummMatrix::cesaro();
    const auto ev = a_density_partial(c, IndexSet::evens(), 1000);
    CHECK(std::abs(ev.back() - 0.5) <= 1.0 / 1000);
    const auto fin = a_density_partial(c, IndexSet::finite({1, 2, 3}), 100);
    CHECK(fin[49] == doctest::Approx(3.0 / 50));
    for (double y : a_density_partial(c, IndexSet::all(), 200)) CHECK(y == doctest::Approx(1.0));
}

TEST_CASE("ideal limits") {
    std::vector<double> inv, alt, sq;
    for (std::size_t k = 1; k <= 10000; ++k) {
        inv.push_back(1.0 / static_cast<double>(k));
        alt.push_back(k % 2 ? 0.0 : 1.0);
        sq.push_back(is_square(k) ? 1.0 : 0.0);
    }
    const auto a = ideal_limit(inv, Ideal::fin(), 1e-3);
    CHECK(a.converged());
    CHECK(a.value == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(ideal_limit(alt, Ideal::fin(), 1e-2).status == Status::diverged);

    const auto d = Ideal::density_zero(SummMatrix::cesaro());
    const auto b = ideal_limit(sq, d, 1e-2);
    CHECK(b.converged());
    CHECK(b.value == 0.0);
    CHECK(ideal_limit(sq, Ideal::fin(), 1e-2).status == Status::diverged);
    CHECK_FALSE(ideal_limit(alt, d, 1e-2).converged());
    const double cands[] = {0.0, 1.0};
    CHECK_FALSE(ideal_limit(alt, d, 1e-2, cands).converged());

    const auto p = Ideal::predicate("custom", [](const IndexSet&, std::size_t, double) { return true; });
    CHECK_THROWS_WITH_AS(ideal_limit(inv, p, 1e-2), doctest::Contains("unsupported ideal kind"), std::invalid_argument);
    CHECK(p.contains(IndexSet::all(), 10, 0.1));
}

TEST_CASE("ideal membership") {
    const auto d = Ideal::density_zero(SummMatrix::cesaro());
    CHECK(d.contains(IndexSet::squares(), 10000, 0.02));
    CHECK(d.contains(IndexSet::finite({5}), 1000, 0.01));
    CHECK_FALSE(d.contains(IndexSet::evens(), 1000, 0.01));
    CHECK(Ideal::fin().contains(IndexSet::finite({1, 7}), 100, 0.01));
    CHECK_FALSE(Ideal::fin().contains(IndexSet::squares(), 10000, 0.01));
    CHECK(Ideal::fin().contains(IndexSet::none(), 100, 0.01));
}

TEST_CASE("A^I densities") {
    const auto c = SummMatrix::cesaro();
    const std::size_t N = 10000;
    const auto ev = ai_density(c, Ideal::fin(), IndexSet::evens(), N, 0.01);
    CHECK(ev.converged());
    CHECK(std::abs(ev.value - 0.5) <= 0.01);
    const auto sq = ai_density(c, Ideal::fin(), IndexSet::squares(), N, 0.01);
    CHECK(is_null(sq, 0.01));
    CHECK(std::abs(ai_density(c, Ideal::fin(), IndexSet::all(), N, 0.01).value - 1.0) <= 1e-12);
    CHECK(ai_density(c, Ideal::fin(), IndexSet::finite({1, 2, 3}), N, 0.01).value <= 0.001);
    CHECK(ai_density(c, Ideal::fin(), IndexSet::none(), N, 0.01).value == 0.0);
    const auto dz = ai_density(c, Ideal::density_zero(c), IndexSet::evens(), N, 0.01);
    CHECK(dz.converged());
    CHECK(std::abs(dz.value - 0.5) <= 0.01);

    // squares are heavy under the squares-weighted matrix
    const auto w = ai_density(SummMatrix::squares_weighted(), Ideal::fin(), IndexSet::squares(), N, 0.01);
    CHECK(w.converged());
    CHECK(std::abs(w.value - 0.5) <= 0.01);
    CHECK(is_null(ai_density(SummMatrix::squares_weighted(), Ideal::fin(), IndexSet::geometric3(), N, 0.01), 0.01));
}

TEST_CASE("nonthin semantics") {
    Verdict v;
    v.status = Status::inconclusive;
    v.liminf = 0.3;
    CHECK(is_nonthin(v, 0.01));
    v.liminf = 0.0;
    CHECK_FALSE(is_nonthin(v, 0.01));
    v.status = Status::converged;
    v.value = 0.005;
    CHECK(is_null(v, 0.01));
    CHECK_FALSE(is_nonthin(v, 0.01));
}

TEST_CASE("regularity") {
    for (const auto& A : {SummMatrix::cesaro(), SummMatrix::identity(), SummMatrix::block(0.8),
                          SummMatrix::squares_weighted()}) {
        const auto r = check_regularity(A, 10000, 2e-3);
        CHECK_MESSAGE(r.passed(), A.name());
        for (const auto& c : r.conditions) CHECK(c.residual < 2e-3);
    }
    const auto bad = check_regularity(SummMatrix::constant_column(), 10000, 2e-3);
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.conditions[1].passed);
    CHECK(bad.conditions[0].passed);
    CHECK(bad.conditions[2].passed);
    CHECK_THROWS(check_regularity(SummMatrix::cesaro(), 5, 0.1));
}

TEST_CASE("additive property witnesses") {
    const auto c = SummMatrix::cesaro();
    const std::vector<IndexSet> family{IndexSet::squares(), IndexSet::geometric3(), IndexSet::finite({2, 5})};
    const std::vector<IndexSet> witness{IndexSet::squares().minus(IndexSet::finite({1})), IndexSet::geometric3(),
                                        IndexSet::none()};
    const auto ok = check_ap_witness(c, Ideal::fin(), family, witness, 10000, 0.02);
    CHECK(ok.passed);
    const std::vector<IndexSet> bad_w{IndexSet::evens(), IndexSet::geometric3(), IndexSet::none()};
    CHECK_FALSE(check_ap_witness(c, Ideal::fin(), family, bad_w, 10000, 0.02).passed);
}
