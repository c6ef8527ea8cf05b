#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "profree/chartable.hpp"
#include "profree/constructions.hpp"
#include "profree/spectral.hpp"

using namespace profree;

namespace {

GroupSubset random_subset(const GroupPtr& g, std::uint64_t seed, int target) {
    Rng rng(seed);
    GroupSubset s(g);
    while (s.card() < target) s.add(rng.int_below(g->order()));
    return s;
}

// Relabels the group by the automorphism x -> g x g^{-1} (fixes the identity).
GroupPtr conjugate_relabel(const GroupPtr& g, int c) {
    int n = g->order();
    std::vector<int> phi(n);
    for (int x = 0; x < n; ++x) phi[x] = g->mul(g->mul(c, x), g->inv(c));
    std::vector<std::int32_t> table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            table[static_cast<std::size_t>(phi[a]) * n + phi[b]] = phi[g->mul(a, b)];
    return std::make_shared<Group>(n, std::move(table), g->label() + "-relabeled");
}

} // namespace

TEST_CASE("incidence matrix structure") {
    auto z6 = build_cyclic(6);

    auto full = cayley_incidence(z6, GroupSubset::full(z6));
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) REQUIRE(full.entry(y, x));

    auto ident = cayley_incidence(z6, GroupSubset::of(z6, {0}));
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) REQUIRE(ident.entry(y, x) == (x == y));

    // a singleton gives the permutation matrix of left multiplication
    auto single = cayley_incidence(z6, GroupSubset::of(z6, {2}));
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x)
            REQUIRE(single.entry(y, x) == (y == z6->mul(2, x)));

    REQUIRE_THROWS_AS(cayley_incidence(z6, GroupSubset(z6)), value_error);
}

TEST_CASE("biregularity") {
    auto p5 = build_psl2(5);
    auto a = random_subset(p5.group, 11, 17);
    auto nmat = cayley_incidence(p5.group, a);
    for (int y = 0; y < nmat.dim(); ++y) REQUIRE(nmat.row(y).count() == a.card());
    std::vector<int> colsum(nmat.dim(), 0);
    for (int y = 0; y < nmat.dim(); ++y)
        nmat.row(y).for_each([&](int x) { ++colsum[x]; });
    for (int x = 0; x < nmat.dim(); ++x) REQUIRE(colsum[x] == a.card());
}

TEST_CASE("trivial spectra") {
    auto z8 = build_cyclic(8);

    auto full = singular_spectrum(cayley_incidence(z8, GroupSubset::full(z8)));
    REQUIRE(full.sigma[0] == Catch::Approx(8.0).margin(1e-9));
    // zero singular values come back as sqrt(eigenvalue error) of the Gram
    // matrix, so the tolerance is the square root of the dense-solver one
    for (std::size_t i = 1; i < full.sigma.size(); ++i)
        REQUIRE(full.sigma[i] == Catch::Approx(0.0).margin(1e-6));

    auto ident = singular_spectrum(cayley_incidence(z8, GroupSubset::of(z8, {0})));
    for (double s : ident.sigma) REQUIRE(s == Catch::Approx(1.0).margin(1e-9));

    // permutation matrices are orthogonal
    auto perm = singular_spectrum(cayley_incidence(z8, GroupSubset::of(z8, {3})));
    for (double s : perm.sigma) REQUIRE(s == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("sigma1 equals the set size with the all-ones vector") {
    auto s4 = build_symmetric(4);
    auto g = s4.group;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto a = random_subset(g, seed, 7);
        auto nmat = cayley_incidence(g, a);
        auto spec = singular_spectrum(nmat);
        REQUIRE(spec.sigma[0] == Catch::Approx(7.0).margin(1e-9 * g->order()));
        // N * 1 = |A| * 1
        std::vector<double> ones(g->order(), 1.0);
        auto n1 = nmat.apply(ones);
        for (double v : n1) REQUIRE(v == Catch::Approx(7.0).margin(1e-12));
        // trace identity
        double sumsq = 0.0;
        for (double s : spec.sigma) sumsq += s * s;
        double edges = static_cast<double>(g->order()) * a.card();
        REQUIRE(std::abs(sumsq - edges) <= 1e-6 * edges);
    }
}

TEST_CASE("power iteration agrees with the dense path") {
    auto p5 = build_psl2(5);
    for (std::uint64_t seed : {5ull, 6ull}) {
        auto a = random_subset(p5.group, seed, 12);
        auto nmat = cayley_incidence(p5.group, a);
        auto dense = singular_spectrum(nmat, 0);
        auto top = singular_spectrum(nmat, 2);
        REQUIRE(top.method == "power");
        REQUIRE(top.sigma[0] == Catch::Approx(dense.sigma[0]).epsilon(1e-7));
        REQUIRE(top.sigma[1] == Catch::Approx(dense.sigma[1]).epsilon(1e-5));
        REQUIRE(top.converged);
    }
}

TEST_CASE("disconnected generating sets keep sigma1 = |A|") {
    // A = a proper subgroup: the graph splits into components and the top
    // value has multiplicity, which the deflated second value must reproduce
    auto z12 = build_cyclic(12);
    auto sub = GroupSubset::of(z12, {0, 4, 8});
    auto spec = singular_spectrum(cayley_incidence(z12, sub), 2);
    REQUIRE(spec.sigma[0] == Catch::Approx(3.0).margin(1e-8));
    REQUIRE(spec.sigma[1] == Catch::Approx(3.0).margin(1e-6));
}

TEST_CASE("lambda bound check") {
    auto p7 = build_psl2(7);
    auto a = babai_sos(p7.action, 0, 1);
    auto check = gowers_lambda_check(p7.group, a, 3);
    REQUIRE(check.bound == Catch::Approx(168.0 * 21 / 3));
    REQUIRE(check.holds);
    REQUIRE(check.slack >= 0.0);
    REQUIRE(check.sigma1 == Catch::Approx(21.0).margin(1e-7));

    auto g = GroupSubset::full(p7.group);
    auto trivial = gowers_lambda_check(p7.group, g, 3);
    REQUIRE(trivial.lambda == Catch::Approx(0.0).margin(1e-6));
    REQUIRE(trivial.holds);

    // delta = 1 makes the bound n|A|, always satisfied
    auto z10 = build_cyclic(10);
    auto odd = GroupSubset::of(z10, {1, 3, 5, 7, 9});
    auto weak = gowers_lambda_check(z10, odd, 1);
    REQUIRE(weak.holds);
}

TEST_CASE("lambda bound holds across random sets and groups") {
    auto p5 = build_psl2(5);
    int d5 = delta(*p5.group);
    REQUIRE(d5 == 3);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto a = random_subset(p5.group, 100 + seed, 5 + static_cast<int>(seed) * 9);
        auto check = gowers_lambda_check(p5.group, a, d5, 0);  // full spectrum
        REQUIRE(check.holds);
        REQUIRE(check.slack >= 0.0);
    }
}

TEST_CASE("triple bound arithmetic") {
    auto b = gowers_triple_bound(168, 3);
    REQUIRE(b.triple_bound == Catch::Approx(168.0 * 168 * 168 / 3));
    REQUIRE(b.alpha_upper == Catch::Approx(116.5).margin(0.05));

    auto vac = gowers_triple_bound(24, 1);
    REQUIRE(vac.alpha_upper == Catch::Approx(24.0));

    REQUIRE_THROWS_AS(gowers_triple_bound(10, 0), value_error);
}

TEST_CASE("alpha upper bound scales like n^{8/9} over the PSL2 family") {
    // n / delta^{1/3} stays within a constant multiple of n^{8/9}
    for (int q : {5, 7, 11, 13, 17, 19}) {
        auto built = build_psl2(q);
        int n = built.group->order();
        int d = delta(*built.group);
        if (q % 4 == 1) REQUIRE(d == (q + 1) / 2);
        if (q % 4 == 3) REQUIRE(d == (q - 1) / 2);
        double upper = gowers_triple_bound(n, d).alpha_upper;
        double ratio = upper / std::pow(static_cast<double>(n), 8.0 / 9.0);
        REQUIRE(ratio >= 1.0);
        REQUIRE(ratio <= 1.4);
    }
}

TEST_CASE("triple verification") {
    auto p7 = build_psl2(7);
    auto t = triple_construction(p7.action, TargetSet::of(p7.action, {0, 1}),
                                 TargetSet::of(p7.action, {0, 1}));
    auto check = gowers_verify_triple(t.a, t.b, t.c, 3);
    REQUIRE(check.hypothesis);
    REQUIRE(check.bound_holds);
    REQUIRE(check.rst_delta <= 1.0);

    // A = B = C = a maximum product-free set of S3
    auto s3 = build_from_generators({{1, 0, 2}, {1, 2, 0}});
    std::vector<int> transpositions;
    for (int x = 1; x < 6; ++x)
        if (s3.group->mul(x, x) == 0) transpositions.push_back(x);
    auto s = GroupSubset::of(s3.group, transpositions);
    auto c2 = gowers_verify_triple(s, s, s, 1);
    REQUIRE(c2.hypothesis);
    REQUIRE(c2.product == 27);
    REQUIRE(c2.bound_numerator == 216);
    REQUIRE(c2.bound_holds);

    // hypothesis failure is reported, not asserted
    auto g = GroupSubset::full(s3.group);
    auto c3 = gowers_verify_triple(g, g, g, 1);
    REQUIRE_FALSE(c3.hypothesis);
    REQUIRE_FALSE(c3.bound_holds);
}

TEST_CASE("covering consequence of oversized triples") {
    auto p5 = build_psl2(5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto a = random_subset(p5.group, 900 + seed, 45);
        auto b = random_subset(p5.group, 950 + seed, 45);
        auto c = random_subset(p5.group, 990 + seed, 45);
        auto res = nikolov_pyber_check(a, b, c, 3);
        REQUIRE(res.product == 91125);
        REQUIRE(res.above_threshold);  // 91125 * 3 > 216000
        REQUIRE(res.abc_checked);
        REQUIRE(res.abc_is_group);
    }

    auto g = GroupSubset::full(p5.group);
    auto all = nikolov_pyber_check(g, g, g, 3);
    REQUIRE(all.above_threshold);
    REQUIRE(all.abc_is_group);

    auto small = GroupSubset::of(p5.group, {1});
    auto info = nikolov_pyber_check(small, small, small, 3);
    REQUIRE_FALSE(info.above_threshold);
    REQUIRE_FALSE(info.abc_checked);
}

TEST_CASE("spectrum is invariant under relabeling") {
    auto s4 = build_symmetric(4);
    auto g = s4.group;
    auto a = random_subset(g, 77, 6);
    auto spec = singular_spectrum(cayley_incidence(g, a));

    auto relabeled = conjugate_relabel(g, 5);
    relabeled->validate();
    // map the subset through the same automorphism
    GroupSubset a2(relabeled);
    for (int x : a.elements()) a2.add(g->mul(g->mul(5, x), g->inv(5)));
    auto spec2 = singular_spectrum(cayley_incidence(relabeled, a2));
    REQUIRE(spec.sigma.size() == spec2.sigma.size());
    for (std::size_t i = 0; i < spec.sigma.size(); ++i)
        REQUIRE(spec.sigma[i] == Catch::Approx(spec2.sigma[i]).margin(1e-7));
}
