#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "profree/constructions.hpp"
#include "profree/productfree.hpp"

using namespace profree;
using boost::multiprecision::cpp_int;

namespace {
GeneratedGroup s3_nat() { return build_from_generators({{1, 0, 2}, {1, 2, 0}}); }
} // namespace

TEST_CASE("coset construction") {
    auto s3 = s3_nat();
    auto s = babai_sos(s3.action, 0, 1);
    REQUIRE(s.card() == 2);  // n/m = 6/3
    REQUIRE(is_product_free(s));

    auto p7 = build_psl2(7);
    for (auto [p, q] : {std::pair{0, 1}, std::pair{3, 7}, std::pair{7, 0}}) {
        auto f = babai_sos(p7.action, p, q);
        REQUIRE(f.card() == 21);  // 168/8
        REQUIRE(is_product_free(f));
    }

    auto z5 = build_cyclic(5);
    auto reg = regular_action(z5);
    auto singleton = babai_sos(reg, 0, 1);
    REQUIRE(singleton.elements() == std::vector<int>{1});
    REQUIRE(is_product_free(singleton));

    REQUIRE_THROWS_AS(babai_sos(reg, 2, 2), value_error);
}

TEST_CASE("fiber size is exactly n/m for transitive actions") {
    std::vector<PermAction> actions;
    actions.push_back(s3_nat().action);
    actions.push_back(build_symmetric(4).action);
    actions.push_back(build_dihedral(12).action);
    actions.push_back(build_psl2(5).action);
    actions.push_back(regular_action(build_cyclic(8)));
    for (const auto& act : actions) {
        REQUIRE(act.is_transitive());
        int n = act.group()->order(), m = act.degree();
        auto s = babai_sos(act, 0, m - 1);
        REQUIRE(s.card() * m == n);
        REQUIRE(is_product_free(s));
    }
}

TEST_CASE("target-set construction") {
    auto p13 = build_psl2(13);
    auto t = TargetSet::of(p13.action, {1, 2}, false);
    auto s = kedlaya_set(p13.action, t);
    REQUIRE(s.card() > 0);
    REQUIRE(is_product_free(s));

    // small degenerate case still passes the checker
    auto s3 = s3_nat();
    auto tiny = kedlaya_set(s3.action, TargetSet::of(s3.action, {1, 2}, false));
    REQUIRE(is_product_free(tiny));

    // k = 1 reduces to the coset construction filtered by g(t) != t
    auto p7 = build_psl2(7);
    auto one = kedlaya_set(p7.action, TargetSet::of(p7.action, {3}, false));
    auto coset = babai_sos(p7.action, 0, 3);
    for (int g : one.elements()) {
        REQUIRE(coset.contains(g));
        REQUIRE(p7.action.apply(g, 3) != 3);
    }
    for (int g : coset.elements())
        if (!one.contains(g)) REQUIRE(p7.action.apply(g, 3) == 3);

    REQUIRE_THROWS_AS(kedlaya_set(p7.action, TargetSet::of(p7.action, {}, false)),
                      value_error);
    REQUIRE_THROWS_AS(TargetSet::of(p7.action, {0, 1}, false), value_error);
}

TEST_CASE("randomized target sampling") {
    REQUIRE(kedlaya_default_k(14) == 2);
    REQUIRE(kedlaya_default_k(8) == 2);
    REQUIRE(kedlaya_default_k(3) == 1);

    auto p13 = build_psl2(13);
    auto stats = kedlaya_randomized(p13.action, 2, 2000, 42);
    REQUIRE(stats.trials == 2000);
    REQUIRE(is_product_free(stats.best));
    REQUIRE(stats.best_size == stats.best.card());

    // the guaranteed average: kn/m - k^3 n/(m-2)^2 = 286/3 for k=2
    auto bound = kedlaya_mean_bound(2, 1092, 14);
    REQUIRE(bound == BigRational(cpp_int(286), cpp_int(3)));
    double se = stats.stddev / std::sqrt(static_cast<double>(stats.trials));
    REQUIRE(stats.mean >= static_cast<double>(bound) - 3 * se);

    // reproducibility
    auto again = kedlaya_randomized(p13.action, 2, 2000, 42);
    REQUIRE(again.sum == stats.sum);
    REQUIRE(again.best_trial == stats.best_trial);
    REQUIRE(again.best == stats.best);

    auto single = kedlaya_randomized(p13.action, 2, 1, 7);
    auto single2 = kedlaya_randomized(p13.action, 2, 1, 7);
    REQUIRE(single.best == single2.best);

    REQUIRE_THROWS_AS(kedlaya_randomized(p13.action, 0, 10, 1), value_error);
    REQUIRE_THROWS_AS(kedlaya_randomized(p13.action, 14, 10, 1), value_error);
}

TEST_CASE("sampled mean meets the guaranteed average across the family") {
    for (int q : {7, 11, 13}) {
        auto built = build_psl2(q);
        int m = built.action.degree();
        int k = kedlaya_default_k(m);
        auto stats = kedlaya_randomized(built.action, k, 1500, 314159 + q);
        double bound =
            static_cast<double>(kedlaya_mean_bound(k, built.group->order(), m));
        double se = stats.stddev / std::sqrt(static_cast<double>(stats.trials));
        INFO("q=" << q << " k=" << k << " mean=" << stats.mean << " bound=" << bound);
        REQUIRE(stats.mean >= bound - 3 * se);
        REQUIRE(is_product_free(stats.best));
    }
}

TEST_CASE("triple construction") {
    auto p7 = build_psl2(7);
    auto u = TargetSet::of(p7.action, {0, 1});
    auto v = TargetSet::of(p7.action, {0, 1});
    auto t = triple_construction(p7.action, u, v);
    REQUIRE(t.solutions == 0);
    REQUIRE(t.b == t.c);  // U = V forces B = C
    REQUIRE(t.b.card() == 2 * 168 / 8);
    REQUIRE(t.c.card() == 2 * 168 / 8);
    // |A| >= n (1 - uv/m)
    REQUIRE(t.a.card() >= 168 * (8 - 4) / 8);
    // product >= (n^3/m)(uv/m)(1 - uv/m)
    std::int64_t n3 = 168ll * 168 * 168;
    REQUIRE(t.product >= n3 / 8 / 2 / 2);

    // the zero-solution invariant matches the set-product route
    auto ab = set_product(t.a, t.b);
    REQUIRE_FALSE((ab.bits() & t.c.bits()).any());

    // V = all points empties A
    auto all = TargetSet::of(p7.action, [&] {
        std::vector<int> pts(8);
        std::iota(pts.begin(), pts.end(), 0);
        return pts;
    }());
    auto degenerate = triple_construction(p7.action, u, all);
    REQUIRE(degenerate.a.card() == 0);
    REQUIRE(degenerate.product == 0);
}

TEST_CASE("triple transforms") {
    auto p5 = build_psl2(5);
    auto u = TargetSet::of(p5.action, {1, 2});
    auto v = TargetSet::of(p5.action, {2, 3});
    auto t = triple_construction(p5.action, u, v);
    REQUIRE(t.solutions == 0);

    auto inv = triple_transform(t, TripleVariant::kInverseSwap);
    REQUIRE(inv.solutions == 0);
    REQUIRE(inv.product == t.product);
    auto rot = triple_transform(t, TripleVariant::kRotate);
    REQUIRE(rot.solutions == 0);
    REQUIRE(rot.product == t.product);

    // composing variants keeps the size product
    auto chained = triple_transform(
        triple_transform(inv, TripleVariant::kInverseSwap), TripleVariant::kRotate);
    chained = triple_transform(chained, TripleVariant::kRotate);
    chained = triple_transform(chained, TripleVariant::kRotate);
    REQUIRE(chained.solutions == 0);
    REQUIRE(chained.product == t.product);

    // A = B^{-1} via U = V followed by a rotation
    auto sym = triple_construction(p5.action, u, u);
    auto rotated = triple_transform(sym, TripleVariant::kRotate);
    REQUIRE(rotated.a == set_inverse(rotated.b));
    REQUIRE(rotated.solutions == 0);
}

TEST_CASE("inclusion-exclusion average bound") {
    // h = 1 is the plain union bound n(1 - uv/m)
    auto got = avg_A_lower_bound(100, 5, 4, 1, 7);
    BigRational expect = BigRational(7) - BigRational(cpp_int(7) * 5 * 4, cpp_int(100));
    REQUIRE(got == expect);

    // at u = v = sqrt(m) the normalized value approaches 1/e
    auto big = avg_A_lower_bound(10000, 100, 100, 6, 1);
    double val = static_cast<double>(big);
    REQUIRE(std::abs(val - std::exp(-1.0)) < 0.01);

    // odd-cutoff partial sums increase toward the limit
    for (std::int64_t h = 1; h <= 3; ++h) {
        auto lo = avg_A_lower_bound(100, 10, 10, h, 1);
        auto hi = avg_A_lower_bound(100, 10, 10, h + 1, 1);
        REQUIRE(lo <= hi);
    }

    REQUIRE_THROWS_AS(avg_A_lower_bound(100, 3, 3, 3, 1), value_error);  // 2h-1 > min(u,v)
    REQUIRE_THROWS_AS(avg_A_lower_bound(3, 10, 10, 3, 1), value_error);  // 2h-1 > m
    REQUIRE_THROWS_AS(avg_A_lower_bound(100, 10, 10, 0, 1), value_error);
}

TEST_CASE("point set validation") {
    auto s3 = s3_nat();
    REQUIRE_THROWS_AS(TargetSet::of(s3.action, {3}), value_error);
    REQUIRE_THROWS_AS(TargetSet::of(s3.action, {-1}), value_error);
    auto dup = TargetSet::of(s3.action, {1, 1, 2});
    REQUIRE(dup.k == 2);
}
