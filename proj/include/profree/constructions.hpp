#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "profree/errors.hpp"
#include "profree/group.hpp"
#include "profree/productfree.hpp"
#include "profree/rng.hpp"

namespace profree {

using BigRational = boost::multiprecision::cpp_rational;

// A set of points of a permutation action (the target of a coset-style
// construction, or one side of the double-target construction).
struct TargetSet {
    Bitset points;
    int k = 0;

    static TargetSet of(const PermAction& act, const std::vector<int>& pts,
                        bool allow_base = true) {
        TargetSet t;
        t.points = Bitset(act.degree());
        for (int p : pts) {
            if (p < 0 || p >= act.degree()) throw value_error("point index out of range");
            if (!allow_base && p == 0)
                throw value_error("the base point may not be a target");
            if (!t.points.test(p)) {
                t.points.set(p);
                ++t.k;
            }
        }
        return t;
    }
};

// {g : g(p) = q}, the nontrivial-coset construction. Product-free of size
// exactly n/m for a transitive action.
inline GroupSubset babai_sos(const PermAction& act, int p, int q) {
    if (p == q) throw value_error("source and target point must differ");
    if (p < 0 || p >= act.degree() || q < 0 || q >= act.degree())
        throw value_error("point index out of range");
    GroupSubset s(act.group());
    int n = act.group()->order();
    for (int g = 0; g < n; ++g)
        if (act.apply(g, p) == q) s.add(g);
    return s;
}

// {g : g(0) in T and g(y) not in T for every y in T}. Product-free: for
// a, b in S the image (ab)(0) = a(b(0)) avoids T because b(0) lands in T.
inline GroupSubset kedlaya_set(const PermAction& act, const TargetSet& t) {
    if (t.k == 0) throw value_error("target set must be nonempty");
    if (t.points.test(0)) throw value_error("target set may not contain the base point");
    GroupSubset s(act.group());
    int n = act.group()->order();
    std::vector<int> targets = t.points.to_vector();
    for (int g = 0; g < n; ++g) {
        if (!t.points.test(act.apply(g, 0))) continue;
        bool ok = true;
        for (int y : targets)
            if (t.points.test(act.apply(g, y))) {
                ok = false;
                break;
            }
        if (ok) s.add(g);
    }
    return s;
}

struct KedlayaStats {
    GroupSubset best;
    std::int64_t best_size = 0;
    int best_trial = -1;
    double mean = 0.0;
    double stddev = 0.0;          // sample standard deviation of the sizes
    std::int64_t sum = 0;         // exact sum of sizes over all trials
    std::int64_t sum_squares = 0;
    int k = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

inline int kedlaya_default_k(int m) {
    int k = static_cast<int>(std::llround(std::sqrt(m / 3.0)));
    return std::max(1, k);
}

// Samples `trials` uniform k-subsets T of {1,...,m-1} and takes the
// construction above for each. Per-trial streams are derived from
// (seed, trial), so aggregate statistics do not depend on evaluation order.
inline KedlayaStats kedlaya_randomized(const PermAction& act, int k, int trials,
                                       std::uint64_t seed) {
    int m = act.degree();
    if (k < 1 || k > m - 1) throw value_error("k must lie in [1, m-1]");
    if (trials < 1) throw value_error("at least one trial is required");

    std::vector<int> pool(m - 1);
    for (int i = 0; i < m - 1; ++i) pool[i] = i + 1;

    KedlayaStats stats{GroupSubset(act.group())};
    stats.k = k;
    stats.trials = trials;
    stats.seed = seed;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
        auto pts = sample_k_subset(rng, k, pool);
        GroupSubset s = kedlaya_set(act, TargetSet::of(act, pts, false));
        std::int64_t size = s.card();
        stats.sum += size;
        stats.sum_squares += size * size;
        if (size > stats.best_size || stats.best_trial < 0) {
            stats.best_size = size;
            stats.best = std::move(s);
            stats.best_trial = t;
        }
    }
    stats.mean = static_cast<double>(stats.sum) / trials;
    if (trials > 1) {
        double var = (static_cast<double>(stats.sum_squares) -
                      static_cast<double>(stats.sum) * stats.mean) /
                     (trials - 1);
        stats.stddev = std::sqrt(std::max(0.0, var));
    }
    return stats;
}

// Average-size guarantee of the randomized construction: kn/m - k^3 n/(m-2)^2.
inline BigRational kedlaya_mean_bound(int k, std::int64_t n, int m) {
    using boost::multiprecision::cpp_int;
    return BigRational(cpp_int(k) * n, m) -
           BigRational(cpp_int(k) * k * k * n, cpp_int(m - 2) * (m - 2));
}

// Three sets with no solution of a*b = c across them.
struct TripleFamily {
    GroupSubset a, b, c;
    std::int64_t solutions = 0;
    std::int64_t product = 0;  // |A| * |B| * |C|
};

// Number of solutions of a*b = c with a in A, b in B, c in C.
inline std::int64_t count_triple_solutions(const GroupSubset& a, const GroupSubset& b,
                                           const GroupSubset& c) {
    detail::require_same_group(a, b);
    detail::require_same_group(a, c);
    const Group& g = *a.group();
    std::int64_t count = 0;
    for (int x : a.elements())
        for (int y : b.elements())
            if (c.contains(g.mul(x, y))) ++count;
    return count;
}

inline TripleFamily make_triple(GroupSubset a, GroupSubset b, GroupSubset c) {
    TripleFamily t{std::move(a), std::move(b), std::move(c)};
    t.solutions = count_triple_solutions(t.a, t.b, t.c);
    t.product = static_cast<std::int64_t>(t.a.card()) * t.b.card() * t.c.card();
    return t;
}

// A = {g : g(U) and V are disjoint}, B = {g : g(0) in U}, C = {g : g(0) in V}.
// Solution-free by construction: a*b moves the base point into g(U) which
// misses V.
inline TripleFamily triple_construction(const PermAction& act, const TargetSet& u,
                                        const TargetSet& v) {
    if (u.k == 0 || v.k == 0) throw value_error("point sets must be nonempty");
    const GroupPtr& gp = act.group();
    int n = gp->order();
    GroupSubset a(gp), b(gp), c(gp);
    std::vector<int> upts = u.points.to_vector();
    for (int g = 0; g < n; ++g) {
        bool disjoint = true;
        for (int p : upts)
            if (v.points.test(act.apply(g, p))) {
                disjoint = false;
                break;
            }
        if (disjoint) a.add(g);
        if (u.points.test(act.apply(g, 0))) b.add(g);
        if (v.points.test(act.apply(g, 0))) c.add(g);
    }
    return make_triple(std::move(a), std::move(b), std::move(c));
}

enum class TripleVariant { kInverseSwap, kRotate };

// (A,B,C) solution-free implies (B^{-1},A^{-1},C^{-1}) and (C,B^{-1},A) are
// too; the output re-verifies the count.
inline TripleFamily triple_transform(const TripleFamily& t, TripleVariant variant) {
    if (t.solutions != 0) throw value_error("input family must be solution-free");
    switch (variant) {
        case TripleVariant::kInverseSwap:
            return make_triple(set_inverse(t.b), set_inverse(t.a), set_inverse(t.c));
        case TripleVariant::kRotate:
            return make_triple(t.c, set_inverse(t.b), t.a);
    }
    throw value_error("unknown transform variant");
}

// Truncated inclusion-exclusion lower bound for the average of |A|:
//   sum_{i=0}^{2h-1} (-1)^i n u^(i) v^(i) / (i! m^(i))
// with x^(i) the falling factorial. Exact rational arithmetic.
inline BigRational avg_A_lower_bound(std::int64_t m, std::int64_t u, std::int64_t v,
                                     std::int64_t h, std::int64_t n) {
    if (h < 1) throw value_error("h must be at least 1");
    if (m < 1 || u < 0 || v < 0 || n < 0) throw value_error("parameters must be non-negative");
    if (2 * h - 1 > std::min(u, v))
        throw value_error("2h-1 may not exceed min(u, v)");
    if (2 * h - 1 > m) throw value_error("2h-1 may not exceed m");

    using boost::multiprecision::cpp_int;
    BigRational total = 0;
    cpp_int fall_u = 1, fall_v = 1, fall_m = 1, factorial = 1;
    for (std::int64_t i = 0; i <= 2 * h - 1; ++i) {
        if (i > 0) {
            fall_u *= (u - i + 1);
            fall_v *= (v - i + 1);
            fall_m *= (m - i + 1);
            factorial *= i;
        }
        BigRational term(cpp_int(n) * fall_u * fall_v, factorial * fall_m);
        if (i % 2 == 0)
            total += term;
        else
            total -= term;
    }
    return total;
}

} // namespace profree
