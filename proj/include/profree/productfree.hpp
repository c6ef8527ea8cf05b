#pragma once

#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "profree/errors.hpp"
#include "profree/group.hpp"

namespace profree {

// A witnessed failure of product-freeness: a*b = c with all three in the set.
struct Violation {
    int a, b, c;
};

// Lexicographically least violating pair (a, then b), or nullopt if the set
// is product-free.
inline std::optional<Violation> find_violation(const GroupSubset& s) {
    const Group& g = *s.group();
    auto v = s.elements();  // ascending
    for (int a : v)
        for (int b : v) {
            int c = g.mul(a, b);
            if (s.contains(c)) return Violation{a, b, c};
        }
    return std::nullopt;
}

inline bool is_product_free(const GroupSubset& s) { return !find_violation(s); }

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction reduced(std::int64_t num, std::int64_t den) {
        std::int64_t g = std::gcd(num, den);
        if (g == 0) return {0, 1};
        return {num / g, den / g};
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct AlphaResult {
    int alpha = 0;
    GroupSubset witness;
    Fraction beta;
    std::uint64_t nodes = 0;
    bool exact = false;
};

namespace detail {

// Branch-and-bound for a maximum product-free subset. Elements are explored
// in order of decreasing conflict degree (participation count in triples
// a*b = c over the identity-free universe); the bound is |current| +
// |candidates|. Candidates are pruned incrementally: adding x kills exactly
// the y whose join with the current set creates a violation, and violations
// only accumulate along a branch.
class AlphaSearch {
public:
    explicit AlphaSearch(GroupPtr g) : g_(std::move(g)), n_(g_->order()) {
        // conflict degrees over the universe {1,...,n-1}
        std::vector<std::int64_t> deg(n_, 0);
        for (int a = 1; a < n_; ++a)
            for (int b = 1; b < n_; ++b) {
                int c = g_->mul(a, b);
                if (c == 0) continue;
                ++deg[a];
                ++deg[b];
                ++deg[c];
            }
        order_.reserve(n_ - 1);
        for (int x = 1; x < n_; ++x) order_.push_back(x);
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            if (deg[a] != deg[b]) return deg[a] > deg[b];
            return a < b;
        });
    }

    AlphaResult run(std::chrono::milliseconds budget) {
        deadline_ = std::chrono::steady_clock::now() + budget;
        aborted_ = false;
        nodes_ = 0;
        best_ = 0;
        best_set_ = Bitset(n_);

        Bitset cur(n_);
        Bitset cand(static_cast<int>(order_.size()));
        for (std::size_t r = 0; r < order_.size(); ++r) cand.set(static_cast<int>(r));
        descend(cur, cand, cand.count(), 0, 0);

        AlphaResult res{best_, GroupSubset(g_, best_set_),
                        Fraction::reduced(best_, n_), nodes_, !aborted_};
        if (res.exact && best_ > 0) {
            Bitset lex = lex_least_witness();
            if (!aborted_) res.witness = GroupSubset(g_, lex);
            res.nodes = nodes_;
        }
        return res;
    }

private:
    bool out_of_time() {
        if (aborted_) return true;
        if ((nodes_ & 1023) == 0 &&
            std::chrono::steady_clock::now() >= deadline_) {
            aborted_ = true;
        }
        return aborted_;
    }

    // Kills candidate y (element id) if cur + {x} + {y} gains a violation
    // through x. cur already contains x.
    bool killed_by(const Bitset& cur, int x, int y) const {
        const Group& g = *g_;
        if (cur.test(g.mul(y, x)) || cur.test(g.mul(x, y))) return true;
        if (g.mul(y, y) == x) return true;
        if (cur.test(g.mul(g.inv(y), x))) return true;   // y * a = x
        if (cur.test(g.mul(x, g.inv(y)))) return true;   // a * y = x
        if (cur.test(g.mul(g.inv(x), y))) return true;   // x * a = y
        if (cur.test(g.mul(y, g.inv(x)))) return true;   // a * x = y
        return false;
    }

    // Maximization search; target == 0. With target > 0 it becomes a decision
    // search that stops as soon as a product-free set of that size exists.
    bool descend(Bitset& cur, const Bitset& cand, int cand_count, int size, int target) {
        ++nodes_;
        if (out_of_time()) return false;
        if (target > 0) {
            if (size >= target) return true;
            if (size + cand_count < target) return false;
        } else {
            if (size + cand_count <= best_) return false;
        }
        int r = cand.find_first();
        if (r < 0) return false;
        int x = order_[r];

        // include x
        Bitset next_cand(cand);
        next_cand.reset(r);
        cur.set(x);
        int next_count = 0;
        {
            Bitset filtered(next_cand.size());
            next_cand.for_each([&](int rr) {
                if (!killed_by(cur, x, order_[rr])) {
                    filtered.set(rr);
                    ++next_count;
                }
            });
            next_cand = std::move(filtered);
        }
        if (target == 0 && size + 1 > best_) {
            best_ = size + 1;
            best_set_ = cur;
        }
        if (descend(cur, next_cand, next_count, size + 1, target)) {
            cur.reset(x);
            return true;
        }
        cur.reset(x);

        // exclude x
        Bitset rest(cand);
        rest.reset(r);
        return descend(cur, rest, cand_count - 1, size, target);
    }

    // Greedy lexicographic reconstruction: repeatedly commit the smallest
    // element index that still completes to a maximum product-free set.
    Bitset lex_least_witness() {
        Bitset fixed(n_);
        std::vector<int> chosen;
        int last = 0;
        while (static_cast<int>(chosen.size()) < best_ && !aborted_) {
            bool advanced = false;
            for (int x = last + 1; x < n_; ++x) {
                if (!compatible(fixed, x)) continue;
                fixed.set(x);
                if (completes(fixed, x, static_cast<int>(chosen.size()) + 1)) {
                    chosen.push_back(x);
                    last = x;
                    advanced = true;
                    break;
                }
                fixed.reset(x);
                if (aborted_) break;
            }
            if (!advanced) break;
        }
        if (static_cast<int>(chosen.size()) == best_) return fixed;
        return best_set_;  // budget ran out mid-reconstruction
    }

    bool compatible(const Bitset& cur, int x) const {
        const Group& g = *g_;
        if (g.mul(x, x) == x) return false;  // only the identity
        Bitset join(cur);
        join.set(x);
        bool ok = true;
        join.for_each([&](int a) {
            if (!ok) return;
            join.for_each([&](int b) {
                if (!ok) return;
                if (join.test(g.mul(a, b))) ok = false;
            });
        });
        return ok;
    }

    // Is there a product-free superset of `fixed` of size best_ whose extra
    // elements all have index > min_x?
    bool completes(const Bitset& fixed, int min_x, int have) {
        std::vector<int> pool;
        for (int y = min_x + 1; y < n_; ++y)
            if (compatible(fixed, y)) pool.push_back(y);
        // reuse the heuristic order among the pool
        std::vector<int> ordered;
        ordered.reserve(pool.size());
        for (int x : order_)
            if (std::find(pool.begin(), pool.end(), x) != pool.end()) ordered.push_back(x);

        std::vector<int> saved_order = std::move(order_);
        order_ = std::move(ordered);
        Bitset cand(static_cast<int>(order_.size()));
        for (std::size_t r = 0; r < order_.size(); ++r) cand.set(static_cast<int>(r));
        Bitset cur(fixed);
        bool ok = descend(cur, cand, cand.count(), have, best_);
        order_ = std::move(saved_order);
        return ok;
    }

    GroupPtr g_;
    int n_;
    std::vector<int> order_;
    std::chrono::steady_clock::time_point deadline_;
    bool aborted_ = false;
    std::uint64_t nodes_ = 0;
    int best_ = 0;
    Bitset best_set_;
};

} // namespace detail

// Exact maximum product-free subset by branch and bound. On budget
// exhaustion the best set found so far is returned with exact = false; it is
// still a valid lower-bound witness. Ties among maximum sets are broken
// toward the lexicographically least witness.
inline AlphaResult alpha_exact(const GroupPtr& g,
                               std::chrono::milliseconds budget =
                                   std::chrono::milliseconds(60000)) {
    detail::AlphaSearch search(g);
    return search.run(budget);
}

// Exact alpha of a finite abelian group given by its invariant factors
// (each dividing the next): the three-case closed formula. Every case
// divides exactly; inexact division reports an internal error.
inline std::int64_t green_ruzsa_alpha(const std::vector<std::int64_t>& invariant_factors) {
    if (invariant_factors.empty())
        throw value_error("invariant factor list must not be empty");
    std::int64_t n = 1;
    for (std::size_t i = 0; i < invariant_factors.size(); ++i) {
        std::int64_t d = invariant_factors[i];
        if (d < 1) throw value_error("invariant factors must be positive");
        if (i + 1 < invariant_factors.size() && invariant_factors[i + 1] % d != 0)
            throw value_error("each invariant factor must divide the next");
        // keep n * (p+1) within 64 bits for the case (a) arithmetic below
        if (n > (std::int64_t(1) << 31) / d) throw cap_error("group order overflows");
        n *= d;
    }

    // least prime p = 2 (mod 3) dividing n
    std::int64_t least_p = 0;
    {
        std::int64_t rem = n;
        for (std::int64_t p = 2; p * p <= rem; ++p) {
            if (rem % p != 0) continue;
            while (rem % p == 0) rem /= p;
            if (p % 3 == 2) {
                least_p = p;
                break;
            }
        }
        if (least_p == 0 && rem > 1 && rem % 3 == 2) least_p = rem;
    }

    if (least_p != 0) {
        // alpha = n/3 + n/(3p)
        std::int64_t num = n * (least_p + 1);
        if (num % (3 * least_p) != 0)
            throw internal_error("case (a) of the abelian formula is not integral");
        return num / (3 * least_p);
    }
    if (n % 3 == 0) return n / 3;
    std::int64_t m = invariant_factors.back();  // the exponent
    std::int64_t num = n * (m - 1);
    if (num % (3 * m) != 0)
        throw internal_error("case (c) of the abelian formula is not integral");
    return num / (3 * m);
}

// Preimage of a product-free subset of the quotient; always product-free, of
// size (subset size) * |N|.
inline GroupSubset lift_from_quotient(const QuotientResult& quot,
                                      const GroupSubset& s_quot) {
    if (s_quot.group().get() != quot.group.get())
        throw value_error("subset does not live in the given quotient");
    if (find_violation(s_quot))
        throw value_error("subset is not product-free in the quotient");
    GroupSubset lifted(quot.source);
    int n = quot.source->order();
    for (int x = 0; x < n; ++x)
        if (s_quot.contains(quot.projection[x])) lifted.add(x);
    int nsub = n / quot.group->order();
    if (lifted.card() != s_quot.card() * nsub)
        throw internal_error("lifted set has unexpected size");
    return lifted;
}

} // namespace profree
