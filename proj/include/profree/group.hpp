#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "profree/bitset.hpp"
#include "profree/errors.hpp"
#include "profree/rng.hpp"

namespace profree {

class Group;
using GroupPtr = std::shared_ptr<const Group>;

// Construction family of a group. Carries values that are known in closed
// form for the family, e.g. the projective-line degree q+1 of PSL2(q).
struct GroupFamily {
    enum Kind {
        kNone,
        kCyclic,       // param = n
        kDihedral,     // param = order
        kQuaternion,   // order 8
        kSymmetric,    // param = k
        kAlternating,  // param = k
        kPsl2          // param = q
    };
    Kind kind = kNone;
    int param = 0;
};

// A finite group of order n as a dense Cayley table. Element 0 is always the
// identity. Immutable after construction; safe to share across threads.
class Group {
public:
    static constexpr int kMaxOrder = 4096;

    Group(int n, std::vector<std::int32_t> table, std::string label,
          GroupFamily family = {})
        : n_(n), mul_(std::move(table)), label_(std::move(label)), family_(family) {
        if (n_ < 1) throw value_error("group order must be positive");
        if (n_ > kMaxOrder)
            throw cap_error("group order " + std::to_string(n_) +
                            " exceeds the maximum " + std::to_string(kMaxOrder));
        if (mul_.size() != static_cast<std::size_t>(n_) * n_)
            throw value_error("multiplication table has wrong size");
        for (std::int32_t v : mul_)
            if (v < 0 || v >= n_)
                throw value_error("multiplication table entry out of range");
        for (int x = 0; x < n_; ++x)
            if (mul(0, x) != x || mul(x, 0) != x)
                throw value_error("element 0 is not the identity");
        inv_.assign(n_, -1);
        for (int x = 0; x < n_; ++x) {
            for (int y = 0; y < n_; ++y) {
                if (mul(x, y) == 0) {
                    if (mul(y, x) != 0)
                        throw value_error("one-sided inverse found; table is not a group");
                    inv_[x] = y;
                    break;
                }
            }
            if (inv_[x] < 0) throw value_error("element without inverse");
        }
        abelian_ = true;
        for (int a = 1; a < n_ && abelian_; ++a)
            for (int b = a + 1; b < n_; ++b)
                if (mul(a, b) != mul(b, a)) {
                    abelian_ = false;
                    break;
                }
    }

    int order() const { return n_; }
    int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a) * n_ + b]; }
    int inv(int a) const { return inv_[a]; }
    const std::string& label() const { return label_; }
    const GroupFamily& family() const { return family_; }
    bool is_abelian() const { return abelian_; }

    int element_order(int x) const {
        int y = x, ord = 1;
        while (y != 0) {
            y = mul(y, x);
            ++ord;
        }
        return ord;
    }

    // lcm of all element orders. Divides the group order.
    int exponent() const {
        std::int64_t e = 1;
        for (int x = 0; x < n_; ++x) {
            std::int64_t o = element_order(x);
            e = std::lcm(e, o);
        }
        return static_cast<int>(e);
    }

    int commutator(int a, int b) const {
        return mul(mul(mul(a, b), inv_[a]), inv_[b]);
    }

    // Checks the Cayley-table invariants, throwing on the first violation.
    // Associativity is exhaustive for n <= exhaustive_limit and sampled with
    // `samples` seeded random triples above it.
    void validate(int exhaustive_limit = 512, std::uint64_t samples = 1000000) const {
        std::vector<char> seen(n_);
        for (int a = 0; a < n_; ++a) {
            std::fill(seen.begin(), seen.end(), 0);
            for (int b = 0; b < n_; ++b) seen[mul(a, b)] = 1;
            if (std::find(seen.begin(), seen.end(), 0) != seen.end())
                throw internal_error("row " + std::to_string(a) + " is not a permutation");
            std::fill(seen.begin(), seen.end(), 0);
            for (int b = 0; b < n_; ++b) seen[mul(b, a)] = 1;
            if (std::find(seen.begin(), seen.end(), 0) != seen.end())
                throw internal_error("column " + std::to_string(a) + " is not a permutation");
        }
        for (int x = 0; x < n_; ++x)
            if (mul(x, inv_[x]) != 0 || mul(inv_[x], x) != 0)
                throw internal_error("inverse table broken at " + std::to_string(x));
        if (n_ <= exhaustive_limit) {
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b)
                    for (int c = 0; c < n_; ++c)
                        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                            throw internal_error("associativity fails");
        } else {
            Rng rng(0x70726f66726565ull ^ static_cast<std::uint64_t>(n_));
            for (std::uint64_t i = 0; i < samples; ++i) {
                int a = rng.int_below(n_), b = rng.int_below(n_), c = rng.int_below(n_);
                if (mul(mul(a, b), c) != mul(a, mul(b, c)))
                    throw internal_error("associativity fails");
            }
        }
    }

private:
    int n_;
    std::vector<std::int32_t> mul_;
    std::vector<std::int32_t> inv_;
    std::string label_;
    GroupFamily family_;
    bool abelian_;
};

// A permutation action of a group on points {0,...,m-1}. The convention is a
// left action: apply(mul(g,h), p) == apply(g, apply(h, p)).
class PermAction {
public:
    PermAction(GroupPtr group, int m, std::vector<std::int32_t> act)
        : group_(std::move(group)), m_(m), act_(std::move(act)) {
        if (m_ < 1) throw value_error("action degree must be positive");
        if (act_.size() != static_cast<std::size_t>(group_->order()) * m_)
            throw value_error("action table has wrong size");
    }

    const GroupPtr& group() const { return group_; }
    int degree() const { return m_; }
    int apply(int g, int p) const { return act_[static_cast<std::size_t>(g) * m_ + p]; }

    bool is_transitive() const {
        const Group& g = *group_;
        Bitset orbit(m_);
        std::vector<int> stack{0};
        orbit.set(0);
        int found = 1;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            for (int x = 0; x < g.order(); ++x) {
                int q = apply(x, p);
                if (!orbit.test(q)) {
                    orbit.set(q);
                    ++found;
                    stack.push_back(q);
                }
            }
        }
        return found == m_;
    }

    // Identity fixes every point, each element acts bijectively, and the
    // homomorphism identity holds (exhaustive while n^2*m is small, sampled
    // above that).
    void validate(std::uint64_t work_limit = 200000000ull) const {
        const Group& g = *group_;
        int n = g.order();
        for (int p = 0; p < m_; ++p)
            if (apply(0, p) != p) throw internal_error("identity moves a point");
        std::vector<char> seen(m_);
        for (int x = 0; x < n; ++x) {
            std::fill(seen.begin(), seen.end(), 0);
            for (int p = 0; p < m_; ++p) seen[apply(x, p)] = 1;
            if (std::find(seen.begin(), seen.end(), 0) != seen.end())
                throw internal_error("element does not act bijectively");
        }
        std::uint64_t full = static_cast<std::uint64_t>(n) * n * m_;
        if (full <= work_limit) {
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y) {
                    int xy = g.mul(x, y);
                    for (int p = 0; p < m_; ++p)
                        if (apply(xy, p) != apply(x, apply(y, p)))
                            throw internal_error("action is not a homomorphism");
                }
        } else {
            Rng rng(0x616374696f6eull);
            for (std::uint64_t i = 0; i < work_limit / m_; ++i) {
                int x = rng.int_below(n), y = rng.int_below(n);
                int xy = g.mul(x, y);
                for (int p = 0; p < m_; ++p)
                    if (apply(xy, p) != apply(x, apply(y, p)))
                        throw internal_error("action is not a homomorphism");
            }
        }
    }

private:
    GroupPtr group_;
    int m_;
    std::vector<std::int32_t> act_;
};

// A subset of group elements as a bitset with a cached cardinality.
class GroupSubset {
public:
    explicit GroupSubset(GroupPtr group)
        : group_(std::move(group)), bits_(group_->order()), card_(0) {}

    GroupSubset(GroupPtr group, Bitset bits)
        : group_(std::move(group)), bits_(std::move(bits)) {
        if (bits_.size() != group_->order())
            throw value_error("bitset length does not match group order");
        card_ = bits_.count();
    }

    static GroupSubset of(GroupPtr group, const std::vector<int>& elements) {
        GroupSubset s(std::move(group));
        for (int x : elements) {
            if (x < 0 || x >= s.order()) throw value_error("element index out of range");
            s.add(x);
        }
        return s;
    }

    static GroupSubset full(GroupPtr group) {
        GroupSubset s(std::move(group));
        for (int x = 0; x < s.order(); ++x) s.bits_.set(x);
        s.card_ = s.order();
        return s;
    }

    const GroupPtr& group() const { return group_; }
    int order() const { return group_->order(); }
    int card() const { return card_; }
    bool empty() const { return card_ == 0; }
    bool contains(int x) const { return bits_.test(x); }
    const Bitset& bits() const { return bits_; }

    void add(int x) {
        if (!bits_.test(x)) {
            bits_.set(x);
            ++card_;
        }
    }
    void remove(int x) {
        if (bits_.test(x)) {
            bits_.reset(x);
            --card_;
        }
    }

    GroupSubset complement() const { return GroupSubset(group_, bits_.complement()); }
    std::vector<int> elements() const { return bits_.to_vector(); }

    bool operator==(const GroupSubset& o) const {
        return group_.get() == o.group_.get() && bits_ == o.bits_;
    }

private:
    GroupPtr group_;
    Bitset bits_;
    int card_;
};

namespace detail {
inline void require_same_group(const GroupSubset& a, const GroupSubset& b) {
    if (a.group().get() != b.group().get())
        throw value_error("subsets belong to different groups");
}
} // namespace detail

// AB = {ab : a in A, b in B}.
inline GroupSubset set_product(const GroupSubset& a, const GroupSubset& b) {
    detail::require_same_group(a, b);
    const Group& g = *a.group();
    GroupSubset r(a.group());
    auto av = a.elements();
    auto bv = b.elements();
    for (int x : av)
        for (int y : bv) r.add(g.mul(x, y));
    return r;
}

// A^{-1} = {a^{-1} : a in A}.
inline GroupSubset set_inverse(const GroupSubset& a) {
    const Group& g = *a.group();
    GroupSubset r(a.group());
    a.bits().for_each([&](int x) { r.add(g.inv(x)); });
    return r;
}

// ---------------------------------------------------------------------------
// constructors

inline GroupPtr build_cyclic(int n) {
    if (n < 1) throw value_error("cyclic group order must be positive");
    if (n > Group::kMaxOrder) throw cap_error("cyclic group order exceeds the maximum");
    std::vector<std::int32_t> mul(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) mul[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
    return std::make_shared<Group>(n, std::move(mul), "Z" + std::to_string(n),
                                   GroupFamily{GroupFamily::kCyclic, n});
}

// Componentwise product; element (a,b) is encoded as a*|h| + b.
inline GroupPtr direct_product(const GroupPtr& g, const GroupPtr& h) {
    std::int64_t n = static_cast<std::int64_t>(g->order()) * h->order();
    if (n > Group::kMaxOrder)
        throw cap_error("direct product order " + std::to_string(n) +
                        " exceeds the maximum " + std::to_string(Group::kMaxOrder));
    int ng = g->order(), nh = h->order(), nn = static_cast<int>(n);
    std::vector<std::int32_t> mul(static_cast<std::size_t>(nn) * nn);
    for (int a1 = 0; a1 < ng; ++a1)
        for (int b1 = 0; b1 < nh; ++b1)
            for (int a2 = 0; a2 < ng; ++a2)
                for (int b2 = 0; b2 < nh; ++b2) {
                    int x = a1 * nh + b1, y = a2 * nh + b2;
                    mul[static_cast<std::size_t>(x) * nn + y] =
                        g->mul(a1, a2) * nh + h->mul(b1, b2);
                }
    return std::make_shared<Group>(nn, std::move(mul), g->label() + "x" + h->label());
}

struct GeneratedGroup {
    GroupPtr group;
    PermAction action;
    bool transitive;
};

// Breadth-first closure of a permutation group given by generators on
// {0,...,m-1}. Element 0 is the identity. The returned action is the defining
// permutation action.
inline GeneratedGroup build_from_generators(std::vector<std::vector<int>> gens,
                                            int m = -1,
                                            std::string label = {},
                                            int max_order = Group::kMaxOrder,
                                            GroupFamily family = {}) {
    if (m < 0) {
        if (gens.empty())
            throw value_error("cannot infer the point count from an empty generator list");
        m = static_cast<int>(gens[0].size());
    }
    if (m < 1) throw value_error("point count must be positive");
    for (const auto& p : gens) {
        if (static_cast<int>(p.size()) != m)
            throw value_error("generators act on different point counts");
        std::vector<char> seen(m, 0);
        for (int v : p) {
            if (v < 0 || v >= m || seen[v])
                throw value_error("generator is not a permutation");
            seen[v] = 1;
        }
    }

    auto key = [](const std::vector<int>& p) {
        std::string s;
        s.reserve(p.size() * 2);
        for (int v : p) {
            s.push_back(static_cast<char>(v & 0xff));
            s.push_back(static_cast<char>((v >> 8) & 0xff));
        }
        return s;
    };

    std::vector<std::vector<int>> elems;
    std::unordered_map<std::string, int> index;
    std::vector<int> parent, via;  // elems[i] = gens[via[i]] o elems[parent[i]]

    std::vector<int> id(m);
    std::iota(id.begin(), id.end(), 0);
    elems.push_back(id);
    index.emplace(key(id), 0);
    parent.push_back(-1);
    via.push_back(-1);

    std::vector<int> scratch(m);
    for (std::size_t head = 0; head < elems.size(); ++head) {
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            for (int p = 0; p < m; ++p) scratch[p] = gens[gi][elems[head][p]];
            auto [it, inserted] = index.emplace(key(scratch), static_cast<int>(elems.size()));
            if (inserted) {
                if (static_cast<int>(elems.size()) >= max_order)
                    throw cap_error("generated group exceeds the order cap " +
                                    std::to_string(max_order));
                elems.push_back(scratch);
                parent.push_back(static_cast<int>(head));
                via.push_back(static_cast<int>(gi));
            }
        }
    }

    int n = static_cast<int>(elems.size());

    // left_by_gen[gi][x] = index of gens[gi] o elems[x]; fills the whole
    // multiplication table in O(n^2) array lookups via the BFS parents.
    std::vector<std::vector<std::int32_t>> left_by_gen(gens.size(),
                                                       std::vector<std::int32_t>(n));
    for (std::size_t gi = 0; gi < gens.size(); ++gi)
        for (int x = 0; x < n; ++x) {
            for (int p = 0; p < m; ++p) scratch[p] = gens[gi][elems[x][p]];
            left_by_gen[gi][x] = index.at(key(scratch));
        }

    std::vector<std::int32_t> mul(static_cast<std::size_t>(n) * n);
    for (int h = 0; h < n; ++h) mul[h] = h;  // identity row
    for (int x = 1; x < n; ++x) {
        const std::int32_t* prow = &mul[static_cast<std::size_t>(parent[x]) * n];
        std::int32_t* row = &mul[static_cast<std::size_t>(x) * n];
        const auto& lg = left_by_gen[via[x]];
        for (int h = 0; h < n; ++h) row[h] = lg[prow[h]];
    }

    if (label.empty())
        label = "perm" + std::to_string(m) + ":order" + std::to_string(n);
    auto group = std::make_shared<Group>(n, std::move(mul), std::move(label), family);

    std::vector<std::int32_t> act(static_cast<std::size_t>(n) * m);
    for (int x = 0; x < n; ++x)
        for (int p = 0; p < m; ++p) act[static_cast<std::size_t>(x) * m + p] = elems[x][p];
    PermAction action(group, m, std::move(act));
    bool transitive = action.is_transitive();
    return GeneratedGroup{std::move(group), std::move(action), transitive};
}

// The left regular action (degree n).
inline PermAction regular_action(const GroupPtr& g) {
    int n = g->order();
    std::vector<std::int32_t> act(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int p = 0; p < n; ++p) act[static_cast<std::size_t>(x) * n + p] = g->mul(x, p);
    return PermAction(g, n, std::move(act));
}

// Dihedral group of the given (even) order acting on the vertices of the
// regular order/2-gon.
inline GeneratedGroup build_dihedral(int order) {
    if (order < 6 || order % 2 != 0)
        throw value_error("dihedral order must be an even number >= 6");
    int k = order / 2;
    std::vector<int> rot(k), refl(k);
    for (int p = 0; p < k; ++p) {
        rot[p] = (p + 1) % k;
        refl[p] = (k - p) % k;
    }
    auto built = build_from_generators({rot, refl}, k, "D" + std::to_string(order),
                                       Group::kMaxOrder,
                                       GroupFamily{GroupFamily::kDihedral, order});
    if (built.group->order() != order)
        throw internal_error("dihedral closure produced wrong order");
    return built;
}

// Quaternion group of order 8: elements 1,-1,i,-i,j,-j,k,-k in that order.
inline GroupPtr build_quaternion8() {
    // axis: 0 = scalar, 1 = i, 2 = j, 3 = k; pair products by the usual rules.
    auto axis_mul = [](int a, int b, int& sign) {
        if (a == 0) { sign = 1; return b; }
        if (b == 0) { sign = 1; return a; }
        if (a == b) { sign = -1; return 0; }
        // i*j=k, j*k=i, k*i=j; reversed order flips the sign
        static const int table[4][4] = {{0, 0, 0, 0}, {0, 0, 3, 2}, {0, 3, 0, 1}, {0, 2, 1, 0}};
        static const int signs[4][4] = {{0, 0, 0, 0}, {0, 0, 1, -1}, {0, -1, 0, 1}, {0, 1, -1, 0}};
        sign = signs[a][b];
        return table[a][b];
    };
    auto decode = [](int x, int& sign, int& axis) {
        sign = (x & 1) ? -1 : 1;
        axis = x >> 1;
    };
    auto encode = [](int sign, int axis) { return axis * 2 + (sign < 0 ? 1 : 0); };
    std::vector<std::int32_t> mul(64);
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            int sx, ax, sy, ay, sp;
            decode(x, sx, ax);
            decode(y, sy, ay);
            int az = axis_mul(ax, ay, sp);
            mul[static_cast<std::size_t>(x) * 8 + y] = encode(sx * sy * sp, az);
        }
    return std::make_shared<Group>(8, std::move(mul), "Q8",
                                   GroupFamily{GroupFamily::kQuaternion, 8});
}

// Symmetric group on k points with its natural action.
inline GeneratedGroup build_symmetric(int k) {
    if (k < 2) throw value_error("symmetric group needs k >= 2");
    std::vector<int> swap01(k), cycle(k);
    std::iota(swap01.begin(), swap01.end(), 0);
    std::swap(swap01[0], swap01[1]);
    for (int p = 0; p < k; ++p) cycle[p] = (p + 1) % k;
    auto built = build_from_generators({swap01, cycle}, k, "S" + std::to_string(k),
                                       Group::kMaxOrder,
                                       GroupFamily{GroupFamily::kSymmetric, k});
    std::int64_t expect = 1;
    for (int i = 2; i <= k; ++i) expect *= i;
    if (built.group->order() != expect)
        throw internal_error("symmetric group closure produced wrong order");
    return built;
}

// Alternating group on k points with its natural action.
inline GeneratedGroup build_alternating(int k) {
    if (k < 3) throw value_error("alternating group needs k >= 3");
    std::vector<std::vector<int>> gens;
    for (int i = 0; i + 2 < k; ++i) {
        std::vector<int> c(k);
        std::iota(c.begin(), c.end(), 0);
        c[i] = i + 1;
        c[i + 1] = i + 2;
        c[i + 2] = i;
        gens.push_back(std::move(c));
    }
    auto built = build_from_generators(gens, k, "A" + std::to_string(k),
                                       Group::kMaxOrder,
                                       GroupFamily{GroupFamily::kAlternating, k});
    std::int64_t expect = 1;
    for (int i = 2; i <= k; ++i) expect *= i;
    expect /= 2;
    if (built.group->order() != expect)
        throw internal_error("alternating group closure produced wrong order");
    return built;
}

namespace detail {
inline bool is_prime_small(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}
} // namespace detail

// PSL2(q) for an odd prime q, acting on the projective line. Points 0..q-1
// are the finite slopes, point q is infinity. Generated by x -> x+1 and
// x -> -1/x.
inline GeneratedGroup build_psl2(int q) {
    if (q < 5 || q % 2 == 0 || !detail::is_prime_small(q))
        throw value_error("PSL2 supports odd primes q >= 5");
    std::int64_t order = static_cast<std::int64_t>(q) * (q - 1) * (q + 1) / 2;
    if (order > Group::kMaxOrder)
        throw cap_error("PSL2(" + std::to_string(q) + ") has order " +
                        std::to_string(order) + ", above the maximum " +
                        std::to_string(Group::kMaxOrder));
    int m = q + 1, inf = q;
    std::vector<int> shift(m), flip(m);
    for (int x = 0; x < q; ++x) shift[x] = (x + 1) % q;
    shift[inf] = inf;
    // x -> -1/x
    std::vector<int> fieldinv(q, 0);
    for (int x = 1; x < q; ++x)
        for (int y = 1; y < q; ++y)
            if (x * y % q == 1) {
                fieldinv[x] = y;
                break;
            }
    flip[0] = inf;
    flip[inf] = 0;
    for (int x = 1; x < q; ++x) flip[x] = (q - fieldinv[x]) % q;

    auto built = build_from_generators({shift, flip}, m, "PSL2(" + std::to_string(q) + ")",
                                       Group::kMaxOrder, GroupFamily{GroupFamily::kPsl2, q});
    if (built.group->order() != order)
        throw internal_error("PSL2 closure produced wrong order");
    return built;
}

// ---------------------------------------------------------------------------
// subgroups and quotients

inline bool is_subgroup(const GroupSubset& s) {
    const Group& g = *s.group();
    if (!s.contains(0)) return false;
    auto v = s.elements();
    for (int a : v)
        for (int b : v)
            if (!s.contains(g.mul(a, b))) return false;
    return true;
}

// Assumes s is a subgroup.
inline bool is_normal(const GroupSubset& s) {
    const Group& g = *s.group();
    auto v = s.elements();
    for (int x = 0; x < g.order(); ++x)
        for (int h : v)
            if (!s.contains(g.mul(g.mul(x, h), g.inv(x)))) return false;
    return true;
}

// Subgroup generated by the given elements.
inline GroupSubset subgroup_closure(const GroupPtr& g, const std::vector<int>& gens) {
    GroupSubset s(g);
    s.add(0);
    std::vector<int> queue{0};
    for (int x : gens)
        if (!s.contains(x)) {
            s.add(x);
            queue.push_back(x);
        }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int x = queue[head];
        std::size_t limit = queue.size();
        for (std::size_t j = 0; j < limit; ++j) {
            int a = g->mul(x, queue[j]);
            if (!s.contains(a)) {
                s.add(a);
                queue.push_back(a);
            }
            int b = g->mul(queue[j], x);
            if (!s.contains(b)) {
                s.add(b);
                queue.push_back(b);
            }
        }
    }
    return s;
}

inline GroupSubset commutator_subgroup(const GroupPtr& g) {
    std::vector<int> comms;
    Bitset seen(g->order());
    for (int a = 0; a < g->order(); ++a)
        for (int b = a + 1; b < g->order(); ++b) {
            int c = g->commutator(a, b);
            if (!seen.test(c)) {
                seen.set(c);
                comms.push_back(c);
            }
        }
    return subgroup_closure(g, comms);
}

struct QuotientResult {
    GroupPtr source;
    GroupPtr group;                     // the quotient
    std::vector<std::int32_t> projection;  // length-n coset map, coset of e is 0
};

// Quotient by a normal subgroup. Reports non-subgroups and non-normal
// subgroups distinctly.
inline QuotientResult quotient(const GroupPtr& g, const GroupSubset& nsub) {
    if (nsub.group().get() != g.get())
        throw value_error("subgroup belongs to a different group");
    if (!is_subgroup(nsub)) throw not_a_subgroup_error("subset is not a subgroup");
    if (!is_normal(nsub)) throw not_normal_error("subgroup is not normal");

    int n = g->order();
    auto nelems = nsub.elements();
    std::vector<std::int32_t> proj(n, -1);
    std::vector<int> reps;
    for (int x = 0; x < n; ++x) {
        if (proj[x] >= 0) continue;
        int c = static_cast<int>(reps.size());
        reps.push_back(x);
        for (int h : nelems) proj[g->mul(x, h)] = c;
    }
    int k = static_cast<int>(reps.size());
    std::vector<std::int32_t> qmul(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            qmul[static_cast<std::size_t>(i) * k + j] = proj[g->mul(reps[i], reps[j])];
    auto q = std::make_shared<Group>(
        k, std::move(qmul), g->label() + "/N" + std::to_string(nsub.card()));
    return QuotientResult{g, std::move(q), std::move(proj)};
}

// Least index of a proper subgroup, by enumerating the subgroup lattice
// (cyclic subgroups closed under pairwise join). Groups carrying the PSL2
// family tag report the projective-line degree q+1 without enumeration.
inline int min_proper_subgroup_index(const GroupPtr& g, int enum_order_cap = 400,
                                     std::size_t subgroup_budget = 20000) {
    if (g->order() < 2) throw value_error("the trivial group has no proper subgroup");
    if (g->family().kind == GroupFamily::kPsl2) return g->family().param + 1;
    int n = g->order();
    if (n > enum_order_cap)
        throw cap_error("subgroup enumeration is capped at order " +
                        std::to_string(enum_order_cap) +
                        " and this group carries no family tag");

    std::unordered_multimap<std::uint64_t, std::size_t> seen;
    std::vector<GroupSubset> subs;
    auto push = [&](GroupSubset s) -> bool {
        if (s.card() == n) return false;  // not proper
        std::uint64_t h = s.bits().hash();
        auto [lo, hi] = seen.equal_range(h);
        for (auto it = lo; it != hi; ++it)
            if (subs[it->second] == s) return false;
        seen.emplace(h, subs.size());
        subs.push_back(std::move(s));
        if (subs.size() > subgroup_budget)
            throw cap_error("subgroup enumeration budget exceeded");
        return true;
    };

    for (int x = 0; x < n; ++x) push(subgroup_closure(g, {x}));

    int best = 1;  // largest proper subgroup order found
    for (const auto& s : subs) best = std::max(best, s.card());
    if (2 * best == n) return 2;

    for (std::size_t i = 0; i < subs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            auto un = subs[i].bits() | subs[j].bits();
            if (push(subgroup_closure(g, un.to_vector()))) {
                best = std::max(best, subs.back().card());
                if (2 * best == n) return 2;
            }
        }
    }
    return n / best;
}

} // namespace profree
