#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "profree/errors.hpp"
#include "profree/group.hpp"

namespace profree {

// Conjugacy classes of a group. Class 0 is the singleton {identity}.
struct ConjClasses {
    std::vector<std::int32_t> reps;
    std::vector<std::int32_t> sizes;
    std::vector<std::int32_t> class_of;  // length n

    int count() const { return static_cast<int>(reps.size()); }
};

inline ConjClasses conjugacy_classes(const Group& g) {
    int n = g.order();
    ConjClasses cc;
    cc.class_of.assign(n, -1);
    for (int x = 0; x < n; ++x) {
        if (cc.class_of[x] >= 0) continue;
        int c = cc.count();
        cc.reps.push_back(x);
        int size = 0;
        for (int y = 0; y < n; ++y) {
            int conj = g.mul(g.mul(y, x), g.inv(y));
            if (cc.class_of[conj] < 0) {
                cc.class_of[conj] = c;
                ++size;
            }
        }
        cc.sizes.push_back(size);
        if (n % size != 0) throw internal_error("class size does not divide the order");
    }
    return cc;
}

// Multiset of complex irreducible character degrees, and delta = the least
// degree over nontrivial irreducibles (0 for the trivial group, where no
// nontrivial irreducible exists).
struct CharacterDegrees {
    std::vector<int> degrees;  // ascending
    int delta = 0;
    int classes = 0;
    std::int64_t prime = 0;  // field size used by the computation
};

struct DixonOptions {
    int max_classes = 512;
    std::int64_t prime_bound = 100000000;
};

namespace detail {

inline std::uint64_t addp(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;
    return s >= p ? s - p : s;
}
inline std::uint64_t subp(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a >= b ? a - b : a + p - b;
}
inline std::uint64_t mulp(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a * b % p;
}
inline std::uint64_t powp(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulp(r, a, p);
        a = mulp(a, a, p);
        e >>= 1;
    }
    return r;
}
inline std::uint64_t invp(std::uint64_t a, std::uint64_t p) {
    if (a % p == 0) throw internal_error("division by zero in F_p");
    return powp(a, p - 2, p);
}

// Dense row-major matrix over F_p.
struct FpMat {
    int rows = 0, cols = 0;
    std::vector<std::uint64_t> a;

    FpMat() = default;
    FpMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}
    std::uint64_t& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::uint64_t at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

inline FpMat matmul(const FpMat& x, const FpMat& y, std::uint64_t p) {
    FpMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            std::uint64_t v = x.at(i, k);
            if (!v) continue;
            for (int j = 0; j < y.cols; ++j)
                r.at(i, j) = addp(r.at(i, j), mulp(v, y.at(k, j), p), p);
        }
    return r;
}

// Basis of the null space of m (columns of the result span ker m).
inline FpMat kernel_basis(FpMat m, std::uint64_t p) {
    int r = m.rows, c = m.cols;
    std::vector<int> pivot_col;  // pivot column of each pivot row
    int row = 0;
    for (int col = 0; col < c && row < r; ++col) {
        int pr = -1;
        for (int i = row; i < r; ++i)
            if (m.at(i, col)) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        for (int j = 0; j < c; ++j) std::swap(m.a[std::size_t(pr) * c + j], m.a[std::size_t(row) * c + j]);
        std::uint64_t piv = invp(m.at(row, col), p);
        for (int j = 0; j < c; ++j) m.at(row, j) = mulp(m.at(row, j), piv, p);
        for (int i = 0; i < r; ++i) {
            if (i == row) continue;
            std::uint64_t f = m.at(i, col);
            if (!f) continue;
            for (int j = 0; j < c; ++j)
                m.at(i, j) = subp(m.at(i, j), mulp(f, m.at(row, j), p), p);
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<char> is_pivot(c, 0);
    for (int pc : pivot_col) is_pivot[pc] = 1;
    int nullity = c - static_cast<int>(pivot_col.size());
    FpMat basis(c, nullity);
    int bj = 0;
    for (int col = 0; col < c; ++col) {
        if (is_pivot[col]) continue;
        basis.at(col, bj) = 1;
        for (std::size_t pr = 0; pr < pivot_col.size(); ++pr)
            basis.at(pivot_col[pr], bj) = subp(0, m.at(static_cast<int>(pr), col), p);
        ++bj;
    }
    return basis;
}

// Upper Hessenberg form by a similarity transform (row/column operations).
inline void hessenberg(FpMat& m, std::uint64_t p) {
    int d = m.rows;
    for (int j = 0; j + 2 < d; ++j) {
        int pr = -1;
        for (int i = j + 1; i < d; ++i)
            if (m.at(i, j)) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        if (pr != j + 1) {
            for (int c = 0; c < d; ++c) std::swap(m.at(j + 1, c), m.at(pr, c));
            for (int r = 0; r < d; ++r) std::swap(m.at(r, j + 1), m.at(r, pr));
        }
        std::uint64_t pivinv = invp(m.at(j + 1, j), p);
        for (int i = j + 2; i < d; ++i) {
            std::uint64_t f = mulp(m.at(i, j), pivinv, p);
            if (!f) continue;
            for (int c = 0; c < d; ++c)
                m.at(i, c) = subp(m.at(i, c), mulp(f, m.at(j + 1, c), p), p);
            for (int r = 0; r < d; ++r)
                m.at(r, j + 1) = addp(m.at(r, j + 1), mulp(f, m.at(r, i), p), p);
        }
    }
}

// Characteristic polynomial (monic, coefficient vector by ascending degree).
inline std::vector<std::uint64_t> charpoly(FpMat m, std::uint64_t p) {
    int d = m.rows;
    hessenberg(m, p);
    std::vector<std::vector<std::uint64_t>> f(d + 1);
    f[0] = {1};
    for (int k = 1; k <= d; ++k) {
        // f_k = (x - H[k-1][k-1]) f_{k-1} - sum_i H[k-1-i][k-1] (prod subdiag) f_{k-1-i}
        std::vector<std::uint64_t> cur(k + 1, 0);
        const auto& prev = f[k - 1];
        for (int t = 0; t < k; ++t) {
            cur[t + 1] = addp(cur[t + 1], prev[t], p);
            cur[t] = subp(cur[t], mulp(m.at(k - 1, k - 1), prev[t], p), p);
        }
        std::uint64_t prod = 1;
        for (int i = 1; i <= k - 1; ++i) {
            prod = mulp(prod, m.at(k - i, k - i - 1), p);
            if (!prod) break;
            std::uint64_t coef = mulp(m.at(k - 1 - i, k - 1), prod, p);
            if (!coef) continue;
            const auto& fi = f[k - 1 - i];
            for (int t = 0; t <= k - 1 - i; ++t)
                cur[t] = subp(cur[t], mulp(coef, fi[t], p), p);
        }
        f[k] = std::move(cur);
    }
    return f[d];
}

inline std::uint64_t poly_eval(const std::vector<std::uint64_t>& c, std::uint64_t x,
                               std::uint64_t p) {
    std::uint64_t r = 0;
    for (std::size_t i = c.size(); i-- > 0;) r = addp(mulp(r, x, p), c[i], p);
    return r;
}

// Distinct roots in F_p by scanning the field.
inline std::vector<std::uint64_t> poly_roots(const std::vector<std::uint64_t>& c,
                                             std::uint64_t p) {
    std::vector<std::uint64_t> roots;
    for (std::uint64_t x = 0; x < p; ++x)
        if (poly_eval(c, x, p) == 0) roots.push_back(x);
    return roots;
}

// Solve S T = P for T, where the k x d matrix S has full column rank and the
// columns of P lie in the column span of S.
inline FpMat solve_in_basis(const FpMat& s, const FpMat& pmat, std::uint64_t p) {
    int k = s.rows, d = s.cols, w = pmat.cols;
    FpMat aug(k, d + w);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < d; ++j) aug.at(i, j) = s.at(i, j);
        for (int j = 0; j < w; ++j) aug.at(i, d + j) = pmat.at(i, j);
    }
    int row = 0;
    std::vector<int> pivot_of_col(d, -1);
    for (int col = 0; col < d && row < k; ++col) {
        int pr = -1;
        for (int i = row; i < k; ++i)
            if (aug.at(i, col)) {
                pr = i;
                break;
            }
        if (pr < 0) throw internal_error("basis matrix is rank-deficient");
        for (int j = 0; j < d + w; ++j) std::swap(aug.at(pr, j), aug.at(row, j));
        std::uint64_t piv = invp(aug.at(row, col), p);
        for (int j = 0; j < d + w; ++j) aug.at(row, j) = mulp(aug.at(row, j), piv, p);
        for (int i = 0; i < k; ++i) {
            if (i == row) continue;
            std::uint64_t f = aug.at(i, col);
            if (!f) continue;
            for (int j = 0; j < d + w; ++j)
                aug.at(i, j) = subp(aug.at(i, j), mulp(f, aug.at(row, j), p), p);
        }
        pivot_of_col[col] = row;
        ++row;
    }
    for (int i = row; i < k; ++i)
        for (int j = 0; j < w; ++j)
            if (aug.at(i, d + j))
                throw internal_error("subspace is not invariant under the class matrix");
    FpMat t(d, w);
    for (int col = 0; col < d; ++col)
        for (int j = 0; j < w; ++j) t.at(col, j) = aug.at(pivot_of_col[col], d + j);
    return t;
}

inline std::int64_t dixon_prime(int exponent, int n, std::int64_t bound) {
    long double need = 2.0L * std::sqrt(static_cast<long double>(n));
    for (std::int64_t p = exponent + 1;; p += exponent) {
        if (p > bound)
            throw cap_error("no suitable prime p = 1 (mod " + std::to_string(exponent) +
                            ") below " + std::to_string(bound));
        if (static_cast<long double>(p) <= need) continue;
        if (is_prime_small(p)) return p;
    }
}

} // namespace detail

// Exact complex irreducible character degrees via class-matrix eigenvectors
// over a prime field F_p with p = 1 (mod exponent(G)) and p > 2 sqrt(n).
inline CharacterDegrees character_degrees(const Group& g, DixonOptions opt = {}) {
    int n = g.order();
    ConjClasses cc = conjugacy_classes(g);
    int k = cc.count();

    CharacterDegrees out;
    out.classes = k;
    if (n == 1) {
        out.degrees = {1};
        out.delta = 0;
        out.prime = 0;
        return out;
    }
    if (k > opt.max_classes)
        throw cap_error("class count " + std::to_string(k) +
                        " exceeds the configured limit " + std::to_string(opt.max_classes));

    std::uint64_t p =
        static_cast<std::uint64_t>(detail::dixon_prime(g.exponent(), n, opt.prime_bound));
    out.prime = static_cast<std::int64_t>(p);

    std::vector<std::vector<int>> members(k);
    for (int x = 0; x < n; ++x) members[cc.class_of[x]].push_back(x);
    std::vector<int> inv_class(k);
    for (int i = 0; i < k; ++i) inv_class[i] = cc.class_of[g.inv(cc.reps[i])];

    // class matrix of class i: B[j][t] = #{x in C_i : x^{-1} z_t in C_j}
    auto class_matrix = [&](int i) {
        detail::FpMat b(k, k);
        for (int x : members[i]) {
            int xi = g.inv(x);
            for (int t = 0; t < k; ++t) {
                int j = cc.class_of[g.mul(xi, cc.reps[t])];
                b.at(j, t) = detail::addp(b.at(j, t), 1, p);
            }
        }
        return b;
    };

    // split the class algebra into common eigenvectors
    std::vector<detail::FpMat> spaces;
    {
        detail::FpMat id(k, k);
        for (int i = 0; i < k; ++i) id.at(i, i) = 1;
        spaces.push_back(std::move(id));
    }
    for (int i = 1; i < k; ++i) {
        bool all_split = true;
        for (const auto& s : spaces)
            if (s.cols > 1) {
                all_split = false;
                break;
            }
        if (all_split) break;

        detail::FpMat b = class_matrix(i);
        std::vector<detail::FpMat> next;
        for (auto& s : spaces) {
            if (s.cols <= 1) {
                next.push_back(std::move(s));
                continue;
            }
            detail::FpMat bs = detail::matmul(b, s, p);
            detail::FpMat t = detail::solve_in_basis(s, bs, p);
            auto poly = detail::charpoly(t, p);
            auto roots = detail::poly_roots(poly, p);
            int total = 0;
            for (std::uint64_t lam : roots) {
                detail::FpMat shifted = t;
                for (int r = 0; r < t.rows; ++r)
                    shifted.at(r, r) = detail::subp(shifted.at(r, r), lam, p);
                detail::FpMat kbasis = detail::kernel_basis(shifted, p);
                if (kbasis.cols == 0) continue;
                total += kbasis.cols;
                next.push_back(detail::matmul(s, kbasis, p));
            }
            if (total != s.cols)
                throw internal_error("class matrix failed to diagonalize over F_p");
        }
        spaces = std::move(next);
    }
    for (const auto& s : spaces)
        if (s.cols != 1)
            throw internal_error("central characters were not fully separated");
    if (static_cast<int>(spaces.size()) != k)
        throw internal_error("wrong number of central characters");

    // degree recovery: d^2 = n * (sum_i w_i w_{i*} / |C_i|)^{-1} in F_p,
    // with the unique integer root d <= sqrt(n)
    int sqrt_n = static_cast<int>(std::sqrt(static_cast<double>(n)) + 0.5);
    while (sqrt_n * sqrt_n > n) --sqrt_n;
    std::vector<int> degrees;
    for (const auto& s : spaces) {
        std::vector<std::uint64_t> w(k);
        for (int i = 0; i < k; ++i) w[i] = s.at(i, 0);
        if (w[0] == 0) throw internal_error("eigenvector vanishes on the identity class");
        std::uint64_t norm = detail::invp(w[0], p);
        std::uint64_t sum = 0;
        for (int i = 0; i < k; ++i) {
            std::uint64_t wi = detail::mulp(w[i], norm, p);
            std::uint64_t wistar = detail::mulp(w[inv_class[i]], norm, p);
            std::uint64_t term = detail::mulp(wi, wistar, p);
            term = detail::mulp(term, detail::invp(cc.sizes[i] % p, p), p);
            sum = detail::addp(sum, term, p);
        }
        std::uint64_t dsq = detail::mulp(n % p, detail::invp(sum, p), p);
        int found = -1;
        for (int d = 1; d <= sqrt_n; ++d)
            if (static_cast<std::uint64_t>(d) * d % p == dsq) {
                if (found >= 0) throw internal_error("ambiguous degree root");
                found = d;
            }
        if (found < 0) throw internal_error("no degree root found");
        degrees.push_back(found);
    }
    std::sort(degrees.begin(), degrees.end());

    std::int64_t sumsq = 0;
    for (int d : degrees) sumsq += static_cast<std::int64_t>(d) * d;
    if (sumsq != n) throw internal_error("degree squares do not sum to the group order");
    if (degrees.front() != 1) throw internal_error("missing trivial character");

    out.degrees = std::move(degrees);
    out.delta = out.degrees[1];
    return out;
}

// Smallest dimension of a nontrivial complex irreducible representation.
inline int delta(const Group& g, DixonOptions opt = {}) {
    if (g.order() == 1)
        throw value_error("the trivial group has no nontrivial representation");
    return character_degrees(g, opt).delta;
}

} // namespace profree
