#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "profree/errors.hpp"
#include "profree/group.hpp"
#include "profree/productfree.hpp"
#include "profree/rng.hpp"

namespace profree {

// Incidence matrix N of the bipartite Cayley graph of A: rows indexed by V2
// (y), columns by V1 (x), with entry(y, x) = 1 iff y x^{-1} lies in A. Every
// row and column sums to |A|.
class IncidenceMatrix {
public:
    IncidenceMatrix(GroupPtr group, GroupSubset a)
        : group_(std::move(group)), a_(std::move(a)), n_(group_->order()) {
        if (a_.group().get() != group_.get())
            throw value_error("generating set belongs to a different group");
        if (a_.empty()) throw value_error("generating set must be nonempty");
        rows_.reserve(n_);
        for (int y = 0; y < n_; ++y) {
            Bitset row(n_);
            for (int x = 0; x < n_; ++x)
                if (a_.contains(group_->mul(y, group_->inv(x)))) row.set(x);
            rows_.push_back(std::move(row));
        }
    }

    const GroupPtr& group() const { return group_; }
    const GroupSubset& generating_set() const { return a_; }
    int dim() const { return n_; }
    bool entry(int y, int x) const { return rows_[y].test(x); }
    const Bitset& row(int y) const { return rows_[y]; }

    // w = N v
    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> w(n_, 0.0);
        for (int y = 0; y < n_; ++y) {
            double acc = 0.0;
            rows_[y].for_each([&](int x) { acc += v[x]; });
            w[y] = acc;
        }
        return w;
    }

    // w = N^T v
    std::vector<double> apply_transposed(const std::vector<double>& v) const {
        std::vector<double> w(n_, 0.0);
        for (int y = 0; y < n_; ++y) {
            double vy = v[y];
            if (vy == 0.0) continue;
            rows_[y].for_each([&](int x) { w[x] += vy; });
        }
        return w;
    }

    // Dense N^T N, using the group structure: (N^T N)[x][x'] depends only on
    // x' x^{-1}.
    std::vector<double> gram() const {
        const Group& g = *group_;
        std::vector<double> corr(n_);
        auto av = a_.elements();
        for (int w = 0; w < n_; ++w) {
            int cnt = 0;
            for (int a : av)
                if (a_.contains(g.mul(a, w))) ++cnt;
            corr[w] = static_cast<double>(cnt);
        }
        std::vector<double> m(static_cast<std::size_t>(n_) * n_);
        for (int x = 0; x < n_; ++x)
            for (int xp = 0; xp < n_; ++xp)
                m[static_cast<std::size_t>(x) * n_ + xp] = corr[g.mul(xp, g.inv(x))];
        return m;
    }

private:
    GroupPtr group_;
    GroupSubset a_;
    int n_;
    std::vector<Bitset> rows_;
};

inline IncidenceMatrix cayley_incidence(const GroupPtr& g, const GroupSubset& a) {
    return IncidenceMatrix(g, a);
}

struct SingularSpectrum {
    std::vector<double> sigma;  // non-increasing
    std::string method;
    double residual = 0.0;  // max | ||N v_i|| - sigma_i | over computed pairs
    bool converged = true;
    int iterations = 0;
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Cyclic Jacobi eigensolver for a dense symmetric matrix; returns the
// eigenvalues and fills `vecs` with the corresponding orthonormal
// eigenvectors as columns.
inline std::vector<double> jacobi_eigen(std::vector<double> s, int n,
                                        std::vector<double>& vecs, bool& converged,
                                        int max_sweeps = 50) {
    auto at = [&](int i, int j) -> double& { return s[static_cast<std::size_t>(i) * n + j]; };
    vecs.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vecs[static_cast<std::size_t>(i) * n + i] = 1.0;

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(at(i, i)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) scale = std::max(scale, std::abs(at(i, j)));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-14 * scale;

    converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
        if (off <= tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = at(p, q);
                if (std::abs(apq) <= tol) continue;
                double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                double tau = sn / (1.0 + c);
                double app = at(p, p), aqq = at(q, q);
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    double arp = at(r, p), arq = at(r, q);
                    at(r, p) = arp - sn * (arq + tau * arp);
                    at(p, r) = at(r, p);
                    at(r, q) = arq + sn * (arp - tau * arq);
                    at(q, r) = at(r, q);
                }
                for (int r = 0; r < n; ++r) {
                    double vrp = vecs[static_cast<std::size_t>(r) * n + p];
                    double vrq = vecs[static_cast<std::size_t>(r) * n + q];
                    vecs[static_cast<std::size_t>(r) * n + p] = vrp - sn * (vrq + tau * vrp);
                    vecs[static_cast<std::size_t>(r) * n + q] = vrq + sn * (vrp - tau * vrq);
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = at(i, i);
    return eig;
}

} // namespace detail

// Singular values of N. top_k <= 0 asks for the full spectrum via a dense
// Jacobi eigensolve of N^T N; top_k in {1, 2} runs power iteration, with
// sigma_2 obtained by deflating against the all-ones vector (an exact
// sigma_1-singular vector of a biregular graph).
inline SingularSpectrum singular_spectrum(const IncidenceMatrix& nmat, int top_k = 0) {
    int n = nmat.dim();
    SingularSpectrum out;

    if (top_k <= 0 || top_k > 2) {
        auto gram = nmat.gram();
        std::vector<double> vecs;
        bool conv = false;
        auto eig = detail::jacobi_eigen(std::move(gram), n, vecs, conv);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) { return eig[i] > eig[j]; });
        out.sigma.resize(n);
        double residual = 0.0;
        std::vector<double> v(n);
        int limit = (top_k <= 0) ? n : top_k;
        for (int r = 0; r < n; ++r) {
            out.sigma[r] = std::sqrt(std::max(0.0, eig[order[r]]));
            if (r < limit) {
                for (int i = 0; i < n; ++i)
                    v[i] = vecs[static_cast<std::size_t>(i) * n + order[r]];
                double nv = detail::norm2(nmat.apply(v));
                residual = std::max(residual, std::abs(nv - out.sigma[r]));
            }
        }
        if (top_k > 0) out.sigma.resize(top_k);
        out.method = "jacobi";
        out.residual = residual;
        out.converged = conv;
        return out;
    }

    const int cap = 100000;
    const double tol = 1e-10;
    auto matvec = [&](const std::vector<double>& v) {
        return nmat.apply_transposed(nmat.apply(v));
    };
    auto power = [&](bool deflate_ones, std::uint64_t seed, double& sigma,
                     double& resid) -> int {
        Rng rng(seed);
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.unit() + 0.5;
        if (deflate_ones) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= n;
            for (double& x : v) x -= mean;
        }
        double nv = detail::norm2(v);
        for (double& x : v) x /= nv;
        double rayleigh = 0.0, prev = -1.0;
        int it = 0;
        for (; it < cap; ++it) {
            auto w = matvec(v);
            if (deflate_ones) {
                double mean = 0.0;
                for (double x : w) mean += x;
                mean /= n;
                for (double& x : w) x -= mean;
            }
            rayleigh = detail::dot(v, w);
            double wn = detail::norm2(w);
            if (wn < 1e-300) {
                rayleigh = 0.0;
                break;
            }
            for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
            if (std::abs(rayleigh - prev) <= tol * std::max(std::abs(rayleigh), 1.0)) break;
            prev = rayleigh;
        }
        sigma = std::sqrt(std::max(0.0, rayleigh));
        resid = std::abs(detail::norm2(nmat.apply(v)) - sigma);
        return it;
    };

    double s1 = 0.0, r1 = 0.0;
    int it1 = power(false, 0x736967316d61ull, s1, r1);
    out.sigma.push_back(s1);
    out.residual = r1;
    out.iterations = it1;
    if (top_k == 2) {
        double s2 = 0.0, r2 = 0.0;
        int it2 = power(true, 0x736967326d62ull, s2, r2);
        s2 = std::min(s2, s1);
        out.sigma.push_back(s2);
        out.residual = std::max(out.residual, r2);
        out.iterations = std::max(it1, it2);
    }
    out.method = "power";
    out.converged = out.iterations < cap;
    return out;
}

// lambda = sigma_2 against the representation-theoretic bound
// lambda^2 <= n |A| / delta.
struct LambdaCheck {
    double lambda = 0.0;
    double bound = 0.0;   // n |A| / delta
    double slack = 0.0;   // bound - lambda^2
    bool holds = false;
    double sigma1 = 0.0;
    double residual = 0.0;
    std::string method;
};

inline LambdaCheck gowers_lambda_check(const GroupPtr& g, const GroupSubset& a,
                                       int delta_value, int top_k = 2) {
    if (delta_value < 1) throw value_error("delta must be positive");
    if (top_k == 1) throw value_error("the lambda check needs at least two singular values");
    auto nmat = cayley_incidence(g, a);
    auto spec = singular_spectrum(nmat, top_k);
    LambdaCheck r;
    r.sigma1 = spec.sigma.empty() ? 0.0 : spec.sigma[0];
    r.lambda = spec.sigma.size() > 1 ? spec.sigma[1] : 0.0;
    r.bound = static_cast<double>(g->order()) * a.card() / delta_value;
    r.slack = r.bound - r.lambda * r.lambda;
    r.holds = r.lambda * r.lambda <= r.bound * (1.0 + 1e-6);
    r.residual = spec.residual;
    r.method = spec.method;
    return r;
}

// n^3 / delta and the consequent alpha upper bound n / delta^{1/3}.
struct TripleBound {
    std::int64_t numerator = 0;  // n^3
    int delta = 1;
    double triple_bound = 0.0;  // n^3 / delta
    double alpha_upper = 0.0;   // n / delta^{1/3}
};

inline TripleBound gowers_triple_bound(int n, int delta_value) {
    if (delta_value < 1) throw value_error("delta must be positive");
    TripleBound b;
    b.numerator = static_cast<std::int64_t>(n) * n * n;
    b.delta = delta_value;
    b.triple_bound = static_cast<double>(b.numerator) / delta_value;
    b.alpha_upper = n / std::cbrt(static_cast<double>(delta_value));
    return b;
}

// Checks the hypothesis (no a*b = c across A, B, C, via C and AB disjoint)
// and, when it holds, the cardinality bound |A||B||C| <= n^3/delta in exact
// integer arithmetic.
struct TripleCheck {
    bool hypothesis = false;
    std::int64_t product = 0;
    std::int64_t bound_numerator = 0;  // n^3
    bool bound_holds = false;          // product * delta <= n^3, when hypothesis
    double r = 0.0, s = 0.0, t = 0.0;  // densities
    double rst_delta = 0.0;
};

inline TripleCheck gowers_verify_triple(const GroupSubset& a, const GroupSubset& b,
                                        const GroupSubset& c, int delta_value) {
    if (delta_value < 1) throw value_error("delta must be positive");
    detail::require_same_group(a, b);
    detail::require_same_group(a, c);
    std::int64_t n = a.group()->order();
    TripleCheck res;
    auto ab = set_product(a, b);
    res.hypothesis = !(ab.bits() & c.bits()).any();
    res.product = static_cast<std::int64_t>(a.card()) * b.card() * c.card();
    res.bound_numerator = n * n * n;
    res.r = static_cast<double>(a.card()) / n;
    res.s = static_cast<double>(b.card()) / n;
    res.t = static_cast<double>(c.card()) / n;
    res.rst_delta = res.r * res.s * res.t * delta_value;
    if (res.hypothesis)
        res.bound_holds = res.product * delta_value <= res.bound_numerator;
    return res;
}

// Contrapositive use of the triple bound: if |A||B||C| > n^3/delta then ABC
// must cover the whole group; checks it by two set products.
struct NikolovPyberCheck {
    std::int64_t product = 0;
    std::int64_t threshold_numerator = 0;  // n^3
    bool above_threshold = false;
    bool abc_checked = false;
    bool abc_is_group = false;
    int abc_size = 0;
};

inline NikolovPyberCheck nikolov_pyber_check(const GroupSubset& a, const GroupSubset& b,
                                             const GroupSubset& c, int delta_value) {
    if (delta_value < 1) throw value_error("delta must be positive");
    detail::require_same_group(a, b);
    detail::require_same_group(a, c);
    std::int64_t n = a.group()->order();
    NikolovPyberCheck res;
    res.product = static_cast<std::int64_t>(a.card()) * b.card() * c.card();
    res.threshold_numerator = n * n * n;
    res.above_threshold = res.product * delta_value > res.threshold_numerator;
    if (res.above_threshold) {
        auto abc = set_product(set_product(a, b), c);
        res.abc_checked = true;
        res.abc_size = abc.card();
        res.abc_is_group = abc.card() == n;
    }
    return res;
}

} // namespace profree
