#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace profree {

// Dynamic bitset with a size fixed at construction. Element sets over a
// group of order n are represented as length-n bitsets.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    bool test(int i) const {
        assert(i >= 0 && i < n_);
        return (w_[i >> 6] >> (i & 63)) & 1;
    }
    void set(int i) {
        assert(i >= 0 && i < n_);
        w_[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
    void reset(int i) {
        assert(i >= 0 && i < n_);
        w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    }
    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    int count() const {
        int c = 0;
        for (std::uint64_t w : w_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (std::uint64_t w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bitset& operator&=(const Bitset& o) {
        assert(n_ == o.n_);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        assert(n_ == o.n_);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }

    // Complement within {0,...,n-1}.
    Bitset complement() const {
        Bitset r(n_);
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = ~w_[i];
        r.trim();
        return r;
    }

    bool intersects(const Bitset& o) const {
        assert(n_ == o.n_);
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

    // First set bit at index >= from, or -1.
    int find_next(int from) const {
        if (from >= n_) return -1;
        int word = from >> 6;
        std::uint64_t cur = w_[word] & (~std::uint64_t(0) << (from & 63));
        while (true) {
            if (cur) {
                int i = (word << 6) + std::countr_zero(cur);
                return i < n_ ? i : -1;
            }
            if (++word >= static_cast<int>(w_.size())) return -1;
            cur = w_[word];
        }
    }
    int find_first() const { return find_next(0); }

    template <class F>
    void for_each(F&& f) const {
        for (int i = find_first(); i >= 0; i = find_next(i + 1)) f(i);
    }

    std::vector<int> to_vector() const {
        std::vector<int> v;
        v.reserve(count());
        for_each([&](int i) { v.push_back(i); });
        return v;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t w : w_) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    void trim() {
        int tail = n_ & 63;
        if (tail && !w_.empty()) w_.back() &= (std::uint64_t(1) << tail) - 1;
    }

    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

} // namespace profree
