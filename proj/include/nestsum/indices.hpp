#pragma once

// Index data for the three nested sum families.
//
//   S_{a1,...,ad}(N)                harmonic, a_i nonzero integers, sign = alternation
//   S_{a1,...,ad}(x1,...,xd;N)      S-sum, a_i >= 1 integers, x_i nonzero rationals
//   sum over (a,b,c,s) levels       cyclotomic, a > b >= 0, c >= 1, s = +-1
//
// Upper bound is m*N for a positive integer m, or Infinity (the sum's limit,
// when it exists; divergent cases are rejected at evaluation time, not here).

#include "errors.hpp"
#include "rational.hpp"

#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

namespace nestsum {

struct Bound {
    // multiplier 0 encodes Infinity
    unsigned multiplier = 1;

    static Bound of_n(unsigned m = 1) {
        if (m == 0) throw DomainError("bound multiplier must be positive");
        Bound b;
        b.multiplier = m;
        return b;
    }
    static Bound infinity() {
        Bound b;
        b.multiplier = 0;
        return b;
    }
    bool is_infinite() const { return multiplier == 0; }

    // concrete upper limit once N is fixed
    long long at(long long N) const {
        if (is_infinite()) throw DomainError("infinite bound has no finite value");
        return (long long)multiplier * N;
    }

    friend bool operator==(const Bound&, const Bound&) = default;
    friend bool operator<(const Bound& x, const Bound& y) {
        // finite bounds by multiplier, infinity last
        if (x.is_infinite() != y.is_infinite()) return y.is_infinite();
        return x.multiplier < y.multiplier;
    }
};

inline std::string to_string(const Bound& b) {
    if (b.is_infinite()) return "inf";
    if (b.multiplier == 1) return "N";
    return std::to_string(b.multiplier) + "N";
}

// ---------------------------------------------------------------------------

struct HarmonicIndex {
    std::vector<int> a;  // nonzero

    HarmonicIndex() = default;
    HarmonicIndex(std::initializer_list<int> v) : a(v) { validate(); }
    explicit HarmonicIndex(std::vector<int> v) : a(std::move(v)) { validate(); }

    void validate() const {
        for (int x : a)
            if (x == 0) throw DomainError("harmonic index entries must be nonzero");
    }

    unsigned depth() const { return unsigned(a.size()); }
    unsigned weight() const {
        unsigned w = 0;
        for (int x : a) w += unsigned(std::abs(x));
        return w;
    }

    friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
    friend auto operator<=>(const HarmonicIndex& x, const HarmonicIndex& y) {
        return x.a <=> y.a;
    }
};

struct SSumIndex {
    std::vector<int> a;       // >= 1
    std::vector<Rational> x;  // nonzero

    SSumIndex() = default;
    SSumIndex(std::vector<int> aa, std::vector<Rational> xx)
        : a(std::move(aa)), x(std::move(xx)) {
        validate();
    }

    void validate() const {
        if (a.size() != x.size()) throw DomainError("S-sum needs one weight per exponent");
        for (int e : a)
            if (e < 1) throw DomainError("S-sum exponents must be >= 1");
        for (const auto& w : x)
            if (w == 0) throw DomainError("S-sum weights must be nonzero");
    }

    unsigned depth() const { return unsigned(a.size()); }
    unsigned weight() const { return unsigned(std::accumulate(a.begin(), a.end(), 0)); }

    friend bool operator==(const SSumIndex&, const SSumIndex&) = default;
    friend bool operator<(const SSumIndex& p, const SSumIndex& q) {
        if (p.a != q.a) return p.a < q.a;
        return p.x < q.x;
    }
};

// Reading: a harmonic index a_i with sign s_i is the S-sum entry (|a_i|, s_i).
inline SSumIndex as_ssum(const HarmonicIndex& h) {
    std::vector<int> a;
    std::vector<Rational> x;
    for (int v : h.a) {
        a.push_back(std::abs(v));
        x.push_back(v > 0 ? 1 : -1);
    }
    return SSumIndex{std::move(a), std::move(x)};
}

// Inverse of as_ssum where all weights are +-1; empty result otherwise.
inline bool as_harmonic(const SSumIndex& s, HarmonicIndex& out) {
    std::vector<int> a;
    for (size_t i = 0; i < s.a.size(); ++i) {
        if (s.x[i] == 1)
            a.push_back(s.a[i]);
        else if (s.x[i] == -1)
            a.push_back(-s.a[i]);
        else
            return false;
    }
    out = HarmonicIndex{std::move(a)};
    return true;
}

// ---------------------------------------------------------------------------

struct CycLevel {
    unsigned a = 1;  // modulus factor, a > b
    unsigned b = 0;  // offset
    unsigned c = 1;  // exponent, >= 1
    int s = 1;       // sign weight, +-1

    CycLevel() = default;
    CycLevel(unsigned aa, unsigned bb, unsigned cc, int ss) : a(aa), b(bb), c(cc), s(ss) {
        validate();
    }

    void validate() const {
        if (a == 0 || b >= a) throw DomainError("cyclotomic level needs a > b >= 0");
        if (c == 0) throw DomainError("cyclotomic level needs c >= 1");
        if (s != 1 && s != -1) throw DomainError("cyclotomic sign must be +-1");
    }

    friend bool operator==(const CycLevel&, const CycLevel&) = default;
    friend auto operator<=>(const CycLevel&, const CycLevel&) = default;
};

struct CycIndex {
    std::vector<CycLevel> levels;

    CycIndex() = default;
    CycIndex(std::initializer_list<CycLevel> v) : levels(v) { validate(); }
    explicit CycIndex(std::vector<CycLevel> v) : levels(std::move(v)) { validate(); }

    void validate() const {
        if (levels.empty()) throw DomainError("cyclotomic index must be nonempty");
        for (const auto& l : levels) l.validate();
    }

    unsigned depth() const { return unsigned(levels.size()); }
    unsigned weight() const {
        unsigned w = 0;
        for (const auto& l : levels) w += l.c;
        return w;
    }

    friend bool operator==(const CycIndex&, const CycIndex&) = default;
    friend bool operator<(const CycIndex& p, const CycIndex& q) {
        return p.levels < q.levels;
    }
};

inline std::string to_string(const HarmonicIndex& h) {
    std::string s;
    for (size_t i = 0; i < h.a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(h.a[i]);
    }
    return s;
}

inline std::string to_string(const SSumIndex& idx) {
    std::string s;
    for (size_t i = 0; i < idx.a.size(); ++i) {
        if (i) s += ",";
        s += "(" + std::to_string(idx.a[i]) + "," + to_string(idx.x[i]) + ")";
    }
    return s;
}

inline std::string to_string(const CycIndex& idx) {
    std::string s;
    for (size_t i = 0; i < idx.levels.size(); ++i) {
        const auto& l = idx.levels[i];
        if (i) s += ",";
        s += "{" + std::to_string(l.a) + "," + std::to_string(l.b) + "," + std::to_string(l.c) +
             "," + std::to_string(l.s) + "}";
    }
    return s;
}

}  // namespace nestsum
