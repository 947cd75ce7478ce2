#pragma once

// Linear combinations over Q of monomials in named constants and sum/integral
// functionals. A Term is a commutative monomial: constant symbols with powers
// times a (possibly empty) bag of functionals. Products of functionals are
// legal as data; turning them into linear combinations is the job of the
// shuffle/stuffle expansion in algebra.hpp, not of this container.
//
// Canonical term order, and therefore print order: total weight ascending,
// then monomial degree descending, then depth descending, then lexicographic.
// Weight-2 example: S[1,1](N) sorts before S[2](N).

#include "errors.hpp"
#include "indices.hpp"
#include "letters.hpp"
#include "rational.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace nestsum {

// --------------------------------------------------------------------------
// Named constants

struct ConstantSymbol {
    enum class Tag { Zeta, Ln2, LiHalf, Catalan, Sigma0, IPi, Pi, WordAtOne };

    Tag tag = Tag::Ln2;
    unsigned k = 0;  // zeta / polylog order
    Word w;          // WordAtOne payload

    static ConstantSymbol zeta(unsigned order) {
        if (order < 2) throw DomainError("zeta symbol needs order >= 2");
        ConstantSymbol c;
        c.tag = Tag::Zeta;
        c.k = order;
        return c;
    }
    static ConstantSymbol ln2() { return ConstantSymbol{}; }
    static ConstantSymbol li_half(unsigned order) {
        if (order < 2) throw DomainError("li-half symbol needs order >= 2");
        ConstantSymbol c;
        c.tag = Tag::LiHalf;
        c.k = order;
        return c;
    }
    static ConstantSymbol catalan() {
        ConstantSymbol c;
        c.tag = Tag::Catalan;
        return c;
    }
    static ConstantSymbol sigma0() {
        ConstantSymbol c;
        c.tag = Tag::Sigma0;
        return c;
    }
    // i*pi, the imaginary half-period picked up on the x -> 1/x branch
    static ConstantSymbol i_pi() {
        ConstantSymbol c;
        c.tag = Tag::IPi;
        return c;
    }
    // pi itself, for the cyclotomic values at infinity (pi/4 - 1 and friends)
    static ConstantSymbol pi() {
        ConstantSymbol c;
        c.tag = Tag::Pi;
        return c;
    }
    static ConstantSymbol word_at_one(Word word);  // defined after the checks below

    unsigned weight() const {
        switch (tag) {
            case Tag::Zeta: return k;
            case Tag::Ln2: return 1;
            case Tag::LiHalf: return k;
            case Tag::Catalan: return 2;
            case Tag::Sigma0: return 1;
            case Tag::IPi: return 1;
            case Tag::Pi: return 1;
            case Tag::WordAtOne: return unsigned(w.size());
        }
        return 0;
    }

    friend bool operator==(const ConstantSymbol&, const ConstantSymbol&) = default;
    friend bool operator<(const ConstantSymbol& x, const ConstantSymbol& y) {
        if (x.tag != y.tag) return int(x.tag) < int(y.tag);
        if (x.k != y.k) return x.k < y.k;
        return std::lexicographical_compare(x.w.begin(), x.w.end(), y.w.begin(), y.w.end());
    }
};

// A word integral converges at the upper limit 1 unless the leading letter
// has a pole at 1 (core 1, cyclotomic (1,0)) or inside the segment
// (generalized a with 0 < a < 1).
inline void require_convergent_at_one(const Word& w) {
    if (w.empty()) return;
    const Letter& l = w.front();
    bool bad = false;
    if (l.is_core() && l.core_value() == 1) bad = true;
    if (l.kind == Letter::Kind::Generalized && l.a > 0 && l.a < 1) bad = true;
    if (l.kind == Letter::Kind::Cyclotomic && l.cyc_k == 1) bad = true;
    if (bad) throw DomainError("word integral divergent at 1: leading letter " + to_string(l));
}

inline ConstantSymbol ConstantSymbol::word_at_one(Word word) {
    require_convergent_at_one(word);
    ConstantSymbol c;
    c.tag = Tag::WordAtOne;
    c.w = std::move(word);
    return c;
}

// Value at 1 reduced to a preferred spelling: ln2 and single zetas fold,
// anything else stays a word symbol. Empty word folds to the bare rational 1.
inline std::pair<Rational, std::optional<ConstantSymbol>> fold_word_at_one(const Word& w) {
    require_convergent_at_one(w);
    if (w.empty()) return {Rational(1), std::nullopt};
    bool all_zero = true;
    for (const auto& l : w)
        if (!l.is_zero()) all_zero = false;
    if (all_zero) return {Rational(0), std::nullopt};  // powers of ln(1)
    bool zeros_then_sign = is_core_word(w);
    for (size_t i = 0; i + 1 < w.size() && zeros_then_sign; ++i)
        if (!w[i].is_zero()) zeros_then_sign = false;
    if (zeros_then_sign) {
        int last = w.back().core_value();
        unsigned k = unsigned(w.size());
        if (last == -1 && k == 1) return {Rational(1), ConstantSymbol::ln2()};
        if (last == 1 && k >= 2) return {Rational(1), ConstantSymbol::zeta(k)};
        if (last == -1 && k >= 2)
            // alternating single sum: eta(k) = (1 - 2^{1-k}) zeta(k)
            return {1 - qpow(Rational(2), 1 - (long long)k), ConstantSymbol::zeta(k)};
    }
    if (is_core_word(w) && w.size() <= 4) {
        // classic {0,1} reductions: zeta(2,1) = zeta(3) and the weight-4 row
        // zeta(3,1) = zeta(4)/4, zeta(2,2) = 3 zeta(4)/4, zeta(2,1,1) = zeta(4)
        static const std::vector<std::pair<std::vector<int>, std::pair<Rational, unsigned>>>
            known = {
                {{0, 1, 1}, {Rational(1), 3}},
                {{0, 0, 1, 1}, {rat(1, 4), 4}},
                {{0, 1, 0, 1}, {rat(3, 4), 4}},
                {{0, 1, 1, 1}, {Rational(1), 4}},
            };
        std::vector<int> v;
        for (const auto& l : w) v.push_back(l.core_value());
        for (const auto& [pat, red] : known)
            if (v == pat) return {red.first, ConstantSymbol::zeta(red.second)};
    }
    return {Rational(1), ConstantSymbol::word_at_one(w)};
}

// --------------------------------------------------------------------------
// Functionals

struct Functional {
    enum class Kind { Harmonic, SSum, Cyc, Word };

    Kind kind = Kind::Harmonic;
    HarmonicIndex hidx;
    SSumIndex sidx;
    CycIndex cidx;
    Bound bound;  // sums only

    Word w;  // word integrals only
    bool formal_arg = true;
    Rational point = 0;  // used when !formal_arg

    static Functional harmonic(HarmonicIndex i, Bound b = Bound::of_n()) {
        i.validate();
        Functional f;
        f.kind = Kind::Harmonic;
        f.hidx = std::move(i);
        f.bound = b;
        return f;
    }
    static Functional ssum(SSumIndex i, Bound b = Bound::of_n()) {
        i.validate();
        Functional f;
        f.kind = Kind::SSum;
        f.sidx = std::move(i);
        f.bound = b;
        return f;
    }
    static Functional cyc(CycIndex i, Bound b = Bound::of_n()) {
        i.validate();
        Functional f;
        f.kind = Kind::Cyc;
        f.cidx = std::move(i);
        f.bound = b;
        return f;
    }
    static Functional word(Word ww) {
        Functional f;
        f.kind = Kind::Word;
        f.w = std::move(ww);
        return f;
    }
    static Functional word_at(Word ww, const Rational& p) {
        if (p == 1)
            throw DomainError("word integral at 1 is a constant; use fold_word_at_one");
        Functional f;
        f.kind = Kind::Word;
        f.w = std::move(ww);
        f.formal_arg = false;
        f.point = p;
        return f;
    }

    unsigned weight() const {
        switch (kind) {
            case Kind::Harmonic: return hidx.weight();
            case Kind::SSum: return sidx.weight();
            case Kind::Cyc: return cidx.weight();
            case Kind::Word: return unsigned(w.size());
        }
        return 0;
    }
    unsigned depth() const {
        switch (kind) {
            case Kind::Harmonic: return hidx.depth();
            case Kind::SSum: return sidx.depth();
            case Kind::Cyc: return cidx.depth();
            case Kind::Word: {
                unsigned d = 0;
                for (const auto& l : w)
                    if (!l.is_zero()) ++d;
                return d;
            }
        }
        return 0;
    }

    friend bool operator==(const Functional&, const Functional&) = default;
    friend bool operator<(const Functional& f, const Functional& g) {
        if (f.kind != g.kind) return int(f.kind) < int(g.kind);
        switch (f.kind) {
            case Kind::Harmonic:
                return std::tie(f.hidx.a, f.bound) < std::tie(g.hidx.a, g.bound);
            case Kind::SSum:
                if (f.sidx == g.sidx) return f.bound < g.bound;
                return f.sidx < g.sidx;
            case Kind::Cyc:
                if (f.cidx == g.cidx) return f.bound < g.bound;
                return f.cidx < g.cidx;
            case Kind::Word:
                if (f.w != g.w)
                    return std::lexicographical_compare(f.w.begin(), f.w.end(), g.w.begin(),
                                                        g.w.end());
                if (f.formal_arg != g.formal_arg) return g.formal_arg;
                return f.point < g.point;
        }
        return false;
    }
};

// --------------------------------------------------------------------------
// Terms and expressions

struct Term {
    std::map<ConstantSymbol, unsigned> consts;  // symbol -> power >= 1
    std::vector<Functional> funcs;              // sorted

    bool is_unit() const { return consts.empty() && funcs.empty(); }

    unsigned weight() const {
        unsigned w = 0;
        for (const auto& [c, p] : consts) w += c.weight() * p;
        for (const auto& f : funcs) w += f.weight();
        return w;
    }
    unsigned degree() const {
        unsigned d = unsigned(funcs.size());
        for (const auto& [c, p] : consts) d += p;
        return d;
    }
    unsigned depth() const {
        unsigned d = 0;
        for (const auto& f : funcs) d += f.depth();
        return d;
    }

    void push(const ConstantSymbol& c, unsigned power = 1) {
        if (power) consts[c] += power;
    }
    void push(Functional f) {
        auto it = std::upper_bound(funcs.begin(), funcs.end(), f);
        funcs.insert(it, std::move(f));
    }

    static Term unit() { return {}; }
    static Term of(Functional f) {
        Term t;
        t.push(std::move(f));
        return t;
    }
    static Term of(const ConstantSymbol& c, unsigned power = 1) {
        Term t;
        t.push(c, power);
        return t;
    }

    Term operator*(const Term& o) const {
        Term t = *this;
        for (const auto& [c, p] : o.consts) t.consts[c] += p;
        for (const auto& f : o.funcs) t.push(f);
        return t;
    }

    friend bool operator==(const Term&, const Term&) = default;
};

// B_0..B_n by the defining recurrence; orders stay tiny here
inline Rational bernoulli_number(unsigned n) {
    static std::vector<Rational> cache{Rational(1)};
    static std::mutex guard;
    std::lock_guard<std::mutex> lock(guard);
    while (cache.size() <= n) {
        const unsigned k = unsigned(cache.size());
        Rational s(0);
        for (unsigned j = 0; j < k; ++j) s += Rational(binomial(k + 1, j)) * cache[j];
        cache.push_back(-s / Rational(int(k) + 1));
    }
    return cache[n];
}

// zeta(2k) = (-1)^{k+1} B_{2k} (2 pi)^{2k} / (2 (2k)!), a rational multiple
// of pi^{2k}, so a product of even zetas collapses onto the single even zeta
// of the combined weight (zeta_2^2 = 5/2 zeta_4 and friends). Keeping terms
// in that shape makes identities close by cancellation instead of leaving
// pairs like zeta_2^2 vs zeta_4 side by side. Returns the rational factor
// the rewrite produces.
inline Rational fold_even_zetas(Term& t) {
    unsigned total = 0, count = 0;
    for (const auto& [c, p] : t.consts)
        if (c.tag == ConstantSymbol::Tag::Zeta && c.k % 2 == 0) {
            total += c.k * p;
            count += p;
        }
    if (count < 2) return Rational(1);
    auto pi_ratio = [](unsigned n) {  // zeta(n) / pi^n for even n
        Rational r = bernoulli_number(n) * qpow(Rational(2), (long long)n) /
                     (Rational(2) * Rational(factorial(n)));
        if ((n / 2) % 2 == 0) r = -r;
        return r;
    };
    Rational factor(1);
    for (auto it = t.consts.begin(); it != t.consts.end();) {
        if (it->first.tag == ConstantSymbol::Tag::Zeta && it->first.k % 2 == 0) {
            factor *= qpow(pi_ratio(it->first.k), (long long)it->second);
            it = t.consts.erase(it);
        } else {
            ++it;
        }
    }
    factor /= pi_ratio(total);
    t.consts[ConstantSymbol::zeta(total)] += 1;
    return factor;
}

struct TermLess {
    bool operator()(const Term& x, const Term& y) const {
        unsigned wx = x.weight(), wy = y.weight();
        if (wx != wy) return wx < wy;
        unsigned gx = x.degree(), gy = y.degree();
        if (gx != gy) return gx > gy;
        unsigned dx = x.depth(), dy = y.depth();
        if (dx != dy) return dx > dy;
        if (x.funcs != y.funcs)
            return std::lexicographical_compare(x.funcs.begin(), x.funcs.end(), y.funcs.begin(),
                                                y.funcs.end());
        return x.consts < y.consts;
    }
};

struct Expr {
    std::map<Term, Rational, TermLess> terms;

    static Expr zero() { return {}; }
    static Expr constant(const Rational& q) {
        Expr e;
        if (q != 0) e.terms[Term::unit()] = q;
        return e;
    }
    static Expr of(Term t, const Rational& coeff = 1) {
        Expr e;
        e.add(std::move(t), coeff);
        return e;
    }
    static Expr of(Functional f, const Rational& coeff = 1) {
        return of(Term::of(std::move(f)), coeff);
    }

    bool is_zero() const { return terms.empty(); }

    void add(Term t, const Rational& c) {
        if (c == 0) return;
        const Rational cc = c * fold_even_zetas(t);
        auto [it, fresh] = terms.emplace(std::move(t), cc);
        if (!fresh) {
            it->second += cc;
            if (it->second == 0) terms.erase(it);
        }
    }

    Expr& operator+=(const Expr& o) {
        for (const auto& [t, c] : o.terms) add(t, c);
        return *this;
    }
    Expr& operator-=(const Expr& o) {
        for (const auto& [t, c] : o.terms) add(t, -c);
        return *this;
    }
    Expr& operator*=(const Rational& q) {
        if (q == 0) {
            terms.clear();
            return *this;
        }
        for (auto& [t, c] : terms) c *= q;
        return *this;
    }

    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator*(Expr a, const Rational& q) { return a *= q; }
    friend Expr operator*(const Rational& q, Expr a) { return a *= q; }
    friend Expr operator-(Expr a) { return a *= Rational(-1); }

    // Plain commutative product of monomials; no shuffle/stuffle expansion.
    friend Expr operator*(const Expr& a, const Expr& b) {
        Expr out;
        for (const auto& [ta, ca] : a.terms)
            for (const auto& [tb, cb] : b.terms) out.add(ta * tb, ca * cb);
        return out;
    }

    friend bool operator==(const Expr&, const Expr&) = default;

    unsigned max_weight() const {
        unsigned w = 0;
        for (const auto& [t, c] : terms) w = std::max(w, t.weight());
        return w;
    }
};

// Preferred spelling of a sum functional: S-sums with +-1 weights fold to
// harmonic indices, as do cyclotomic sums whose every level is (1,0,c,s).
inline Functional fold_sum_spelling(const Functional& f) {
    if (f.kind == Functional::Kind::SSum) {
        HarmonicIndex h;
        if (as_harmonic(f.sidx, h)) return Functional::harmonic(std::move(h), f.bound);
    }
    if (f.kind == Functional::Kind::Cyc) {
        std::vector<int> a;
        for (const auto& l : f.cidx.levels) {
            if (l.a != 1 || l.b != 0) return f;
            a.push_back(l.s * int(l.c));
        }
        return Functional::harmonic(HarmonicIndex{std::move(a)}, f.bound);
    }
    return f;
}

// Normal form: word integrals at fixed points 0 and 1 become rationals and
// constant symbols, sums take their preferred spelling. Throws DomainError
// on divergent placements.
inline Expr canonicalize(const Expr& e) {
    Expr out;
    for (const auto& [t, c] : e.terms) {
        Term nt;
        Rational nc = c;
        nt.consts = t.consts;
        bool vanished = false;
        for (const auto& f : t.funcs) {
            if (f.kind == Functional::Kind::Word && !f.formal_arg) {
                if (f.point == 1) {
                    auto [q, sym] = fold_word_at_one(f.w);
                    nc *= q;
                    if (nc == 0) {
                        vanished = true;
                        break;
                    }
                    if (sym) nt.push(*sym);
                    continue;
                }
                if (f.point == 0) {
                    if (f.w.empty()) continue;  // empty integral is 1
                    bool all_zero = true;
                    for (const auto& l : f.w)
                        if (!l.is_zero()) all_zero = false;
                    if (all_zero) throw DomainError("word of zeros diverges at 0");
                    vanished = true;  // H_w(0) = 0 once any letter is nonzero
                    break;
                }
            }
            if (f.kind == Functional::Kind::Word && f.w.empty()) continue;  // H_{}(x) = 1
            if (f.kind == Functional::Kind::Harmonic && f.hidx.a.empty()) continue;
            if (f.kind == Functional::Kind::SSum && f.sidx.a.empty()) continue;
            nt.push(fold_sum_spelling(f));
        }
        if (!vanished) out.add(nt, nc);
    }
    return out;
}

}  // namespace nestsum
