#pragma once

// Floating-point evaluation: words on (0,1), constants, sums at complex N,
// Mellin representations by quadrature, and contour inversion. Everything
// runs at 50-digit working floats; requested precision is tracked as an
// absolute tolerance and every result carries an error estimate. The
// estimates are forward bounds (truncation tails plus quadrature residuals),
// not certified enclosures; callers wanting a certificate rerun at higher
// target and compare.

#include "oracle.hpp"
#include "relations.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace nestsum {

using Real = boost::multiprecision::cpp_bin_float_50;
using Complex = boost::multiprecision::cpp_complex_50;

namespace detail {

inline const Real& pi_v() {
    static const Real p = atan(Real(1)) * 4;
    return p;
}

inline const Real& ln2_v() {
    static const Real l = log(Real(2));
    return l;
}

inline Real to_real(const BigInt& n) { return Real(n); }
inline Real to_real(const Rational& q) { return Real(num(q)) / Real(den(q)); }

}  // namespace detail

// Requested accuracy. `target` is what the caller wants; `guard` extra digits
// absorb cancellation along the way. working() is capped well under the
// 50-digit float so the arithmetic itself never becomes the bottleneck.
struct Precision {
    unsigned target = 16;
    unsigned guard = 10;

    unsigned working() const { return target + guard; }

    void validate() const {
        if (target < 1 || target > 32)
            throw DomainError("precision target must be between 1 and 32 digits");
        if (guard < 10) throw DomainError("fewer than 10 guard digits is not supported");
        if (working() > 42)
            throw DomainError("target plus guard exceeds the working float type");
    }

    Real eps() const { return pow(Real(10), -int(working())); }
};

struct Evaluated {
    Real value;
    Real error;  // estimated absolute error, not a certified bound
};

struct EvaluatedC {
    Complex value;
    Real error;
};

// Continuation branch for (-1)^N at non-integer N: the even and odd
// interpolations differ, so alternating quantities require the caller to
// choose. Integer arguments decide for themselves.
enum class Parity { Even, Odd };

// Inversion contour: a ray pair C(z) = c + z e^{+-i phi}, z >= 0, with
// pi/2 < phi < pi so that x^{-C} decays along it. Zero z_max or nodes means
// "choose adaptively".
struct Contour {
    Real c = Real(3) / 2;
    Real phi = detail::pi_v() * 3 / 4;
    Real z_max = 0;
    unsigned nodes = 0;
};

namespace detail {

// Deterministic reduction: fixed pairing tree, independent of value order.
template <class V>
V pairwise_sum(std::vector<V>& xs) {
    if (xs.empty()) return V(0);
    for (size_t width = 1; width < xs.size(); width *= 2)
        for (size_t i = 0; i + width < xs.size(); i += 2 * width) xs[i] += xs[i + width];
    return xs[0];
}

struct QuadRule {
    std::vector<Real> x, w;
};

// Gauss-Legendre nodes by Newton on P_n from the Chebyshev estimate.
// Converges to full working precision in a handful of steps.
inline const QuadRule& gl_rule(unsigned n) {
    static std::map<unsigned, QuadRule> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (unsigned i = 0; i < (n + 1) / 2; ++i) {
        Real x = cos(pi_v() * (Real(i) + Real(3) / 4) / (Real(n) + Real(1) / 2));
        Real dp = 1;
        for (int step = 0; step < 60; ++step) {
            Real p0 = 1, p1 = x;
            for (unsigned k = 2; k <= n; ++k) {
                Real p2 = ((2 * int(k) - 1) * x * p1 - (int(k) - 1) * p0) / int(k);
                p0 = p1;
                p1 = p2;
            }
            dp = int(n) * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) < Real("1e-46")) break;
        }
        Real w = 2 / ((1 - x * x) * dp * dp);
        r.x[i] = -x;
        r.w[i] = w;
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

template <class V, class F>
V apply_rule(const QuadRule& r, F&& f, const Real& lo, const Real& hi) {
    const Real mid = (lo + hi) / 2, half = (hi - lo) / 2;
    std::vector<V> vals(r.x.size());
    for (size_t i = 0; i < r.x.size(); ++i) {
        vals[i] = f(mid + half * r.x[i]);
        vals[i] *= r.w[i] * half;
    }
    return pairwise_sum(vals);
}

// Composite Gauss-Legendre with dyadic refinement. A panel is accepted when
// its 16- and 32-point values agree within the panel's share of the budget
// (proportional to width) or within a flat floor of the budget. The floor is
// what terminates refinement towards an integrable endpoint singularity,
// where delta and the proportional share shrink at the same 2^-depth rate
// and would otherwise race each other into the floating-point ulp; accepted
// deltas are summed into the error estimate either way, so the caller sees
// the true residual even if many panels land on the floor.
template <class V, class F>
V adaptive_quad(F&& f, const Real& a, const Real& b, const Real& abs_eps, Real& err_out) {
    struct Panel {
        Real a, b;
        unsigned depth;
    };
    const Real total = b - a;
    const QuadRule& fine = gl_rule(32);
    const QuadRule& coarse = gl_rule(16);
    std::vector<Panel> todo{{a, b, 0}};
    std::vector<V> parts;
    err_out = 0;
    size_t panels = 0;
    while (!todo.empty()) {
        Panel p = todo.back();
        todo.pop_back();
        if (++panels > 100000) throw ResourceGuard("quadrature panel budget exhausted");
        V hi = apply_rule<V>(fine, f, p.a, p.b);
        V lo = apply_rule<V>(coarse, f, p.a, p.b);
        const Real delta = abs(hi - lo);
        if (delta <= abs_eps * ((p.b - p.a) / total) || delta <= abs_eps / 1024 ||
            p.depth >= 220) {
            parts.push_back(hi);
            err_out += delta;
        } else {
            const Real m = (p.a + p.b) / 2;
            todo.push_back({m, p.b, p.depth + 1});
            todo.push_back({p.a, m, p.depth + 1});
        }
    }
    return pairwise_sum(parts);
}

template <class V, class F>
V fixed_quad(F&& f, const Real& a, const Real& b, unsigned nodes, Real& err_out) {
    if (nodes < 4 || nodes > 512) throw DomainError("fixed rules take 4..512 nodes");
    V hi = apply_rule<V>(gl_rule(nodes), f, a, b);
    V lo = apply_rule<V>(gl_rule(nodes / 2), f, a, b);
    err_out = abs(hi - lo);
    return hi;
}

// Phi_k coefficients, constant term first. x^k - 1 stripped of the proper
// cyclotomic divisors; all divisions are exact and monic.
inline std::vector<long long> cyclotomic_coeffs_impl(unsigned k) {
    std::vector<long long> p(k + 1, 0);
    p[0] = -1;
    p[k] = 1;
    for (unsigned d = 1; d < k; ++d) {
        if (k % d) continue;
        const std::vector<long long> q = cyclotomic_coeffs_impl(d);
        std::vector<long long> out(p.size() - q.size() + 1, 0);
        std::vector<long long> rem = p;
        for (size_t i = out.size(); i-- > 0;) {
            const long long c = rem[i + q.size() - 1];
            out[i] = c;
            for (size_t j = 0; j < q.size(); ++j) rem[i + j] -= c * q[j];
        }
        p = std::move(out);
    }
    return p;
}

inline const std::vector<long long>& cyclotomic_coeffs(unsigned k) {
    static std::map<unsigned, std::vector<long long>> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    return cache.emplace(k, cyclotomic_coeffs_impl(k)).first->second;
}

// Integrand factor contributed by one letter.
inline Real letter_weight(const Letter& l, const Real& t) {
    switch (l.kind) {
        case Letter::Kind::Core: {
            const int v = l.core_value();
            if (v == 0) return 1 / t;
            if (v == 1) return 1 / (1 - t);
            return 1 / (1 + t);
        }
        case Letter::Kind::Generalized: {
            const Real aa = to_real(abs(l.a));
            return 1 / (l.a > 0 ? aa - t : aa + t);
        }
        case Letter::Kind::Cyclotomic: {
            const auto& c = cyclotomic_coeffs(l.cyc_k);
            Real phi = 0;
            for (size_t j = c.size(); j-- > 0;) phi = phi * t + c[j];
            return pow(t, int(l.cyc_l)) / phi;
        }
    }
    throw NumericError("unreachable");
}

// ---------------------------------------------------------------------------
// Power series of words without trailing zeros.
//
// Each nesting level converts the coefficient stream of its inner word into
// its own by one integration step; the per-level state is what the letter's
// measure needs and nothing more, so memory stays O(depth):
//   0        c_n = in_n / n
//   1        c_n = (sum_{k<n} in_k) / n
//   -1       c_n = e_{n-1} / n,   e_m = in_m - e_{m-1}
//   gen a    c_n = d_{n-1} / n,   d_m = (sign(a)/|a|) d_{m-1} + in_m / |a|
//   cyc k,l  c_n = d_{n-1} / n,   sum_j Phi_j d_{m-j} = in_{m-l}
// The innermost level is fed the unit stream 1, 0, 0, ... Levels run in
// lockstep over n, inner to outer; only the letter 0 reads the same-n input,
// which that ordering provides.

struct SeriesLevel {
    enum class K { Zero, One, MinusOne, Gen, Cyc } kind = K::Zero;
    Real ratio = 0;   // Gen: sign(a)/|a|
    Real inv_a = 0;   // Gen: 1/|a|
    std::vector<Real> phi;  // Cyc: Phi_k, constant term first
    unsigned lag = 0;       // Cyc: numerator power l
    Real aux = 0;
    std::deque<Real> dhist;   // Cyc: d_{m-1}, d_{m-2}, ...
    std::deque<Real> inhist;  // Cyc: in_{m-1}, in_{m-2}, ...
};

inline SeriesLevel make_level(const Letter& l) {
    SeriesLevel s;
    switch (l.kind) {
        case Letter::Kind::Core: {
            const int v = l.core_value();
            s.kind = v == 0   ? SeriesLevel::K::Zero
                     : v == 1 ? SeriesLevel::K::One
                              : SeriesLevel::K::MinusOne;
            break;
        }
        case Letter::Kind::Generalized:
            s.kind = SeriesLevel::K::Gen;
            s.inv_a = 1 / to_real(abs(l.a));
            s.ratio = l.a > 0 ? s.inv_a : -s.inv_a;
            break;
        case Letter::Kind::Cyclotomic: {
            s.kind = SeriesLevel::K::Cyc;
            const auto& c = cyclotomic_coeffs(l.cyc_k);
            s.phi.assign(c.begin(), c.end());
            s.lag = l.cyc_l;
            break;
        }
    }
    return s;
}

inline Real word_series(const Word& u, const Real& x, const Real& abs_eps, Real& err) {
    std::vector<SeriesLevel> lv;
    lv.reserve(u.size());
    for (const Letter& l : u) lv.push_back(make_level(l));

    // Coefficients vanish below the first support point and, for cyclotomic
    // letters, between consecutive support points (runs of a-1 zeros), so the
    // small-term counter must outlive both kinds of gap.
    unsigned long long lead = 8;
    unsigned calm_need = 3;
    for (const Letter& l : u) {
        if (l.kind == Letter::Kind::Cyclotomic) {
            lead += l.a + l.b + 1;
            calm_need = std::max(calm_need, l.a + 2);
        } else {
            lead += 1;
        }
    }

    Real val = 0, xn = 1;
    const Real geo = 1 / (1 - x);
    unsigned calm = 0;
    for (unsigned long long n = 0;; ++n) {
        if (n > 2000000) throw ResourceGuard("series did not settle within the term budget");
        Real in = n == 0 ? Real(1) : Real(0);
        for (size_t i = lv.size(); i-- > 0;) {
            SeriesLevel& L = lv[i];
            Real out = 0;
            switch (L.kind) {
                case SeriesLevel::K::Zero:
                    if (n) out = in / n;
                    break;
                case SeriesLevel::K::One:
                    if (n) out = L.aux / n;
                    L.aux += in;
                    break;
                case SeriesLevel::K::MinusOne:
                    if (n) out = L.aux / n;
                    L.aux = in - L.aux;
                    break;
                case SeriesLevel::K::Gen:
                    if (n) out = L.aux / n;
                    L.aux = L.ratio * L.aux + L.inv_a * in;
                    break;
                case SeriesLevel::K::Cyc: {
                    if (n && !L.dhist.empty()) out = L.dhist.front() / n;
                    Real lagged = 0;
                    if (L.lag == 0)
                        lagged = in;
                    else if (L.inhist.size() >= L.lag)
                        lagged = L.inhist[L.lag - 1];
                    Real d = lagged;
                    for (size_t j = 0; j < L.dhist.size(); ++j) d -= L.phi[j + 1] * L.dhist[j];
                    d /= L.phi[0];
                    L.dhist.push_front(d);
                    if (L.dhist.size() >= L.phi.size()) L.dhist.pop_back();
                    if (L.lag) {
                        L.inhist.push_front(in);
                        if (L.inhist.size() > L.lag) L.inhist.pop_back();
                    }
                    break;
                }
            }
            in = out;
        }
        if (n) {
            const Real t = in * xn;
            val += t;
            const Real bound = abs(t) * geo;
            calm = bound < abs_eps ? calm + 1 : 0;
            if (calm >= 3 && n >= 8) {
                err = bound;
                break;
            }
        }
        xn *= x;
    }
    return val;
}

// ---------------------------------------------------------------------------
// Trailing zeros: H_{v 0^t} rewritten as sum_i c_i ln^{j_i}(x) H_{u_i}(x)
// with every u_i free of trailing zeros. Shuffling with the single letter 0
// gives ln x * H_{v 0^{t-1}} = t H_{v 0^t} + (insertions inside v), and the
// insertions keep t-1 trailing zeros, so recursion on t terminates.

struct LnPiece {
    Rational coeff;
    unsigned lnpow;
    Word word;
};

inline const std::vector<LnPiece>& ln_pieces(const Word& w) {
    static std::map<Word, std::vector<LnPiece>> cache;
    static std::recursive_mutex mx;
    std::lock_guard<std::recursive_mutex> lock(mx);
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;

    std::vector<LnPiece> out;
    size_t t = 0;
    while (t < w.size() && w[w.size() - 1 - t].is_zero()) ++t;
    if (t == 0) {
        out.push_back({Rational(1), 0, w});
    } else {
        std::map<std::pair<unsigned, Word>, Rational> acc;
        const Rational inv_t = Rational(1) / Rational((long long)t);
        Word shorter(w.begin(), w.end() - 1);
        for (const LnPiece& p : ln_pieces(shorter))
            acc[{p.lnpow + 1, p.word}] += p.coeff * inv_t;
        const Word v(w.begin(), w.end() - (long)t);
        for (size_t pos = 0; pos < v.size(); ++pos) {
            Word ins;
            ins.reserve(w.size());
            ins.insert(ins.end(), v.begin(), v.begin() + (long)pos);
            ins.push_back(Letter::core(0));
            ins.insert(ins.end(), v.begin() + (long)pos, v.end());
            for (size_t j = 0; j + 1 < t; ++j) ins.push_back(Letter::core(0));
            for (const LnPiece& p : ln_pieces(ins)) acc[{p.lnpow, p.word}] -= p.coeff * inv_t;
        }
        for (auto& [key, c] : acc)
            if (c != 0) out.push_back({c, key.first, key.second});
    }
    return cache.emplace(w, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Word values on [0, 1). Routing:
//   x <= 1/2                series, always valid left of the nearest pole
//   x > 1/2, {0,1} word     argument swap to 1-x
//   x > 1/2, core word      split the path at 1/2 (t -> 1-t on the right part)
//   x > 1/2, otherwise      one quadrature level, series inside
// Everything lands on series pieces at arguments <= 1/2 except the last
// route, whose letters keep a series radius beyond x anyway.

inline Real word_value(const Word& w, const Real& x, const Real& abs_eps, Real& err);
inline Real const_value(const ConstantSymbol& c, const Real& abs_eps, Real& err);
inline Real expr_value_at_x(const Expr& e, const Real& x, const Real& abs_eps, Real& err);

// t -> 1-t on letters: dz/z <-> dz/(1-z), dz/(1+z) -> dz/(2-z), and on the
// generalized letter with anchor a, 1/(a-t) -> 1/((a-1)+t), i.e. a -> 1-a
// (both orientations; the formula is its own inverse).
inline Letter half_tau(const Letter& l) {
    if (l.kind == Letter::Kind::Cyclotomic)
        throw DomainError("path reversal is not available for cyclotomic letters");
    if (l.kind == Letter::Kind::Generalized) return Letter::generalized(1 - l.a);
    const int v = l.core_value();
    if (v == 0) return Letter::core(1);
    if (v == 1) return Letter::core(0);
    return Letter::generalized(Rational(2));
}

// Smallest series radius over the letters: |a| for a generalized anchor,
// 1 for the core/cyclotomic denominators, zeros do not constrain.
inline Real word_radius(const Word& u) {
    Real r = 8;
    for (const Letter& l : u) {
        if (l.is_zero()) continue;
        Real s = 1;
        if (l.kind == Letter::Kind::Generalized) s = abs(to_real(l.a));
        if (s < r) r = s;
    }
    return r;
}

inline const Expr& one_minus_x_cached(const Word& u) {
    static std::map<Word, Expr> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);
    auto it = cache.find(u);
    if (it != cache.end()) return it->second;
    return cache.emplace(u, one_minus_x(u)).first->second;
}

// u nonempty, no trailing zeros.
inline Real stripped_value(const Word& u, const Real& x, const Real& abs_eps, Real& err) {
    static const Real half = Real(1) / 2;
    if (x <= half) return word_series(u, x, abs_eps, err);

    if (is_zero_one_word(u)) {
        const Expr& swapped = one_minus_x_cached(u);
        return expr_value_at_x(swapped, 1 - x, abs_eps, err);
    }

    if (is_core_word(u)) {
        // Path composition at 1/2. The right part [1/2, x] maps under
        // t -> 1-t to words over {0, 1, gen 2} on [y, 1/2], y = 1-x, and
        // those tails satisfy a triangular system against values at 1/2:
        //   I(v) = H_v(1/2) - sum_{v = p q, q nonempty} I(p) H_q(y).
        const Real y = 1 - x;
        const size_t n = u.size();
        Word pn(n);
        for (size_t i = 0; i < n; ++i) pn[i] = half_tau(u[n - 1 - i]);

        err = 0;
        std::map<std::pair<size_t, size_t>, Real> tails;  // (start, len) in pn
        std::function<Real(size_t, size_t)> tail = [&](size_t s, size_t len) -> Real {
            if (len == 0) return Real(1);
            auto it = tails.find({s, len});
            if (it != tails.end()) return it->second;
            Real e = 0;
            const Word v(pn.begin() + (long)s, pn.begin() + (long)(s + len));
            Real acc = word_value(v, half, abs_eps, e);
            err += e;
            for (size_t m = 0; m < len; ++m) {
                const Word q(pn.begin() + (long)(s + m), pn.begin() + (long)(s + len));
                acc -= tail(s, m) * word_value(q, y, abs_eps, e);
                err += e;
            }
            tails.emplace(std::make_pair(s, len), acc);
            return acc;
        };

        std::vector<Real> parts;
        for (size_t j = 0; j <= n; ++j) {
            Real e = 0;
            const Word suffix(u.begin() + (long)j, u.end());
            parts.push_back(tail(n - j, j) * word_value(suffix, half, abs_eps, e));
            err += e;
        }
        return pairwise_sum(parts);
    }

    // Mixed alphabets. Inside the least letter radius the series still
    // converges; generalized anchors beyond 1 keep it geometric even as
    // x -> 1, so only unit-radius letters crammed against 1 fall through.
    const Real radius = word_radius(u);
    if (x < radius && (radius > 1 || x <= Real(24) / 25))
        return word_series(u, x, abs_eps, err);

    // Outermost letter by quadrature; the rest by series, valid since every
    // generalized pole was screened out up front and all other letters keep
    // radius >= 1.
    const Word rest(u.begin() + 1, u.end());
    auto integrand = [&](const Real& t) -> Real {
        Real v = 0;
        for (const LnPiece& p : ln_pieces(rest)) {
            Real e = 0;
            Real piece = p.word.empty() ? Real(1) : word_series(p.word, t, abs_eps, e);
            if (p.lnpow) piece *= pow(log(t), int(p.lnpow));
            v += to_real(p.coeff) * piece;
        }
        return letter_weight(u.front(), t) * v;
    };
    Real qerr = 0;
    const Real val = adaptive_quad<Real>(integrand, Real(0), x, abs_eps, qerr);
    err = qerr + abs_eps;
    return val;
}

inline Real word_value(const Word& w, const Real& x, const Real& abs_eps, Real& err) {
    if (x < 0 || x >= 1) throw DomainError("word evaluation needs 0 <= x < 1");
    err = 0;
    if (w.empty()) return Real(1);
    bool all_zero = true;
    for (const Letter& l : w) {
        all_zero = all_zero && l.is_zero();
        if (l.kind == Letter::Kind::Generalized && l.a > 0 && l.a < 1 && to_real(l.a) <= x)
            throw DomainError("argument reaches a generalized-letter singularity");
    }
    if (x == 0) {
        if (all_zero) throw DomainError("pure log words diverge at x = 0");
        return Real(0);
    }

    static std::map<std::pair<Word, Real>, std::pair<Real, Real>> cache;
    static std::mutex mx;
    {
        std::lock_guard<std::mutex> lock(mx);
        auto it = cache.find({w, x});
        if (it != cache.end() && it->second.second <= abs_eps) {
            err = it->second.second;
            return it->second.first;
        }
    }

    const Real lx = log(x);
    std::vector<Real> parts;
    for (const LnPiece& p : ln_pieces(w)) {
        Real e = 0;
        Real piece = p.word.empty() ? Real(1) : stripped_value(p.word, x, abs_eps, e);
        Real scale = to_real(p.coeff);
        if (p.lnpow) scale *= pow(lx, int(p.lnpow));
        parts.push_back(scale * piece);
        err += abs(scale) * e;
    }
    const Real val = pairwise_sum(parts);

    std::lock_guard<std::mutex> lock(mx);
    if (cache.size() < 400000) cache[{w, x}] = {val, err};
    return val;
}

// H_u(1) for convergent words over core and generalized letters, by a path
// split at t0: H_u(1) = sum_{u = p q} H_{tau(rev p)}(1 - t0) H_q(t0).
// Core words split at 1/2; a generalized anchor a pulls t0 so that both the
// source radius (|a|, 1 for core) and the image radius (|1-a|, 2 for core -1)
// stay out of reach of their series arguments.
inline Real hoelder_at_one(const Word& u, const Real& abs_eps, Real& err) {
    require_convergent_at_one(u);
    for (const Letter& l : u)
        if (l.kind == Letter::Kind::Cyclotomic)
            throw DomainError("values at 1 are provided for core and generalized alphabets");
    static const Real half = Real(1) / 2;
    const Real r_src = word_radius(u);
    Word image(u.size());
    for (size_t i = 0; i < u.size(); ++i) image[i] = half_tau(u[i]);
    const Real r_img = word_radius(image);
    Real t0 = 1 - r_img / 2;
    if (t0 < half) t0 = half;
    const Real t0_max = r_src * 31 / 32;
    if (t0 > t0_max) t0 = t0_max;
    if (t0 <= 0 || 1 - t0 >= r_img)
        throw DomainError("word has no path split convergent on both sides of 1");

    err = 0;
    std::vector<Real> parts;
    for (size_t j = 0; j <= u.size(); ++j) {
        Word p(j);
        for (size_t i = 0; i < j; ++i) p[i] = half_tau(u[j - 1 - i]);
        const Word q(u.begin() + (long)j, u.end());
        Real e1 = 0, e2 = 0;
        parts.push_back(word_value(p, 1 - t0, abs_eps, e1) * word_value(q, t0, abs_eps, e2));
        err += e1 + e2;
    }
    return pairwise_sum(parts);
}

// ---------------------------------------------------------------------------
// Constants.

inline Real zeta_em(unsigned k, const Real& abs_eps) {
    // Euler-Maclaurin from the anchor M: terms fall like ((k+2i)/(2 pi M))^{2i}.
    const unsigned M = 40;
    std::vector<Real> parts;
    for (unsigned j = 1; j < M; ++j) parts.push_back(pow(Real(j), -int(k)));
    Real s = pairwise_sum(parts);
    const Real Mr = M;
    s += pow(Mr, 1 - int(k)) / (int(k) - 1) + pow(Mr, -int(k)) / 2;
    Real poch = int(k);
    Real mpow = pow(Mr, -int(k) - 1);
    for (unsigned i = 1; i <= 80; ++i) {
        const Real term = to_real(bernoulli_number(2 * i)) / to_real(factorial(2 * i)) * poch * mpow;
        s += term;
        if (abs(term) < abs_eps / 10) break;
        poch *= Real(int(k) + 2 * int(i) - 1) * Real(int(k) + 2 * int(i));
        mpow /= Mr * Mr;
    }
    return s;
}

inline const Real& euler_gamma_v() {
    static const Real g = [] {
        const unsigned M = 64;
        Real s = to_real(eval_hsum_exact(HarmonicIndex{{1}}, M)) - log(Real(M)) -
                 Real(1) / (2 * int(M));
        Real mpow = Real(1) / (int(M) * int(M));
        for (unsigned k = 1; k <= 40; ++k) {
            const Real term = to_real(bernoulli_number(2 * k)) / (2 * int(k)) * mpow;
            s += term;
            if (abs(term) < Real("1e-55")) break;
            mpow /= int(M) * int(M);
        }
        return s;
    }();
    return g;
}

// Alternating series sum_{k>=0} (-1)^k a_k by Chebyshev-polynomial
// acceleration; n terms give roughly n/1.31 digits.
template <class A>
Real cvz_alternating(A a, unsigned digits) {
    const unsigned n = unsigned(1.31 * digits) + 3;
    Real d = pow(3 + 2 * sqrt(Real(2)), int(n));
    d = (d + 1 / d) / 2;
    Real b = -1, c = -d, s = 0;
    for (unsigned k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b *= (Real(k) + n) * (Real(k) - int(n)) / ((Real(k) + Real(1) / 2) * (Real(k) + 1));
    }
    return s / d;
}

inline const Real& catalan_v() {
    static const Real c = cvz_alternating(
        [](unsigned k) {
            const Real m = 2 * int(k) + 1;
            return 1 / (m * m);
        },
        50);
    return c;
}

inline Real li_half(unsigned k, const Real& abs_eps) {
    Real s = 0, p = 1;
    for (unsigned n = 1; n <= 400; ++n) {
        p /= 2;
        const Real term = p * pow(Real(n), -int(k));
        s += term;
        if (term < abs_eps / 4) break;
    }
    return s;
}

inline Real const_value(const ConstantSymbol& c, const Real& abs_eps, Real& err) {
    static std::map<ConstantSymbol, std::pair<Real, Real>> cache;
    static std::mutex mx;
    {
        std::lock_guard<std::mutex> lock(mx);
        auto it = cache.find(c);
        if (it != cache.end() && it->second.second <= abs_eps) {
            err = it->second.second;
            return it->second.first;
        }
    }
    Real v = 0;
    err = abs_eps / 16;
    switch (c.tag) {
        case ConstantSymbol::Tag::Zeta: v = zeta_em(c.k, abs_eps / 16); break;
        case ConstantSymbol::Tag::Ln2: v = ln2_v(); err = Real("1e-48"); break;
        case ConstantSymbol::Tag::LiHalf: v = li_half(c.k, abs_eps / 16); break;
        case ConstantSymbol::Tag::Catalan: v = catalan_v(); err = Real("1e-48"); break;
        case ConstantSymbol::Tag::Pi: v = pi_v(); err = Real("1e-48"); break;
        case ConstantSymbol::Tag::Sigma0:
            throw DomainError("sigma0 marks a divergent value and cannot be evaluated");
        case ConstantSymbol::Tag::IPi:
            throw DomainError("ipi is imaginary; evaluate it in the complex plane");
        case ConstantSymbol::Tag::WordAtOne: {
            Real e = 0;
            v = hoelder_at_one(c.w, abs_eps / 4, e);
            err = e;
            break;
        }
    }
    std::lock_guard<std::mutex> lock(mx);
    if (cache.size() < 10000) cache[c] = {v, err};
    return v;
}

inline Complex const_value_c(const ConstantSymbol& c, const Real& abs_eps, Real& err) {
    if (c.tag == ConstantSymbol::Tag::IPi) {
        err = Real("1e-48");
        return Complex(0, pi_v());
    }
    return Complex(const_value(c, abs_eps, err));
}

// ---------------------------------------------------------------------------
// Expression values. Sums are rejected here: an Expr evaluated at a real x
// treats word functionals as functions of x (or of their pinned point) and
// everything else as a constant.

inline Real expr_value_at_x(const Expr& e, const Real& x, const Real& abs_eps, Real& err) {
    err = 0;
    std::vector<Real> parts;
    for (const auto& [t, coeff] : e.terms) {
        Real v = to_real(coeff);
        Real verr = 0;
        for (const auto& [sym, power] : t.consts) {
            Real ce = 0;
            const Real cv = const_value(sym, abs_eps, ce);
            for (unsigned i = 0; i < power; ++i) v *= cv;
            verr += ce * power;
        }
        for (const Functional& f : t.funcs) {
            if (f.kind != Functional::Kind::Word)
                throw DomainError("sums do not evaluate at a real argument");
            Real we = 0;
            const Real arg = f.formal_arg ? x : to_real(f.point);
            v *= word_value(f.w, arg, abs_eps, we);
            verr += we;
        }
        parts.push_back(v);
        err += verr + abs(v) * Real("1e-45");
    }
    return pairwise_sum(parts);
}

inline Complex expr_const_value_c(const Expr& e, const Real& abs_eps, Real& err) {
    err = 0;
    std::vector<Complex> parts;
    for (const auto& [t, coeff] : e.terms) {
        if (!t.funcs.empty()) throw DomainError("expected a closed constant, found a functional");
        Complex v = to_real(coeff);
        for (const auto& [sym, power] : t.consts) {
            Real ce = 0;
            const Complex cv = const_value_c(sym, abs_eps, ce);
            for (unsigned i = 0; i < power; ++i) v *= cv;
            err += ce * power;
        }
        parts.push_back(v);
    }
    return pairwise_sum(parts);
}

// ---------------------------------------------------------------------------
// Complex special functions for the continuation formulas. Arguments are
// shifted right until the asymptotic series applies; callers keep them off
// the nonpositive integers.

inline Complex cpow_int(const Complex& z, unsigned e) {
    Complex r = 1, b = z;
    while (e) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

inline Complex digamma_c(Complex z, const Real& abs_eps) {
    Complex acc = 0;
    while (z.real() < 40) {
        acc -= 1 / z;
        z += 1;
    }
    Complex res = log(z) - 1 / (2 * z);
    const Complex z2 = z * z;
    Complex p = z2;
    for (unsigned i = 1; i <= 60; ++i) {
        const Complex term = to_real(bernoulli_number(2 * i)) / (2 * int(i)) / p;
        res -= term;
        if (abs(term) < abs_eps / 10) break;
        p *= z2;
    }
    return acc + res;
}

inline Complex hurwitz_c(unsigned s, Complex a, const Real& abs_eps) {
    if (s < 2) throw DomainError("the Hurwitz tail is used for exponents >= 2");
    Complex acc = 0;
    while (a.real() < 40) {
        acc += 1 / cpow_int(a, s);
        a += 1;
    }
    const Complex am1 = 1 / cpow_int(a, s - 1);
    Complex res = am1 / (int(s) - 1) + am1 / a / 2;
    Real poch = int(s);
    Complex apow = am1 / (a * a);
    for (unsigned i = 1; i <= 60; ++i) {
        const Complex term = to_real(bernoulli_number(2 * i)) / to_real(factorial(2 * i)) * poch * apow;
        res += term;
        if (abs(term) < abs_eps / 10) break;
        poch *= Real(int(s) + 2 * int(i) - 1) * Real(int(s) + 2 * int(i));
        apow /= a * a;
    }
    return acc + res;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public entry points.

inline Evaluated eval_word(const Word& w, const Real& x, const Precision& p = {}) {
    p.validate();
    Real err = 0;
    const Real v = detail::word_value(w, x, p.eps(), err);
    return {v, err + p.eps()};
}

inline Evaluated eval_constant(const ConstantSymbol& c, const Precision& p = {}) {
    p.validate();
    Real err = 0;
    const Real v = detail::const_value(c, p.eps(), err);
    return {v, err + p.eps()};
}

inline EvaluatedC eval_constant_c(const ConstantSymbol& c, const Precision& p = {}) {
    p.validate();
    Real err = 0;
    const Complex v = detail::const_value_c(c, p.eps(), err);
    return {v, err + p.eps()};
}

// Words as functions of x, everything else constant.
inline Evaluated eval_expr_at_x(const Expr& e, const Real& x, const Precision& p = {}) {
    p.validate();
    Real err = 0;
    const Real v = detail::expr_value_at_x(e, x, p.eps(), err);
    return {v, err + p.eps()};
}

// Sums at integer N through the exact evaluator, constants numerically.
// Word functionals only contribute through their pinned points.
inline Evaluated eval_expr_at_N(const Expr& e, long long N, const Precision& p = {}) {
    p.validate();
    const Real eps = p.eps();
    Real err = 0;
    std::vector<Real> parts;
    for (const auto& [t, coeff] : e.terms) {
        Real v = detail::to_real(coeff);
        for (const auto& [sym, power] : t.consts) {
            Real ce = 0;
            const Real cv = detail::const_value(sym, eps, ce);
            for (unsigned i = 0; i < power; ++i) v *= cv;
            err += ce * power;
        }
        for (const Functional& f : t.funcs) {
            if (f.kind == Functional::Kind::Word) {
                if (f.formal_arg) throw DomainError("free word argument at integer N");
                Real we = 0;
                v *= detail::word_value(f.w, detail::to_real(f.point), eps, we);
                err += we;
            } else {
                v *= detail::to_real(eval_functional_exact(f, N));
            }
        }
        parts.push_back(v);
    }
    return {detail::pairwise_sum(parts), err + eps};
}

// Expressions built purely from constants (pinned words included); anything
// with a free argument is rejected.
inline Evaluated eval_expr_const(const Expr& e, const Precision& p = {}) {
    p.validate();
    const Real eps = p.eps();
    Real err = 0;
    std::vector<Real> parts;
    for (const auto& [t, coeff] : e.terms) {
        Real v = detail::to_real(coeff);
        for (const auto& [sym, power] : t.consts) {
            Real ce = 0;
            const Real cv = detail::const_value(sym, eps, ce);
            for (unsigned i = 0; i < power; ++i) v *= cv;
            err += ce * power;
        }
        for (const Functional& f : t.funcs) {
            if (f.kind != Functional::Kind::Word || f.formal_arg)
                throw DomainError("expression is not constant");
            Real we = 0;
            v *= detail::word_value(f.w, detail::to_real(f.point), eps, we);
            err += we;
        }
        parts.push_back(v);
    }
    return {detail::pairwise_sum(parts), err + eps};
}

// Quadrature value of a Mellin form at complex N with Re N > 0. Integer N
// fixes (-1)^N itself; anything alternating at non-integer N needs the
// parity choice. The contour argument is accepted for signature symmetry
// with the inversion routine and is not consulted.
inline EvaluatedC mellin_quad(const MellinForm& mf, const Complex& N, const Contour& = {},
                              const Precision& p = {}, std::optional<Parity> parity = {}) {
    p.validate();
    if (N.real() <= 0) throw DomainError("Mellin evaluation needs Re N > 0");
    const Real eps = p.eps();

    bool needs_sign = mf.alternating_sign;
    for (const auto& pc : mf.pieces)
        if (pc.pre == MellinPre::NegXNMinusOne) needs_sign = true;
    int sgn = 0;
    if (needs_sign) {
        const Real rr = round(N.real());
        const bool is_int = abs(N - Complex(rr)) < Real("1e-30") && rr >= 1;
        if (is_int)
            sgn = rr.convert_to<long long>() % 2 == 0 ? 1 : -1;
        else if (parity)
            sgn = *parity == Parity::Even ? 1 : -1;
        else
            throw DomainError("alternating continuation needs a parity choice");
    }

    const Real up = detail::to_real(mf.upper);
    const Real lup = log(up);
    auto integrand = [&](const Real& x) -> Complex {
        const Real lx = log(x);
        const Complex xN = exp(N * lx);
        const Complex xNm1 = exp((N - 1) * lx);
        std::vector<Complex> parts;
        parts.reserve(mf.pieces.size());
        for (const auto& pc : mf.pieces) {
            Complex pre;
            switch (pc.pre) {
                case MellinPre::XNMinusOne: pre = xN - 1; break;
                case MellinPre::NegXNMinusOne: pre = Real(sgn) * xN - 1; break;
                case MellinPre::XPowNMinusOne: pre = xNm1; break;
                case MellinPre::XPowN: pre = xN; break;
            }
            switch (pc.den) {
                case MellinDen::XMinusOne: pre /= x - 1; break;
                case MellinDen::XPlusOne: pre /= x + 1; break;
                case MellinDen::One: break;
            }
            Real nerr = 0;
            Complex v = pre * detail::expr_value_at_x(pc.num, x, eps, nerr);
            if (pc.logpow)
                v *= pow(lup - lx, int(pc.logpow)) / detail::to_real(factorial(pc.logpow));
            parts.push_back(v);
        }
        return detail::pairwise_sum(parts);
    };

    Real qerr = 0;
    Complex res = detail::adaptive_quad<Complex>(integrand, Real(0), up, eps, qerr);
    if (mf.alternating_sign) res *= -sgn;
    Real cerr = 0;
    res += detail::expr_const_value_c(mf.constant, eps, cerr);
    return {res, qerr + cerr + eps};
}

// Analytic continuation of a nested harmonic sum to complex N. Depth one in
// closed psi/Hurwitz form; deeper indices through their Mellin integrals.
inline EvaluatedC eval_sum_complex(const HarmonicIndex& idx, const Complex& N,
                                   const Precision& p = {}, std::optional<Parity> parity = {}) {
    p.validate();
    if (idx.a.empty()) throw DomainError("empty harmonic index");
    const Real eps = p.eps();

    const Real rr = round(N.real());
    const bool is_int = abs(N - Complex(rr)) < Real("1e-30");
    if (is_int && rr <= -1)
        throw DomainError("the continuation has poles at negative integers");
    std::optional<int> eps_sign;
    if (is_int)
        eps_sign = rr.convert_to<long long>() % 2 == 0 ? 1 : -1;
    else if (parity)
        eps_sign = *parity == Parity::Even ? 1 : -1;

    if (idx.a.size() == 1) {
        const int a = idx.a[0];
        const unsigned m = unsigned(a < 0 ? -a : a);
        if (a > 0) {
            if (m == 1)
                return {detail::euler_gamma_v() + detail::digamma_c(N + 1, eps), eps * 4};
            return {detail::zeta_em(m, eps) - detail::hurwitz_c(m, N + 1, eps), eps * 4};
        }
        if (!eps_sign)
            throw DomainError("alternating continuation needs a parity choice");
        const Real e = *eps_sign;
        if (m == 1) {
            const Complex v = -detail::ln2_v() +
                              e / 2 * (detail::digamma_c((N + 2) / 2, eps) -
                                       detail::digamma_c((N + 1) / 2, eps));
            return {v, eps * 4};
        }
        const Real eta = (1 - pow(Real(2), 1 - int(m))) * detail::zeta_em(m, eps);
        const Complex v = -eta + e * pow(Real(2), -int(m)) *
                                     (detail::hurwitz_c(m, (N + 1) / 2, eps) -
                                      detail::hurwitz_c(m, (N + 2) / 2, eps));
        return {v, eps * 4};
    }

    if (idx.weight() > 4)
        throw DomainError("deep continuations are provided through weight 4");
    const MellinForm mf = to_mellin(Functional::harmonic(idx));
    return mellin_quad(mf, N, Contour{}, p, parity);
}

// Contour inversion: f(x) = (1/pi) int_0^inf Im[e^{i phi} x^{-C(z)} M(C(z))] dz
// on the ray C(z) = c + z e^{i phi}. The conjugate ray contributes the complex
// conjugate, which is how the integrand reduces to an imaginary part. The
// integrand decays like exp(z cos(phi) ln(1/x)), so segments of fixed length
// are accumulated until one falls below tolerance.
inline Evaluated inverse_mellin(const std::function<Complex(const Complex&)>& M, const Real& x,
                                const Contour& cont = {}, const Precision& p = {}) {
    p.validate();
    if (!(x > 0 && x < 1)) throw DomainError("inversion needs 0 < x < 1");
    if (!(cont.phi > detail::pi_v() / 2 && cont.phi < detail::pi_v()))
        throw DomainError("the contour ray must point into the left half plane");
    const Real eps = p.eps();
    const Real cphi = cos(cont.phi), sphi = sin(cont.phi);
    const Complex eiphi(cphi, sphi);
    const Real lx = log(x);
    const Real rate = cphi * lx;  // > 0: decay constant along the ray

    auto g = [&](const Real& z) -> Real {
        const Complex C = Complex(cont.c) + z * eiphi;
        return (eiphi * exp(-C * lx) * M(C)).imag() / detail::pi_v();
    };

    std::vector<Real> segs;
    Real err = 0;
    if (cont.z_max > 0) {
        Real qerr = 0;
        segs.push_back(cont.nodes
                           ? detail::fixed_quad<Real>(g, Real(0), cont.z_max, cont.nodes, qerr)
                           : detail::adaptive_quad<Real>(g, Real(0), cont.z_max, eps, qerr));
        err += qerr + abs(g(cont.z_max)) / rate;  // unintegrated tail estimate
    } else {
        const Real L = 12 / rate;
        Real a = 0;
        Real prev = 0;
        for (unsigned s = 0;; ++s) {
            if (s >= 300) throw NumericError("the inversion contour did not decay");
            Real qerr = 0;
            const Real v = cont.nodes
                               ? detail::fixed_quad<Real>(g, a, a + L, cont.nodes, qerr)
                               : detail::adaptive_quad<Real>(g, a, a + L, eps / 8, qerr);
            segs.push_back(v);
            err += qerr;
            a += L;
            if (s >= 2 && abs(v) > 4 * abs(prev) && abs(v) > eps)
                throw NumericError("the transform grows along the contour ray");
            if (s >= 1 && abs(v) < eps / 4) {
                err += abs(v);
                break;
            }
            prev = v;
        }
    }
    return {detail::pairwise_sum(segs), err + eps};
}

}  // namespace nestsum
