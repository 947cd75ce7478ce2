#pragma once

// Products and bases. Shuffle acts on words, quasi-shuffle (stuffle) on sum
// indices; both are commutative and weight-additive. Lyndon words freely
// generate each algebra (Radford), which is what reduce_to_basis exploits:
// expand all weight-w Lyndon monomials, then invert the square system.
//
// Orders. Words use the letter order -1 < 0 < 1. Sum indices use the order
// "larger |a| first, negative before positive on ties":
//     -3 < 3 < -2 < 2 < -1 < 1
// which puts S[2,1] rather than S[1,2] into the weight-3 basis.

#include "expr.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace nestsum {

// --------------------------------------------------------------------------
// Shuffle

inline void shuffle_rec(const Word& u, size_t iu, const Word& v, size_t iv, Word& acc,
                        std::map<Word, Rational>& out) {
    if (iu == u.size() && iv == v.size()) {
        out[acc] += 1;
        return;
    }
    if (iu < u.size()) {
        acc.push_back(u[iu]);
        shuffle_rec(u, iu + 1, v, iv, acc, out);
        acc.pop_back();
    }
    if (iv < v.size()) {
        acc.push_back(v[iv]);
        shuffle_rec(u, iu, v, iv + 1, acc, out);
        acc.pop_back();
    }
}

inline std::map<Word, Rational> shuffle_words(const Word& u, const Word& v) {
    std::map<Word, Rational> out;
    Word acc;
    acc.reserve(u.size() + v.size());
    shuffle_rec(u, 0, v, 0, acc, out);
    return out;
}

// --------------------------------------------------------------------------
// Stuffle on S-sum index lists. Working representation: (exponent, weight)
// pairs; empty list is the unit.

namespace detail {

using SLevels = std::vector<std::pair<int, Rational>>;

// Quasi-shuffle recursion. The first two sums interleave the heads; the
// third removes the double-counted diagonal i = j, merging exponents and
// multiplying weights. Returns (coefficient, levels) pairs.
inline std::vector<std::pair<Rational, SLevels>> stuffle_signed(const SLevels& A,
                                                                const SLevels& B) {
    if (A.empty()) return {{1, B}};
    if (B.empty()) return {{1, A}};
    SLevels tailA(A.begin() + 1, A.end()), tailB(B.begin() + 1, B.end());
    std::vector<std::pair<Rational, SLevels>> out;
    auto emit = [&out](const std::pair<int, Rational>& head, const Rational& sign,
                       std::vector<std::pair<Rational, SLevels>>&& tails) {
        for (auto& [c, t] : tails) {
            SLevels w;
            w.reserve(t.size() + 1);
            w.push_back(head);
            w.insert(w.end(), t.begin(), t.end());
            out.emplace_back(sign * c, std::move(w));
        }
    };
    emit(A[0], 1, stuffle_signed(tailA, B));
    emit(B[0], 1, stuffle_signed(A, tailB));
    emit({A[0].first + B[0].first, A[0].second * B[0].second}, -1, stuffle_signed(tailA, tailB));
    return out;
}

inline SLevels to_levels(const SSumIndex& s) {
    SLevels l;
    for (size_t i = 0; i < s.a.size(); ++i) l.emplace_back(s.a[i], s.x[i]);
    return l;
}

inline Expr levels_to_expr(const std::vector<std::pair<Rational, SLevels>>& parts, Bound bound) {
    Expr e;
    for (const auto& [c, lv] : parts) {
        if (lv.empty()) {
            e.add(Term::unit(), c);
            continue;
        }
        std::vector<int> a;
        std::vector<Rational> x;
        for (const auto& [ai, xi] : lv) {
            a.push_back(ai);
            x.push_back(xi);
        }
        e.add(Term::of(fold_sum_spelling(Functional::ssum(SSumIndex{a, x}, bound))), c);
    }
    return e;
}

}  // namespace detail

// Quasi-shuffle product of two sums over the same bound. Harmonic indices are
// S-sums with +-1 weights; results fold back to the harmonic spelling when
// possible.
inline Expr stuffle_product(const Functional& f, const Functional& g) {
    auto as_levels = [](const Functional& h) -> detail::SLevels {
        if (h.kind == Functional::Kind::Harmonic) return detail::to_levels(as_ssum(h.hidx));
        if (h.kind == Functional::Kind::SSum) return detail::to_levels(h.sidx);
        throw DomainError("stuffle_product needs harmonic sums or S-sums");
    };
    if (!(f.bound == g.bound)) throw DomainError("stuffle needs a common bound");
    return detail::levels_to_expr(detail::stuffle_signed(as_levels(f), as_levels(g)), f.bound);
}

// --------------------------------------------------------------------------
// Cyclotomic stuffle. Diagonal denominators (a1 k + b1)^c1 (a2 k + b2)^c2
// merge by exponent addition when the linear factors agree, rescale when
// proportional, and otherwise split by exact partial fractions using
//     a1 (a2 k + b2) - a2 (a1 k + b1) = a1 b2 - a2 b1 =: D != 0.

namespace detail {

using CLevels = std::vector<CycLevel>;

// 1/(u^c1 v^c2) as sum of coeff/(u or v)^e; side 0 = u, side 1 = v.
inline void cyc_pfd(long long a1, long long a2, const Rational& invD, unsigned c1, unsigned c2,
                    const Rational& coeff, std::vector<std::pair<Rational, unsigned>>& u_out,
                    std::vector<std::pair<Rational, unsigned>>& v_out) {
    if (c1 == 0) {
        v_out.emplace_back(coeff, c2);
        return;
    }
    if (c2 == 0) {
        u_out.emplace_back(coeff, c1);
        return;
    }
    cyc_pfd(a1, a2, invD, c1, c2 - 1, coeff * a1 * invD, u_out, v_out);
    cyc_pfd(a1, a2, invD, c1 - 1, c2, coeff * (-a2) * invD, u_out, v_out);
}

// (coeff, level) pairs whose sum reproduces the product of the two level
// weights sign^k/(ak+b)^c at a common k.
inline std::vector<std::pair<Rational, CycLevel>> merge_cyc_levels(const CycLevel& p,
                                                                   const CycLevel& q) {
    int s = p.s * q.s;
    if (p.a == q.a && p.b == q.b) return {{1, CycLevel(p.a, p.b, p.c + q.c, s)}};
    if ((long long)p.a * q.b == (long long)q.a * p.b) {
        // proportional: (qa k + qb) = (qa/pa)(pa k + pb); keep the smaller a
        const CycLevel& keep = p.a < q.a ? p : q;
        const CycLevel& other = p.a < q.a ? q : p;
        Rational scale = qpow(Rational(keep.a) / other.a, other.c);
        return {{scale, CycLevel(keep.a, keep.b, p.c + q.c, s)}};
    }
    Rational D = Rational((long long)p.a * q.b - (long long)q.a * p.b);
    std::vector<std::pair<Rational, unsigned>> u_out, v_out;
    cyc_pfd(p.a, q.a, 1 / D, p.c, q.c, 1, u_out, v_out);
    std::vector<std::pair<Rational, CycLevel>> out;
    for (auto& [c, e] : u_out) out.emplace_back(c, CycLevel(p.a, p.b, e, s));
    for (auto& [c, e] : v_out) out.emplace_back(c, CycLevel(q.a, q.b, e, s));
    return out;
}

inline std::vector<std::pair<Rational, CLevels>> stuffle_cyc_levels(const CLevels& A,
                                                                    const CLevels& B) {
    if (A.empty()) return {{1, B}};
    if (B.empty()) return {{1, A}};
    CLevels tailA(A.begin() + 1, A.end()), tailB(B.begin() + 1, B.end());
    std::vector<std::pair<Rational, CLevels>> out;
    auto emit = [&out](const CycLevel& head, const Rational& sign,
                       std::vector<std::pair<Rational, CLevels>>&& tails) {
        for (auto& [c, t] : tails) {
            CLevels w;
            w.reserve(t.size() + 1);
            w.push_back(head);
            w.insert(w.end(), t.begin(), t.end());
            out.emplace_back(sign * c, std::move(w));
        }
    };
    emit(A[0], 1, stuffle_cyc_levels(tailA, B));
    emit(B[0], 1, stuffle_cyc_levels(A, tailB));
    auto diag = stuffle_cyc_levels(tailA, tailB);
    for (const auto& [cm, level] : merge_cyc_levels(A[0], B[0]))
        emit(level, -cm, std::vector<std::pair<Rational, CLevels>>(diag));
    return out;
}

inline CLevels cyc_levels_of(const Functional& f) {
    if (f.kind == Functional::Kind::Cyc) return f.cidx.levels;
    if (f.kind == Functional::Kind::Harmonic) {
        CLevels out;
        for (int a : f.hidx.a) out.emplace_back(1, 0, unsigned(std::abs(a)), a > 0 ? 1 : -1);
        return out;
    }
    throw DomainError("cyclotomic stuffle needs cyclotomic or harmonic sums");
}

}  // namespace detail

inline Expr cyclotomic_stuffle(const Functional& f, const Functional& g) {
    if (!(f.bound == g.bound)) throw DomainError("stuffle needs a common bound");
    auto parts = detail::stuffle_cyc_levels(detail::cyc_levels_of(f), detail::cyc_levels_of(g));
    Expr e;
    for (auto& [c, lv] : parts) {
        if (lv.empty()) {
            e.add(Term::unit(), c);
            continue;
        }
        e.add(Term::of(fold_sum_spelling(Functional::cyc(CycIndex{std::move(lv)}, f.bound))), c);
    }
    return e;
}

// --------------------------------------------------------------------------
// Product expansion on whole expressions

inline Expr shuffle_product(const Functional& f, const Functional& g) {
    if (f.kind != Functional::Kind::Word || g.kind != Functional::Kind::Word)
        throw DomainError("shuffle_product needs word integrals");
    if (f.formal_arg != g.formal_arg || (!f.formal_arg && f.point != g.point))
        throw DomainError("shuffle needs a common argument");
    Expr e;
    for (const auto& [w, c] : shuffle_words(f.w, g.w)) {
        Functional h = f.formal_arg ? Functional::word(w) : Functional::word_at(w, f.point);
        e.add(Term::of(std::move(h)), c);
    }
    return e;
}

// Product of two functionals as a linear combination, when the pair lives in
// a common algebra.
inline Expr expand_pair(const Functional& f, const Functional& g) {
    using K = Functional::Kind;
    if (f.kind == K::Word && g.kind == K::Word) return shuffle_product(f, g);
    if (f.kind == K::Word || g.kind == K::Word)
        throw DomainError("cannot expand a word against a sum");
    bool fc = f.kind == K::Cyc, gc = g.kind == K::Cyc;
    if (fc || gc) return cyclotomic_stuffle(f, g);
    return stuffle_product(f, g);
}

// Rewrites every product of functionals into linear combinations. Terms whose
// factors live in incompatible algebras raise DomainError.
inline Expr expand_products(const Expr& e) {
    Expr done;
    std::vector<std::pair<Term, Rational>> work(e.terms.begin(), e.terms.end());
    while (!work.empty()) {
        auto [t, c] = std::move(work.back());
        work.pop_back();
        if (t.funcs.size() < 2) {
            done.add(t, c);
            continue;
        }
        Functional f = t.funcs[0], g = t.funcs[1];
        Term rest;
        rest.consts = t.consts;
        for (size_t i = 2; i < t.funcs.size(); ++i) rest.push(t.funcs[i]);
        for (const auto& [pt, pc] : expand_pair(f, g).terms)
            work.emplace_back(rest * pt, c * pc);
    }
    return canonicalize(done);
}

// --------------------------------------------------------------------------
// Lyndon machinery

// True when w is strictly smaller than each of its proper suffixes.
template <typename Sym, typename Less>
bool is_lyndon(const std::vector<Sym>& w, Less less) {
    if (w.empty()) return false;
    auto lex_less = [&](size_t from) {
        // w < suffix w[from..]?
        for (size_t i = 0; from + i < w.size(); ++i) {
            if (less(w[i], w[from + i])) return true;
            if (less(w[from + i], w[i])) return false;
        }
        return false;  // suffix is a prefix of w: w >= suffix
    };
    for (size_t from = 1; from < w.size(); ++from)
        if (!lex_less(from)) return false;
    return true;
}

// All Lyndon words of length exactly n over the given ordered alphabet,
// lexicographically sorted (Duval's generation).
template <typename Sym>
std::vector<std::vector<Sym>> lyndon_words(const std::vector<Sym>& alphabet, unsigned n) {
    if (alphabet.empty() || n == 0) throw DomainError("lyndon_words needs letters and w >= 1");
    std::vector<std::vector<Sym>> out;
    const size_t m = alphabet.size();
    std::vector<size_t> w = {0};
    while (true) {
        if (w.size() == n) {
            std::vector<Sym> word;
            for (size_t i : w) word.push_back(alphabet[i]);
            out.push_back(std::move(word));
        }
        // periodic extension to length n, then increment the last letter
        std::vector<size_t> x(n);
        for (size_t i = 0; i < n; ++i) x[i] = w[i % w.size()];
        w = std::move(x);
        while (!w.empty() && w.back() == m - 1) w.pop_back();
        if (w.empty()) break;
        ++w.back();
    }
    return out;
}

// Number of Lyndon words using each letter a prescribed number of times.
inline BigInt witt_count(const std::vector<unsigned>& multiplicities) {
    unsigned n = 0, g = 0;
    for (unsigned k : multiplicities) {
        if (k == 0) throw DomainError("multiplicities must be >= 1");
        n += k;
        g = std::gcd(g, k);
    }
    if (n == 0) throw DomainError("empty multiset");
    BigInt total = 0;
    for (unsigned d = 1; d <= g; ++d) {
        if (g % d) continue;
        BigInt term = factorial(n / d);
        for (unsigned k : multiplicities) term /= factorial(k / d);
        total += moebius(d) * term;
    }
    return total / n;
}

// Number of Lyndon words of length w over m letters.
inline BigInt count_basis(unsigned m, unsigned w) {
    if (m < 1 || w < 1) throw DomainError("count_basis needs m >= 1, w >= 1");
    BigInt total = 0;
    for (unsigned d = 1; d <= w; ++d) {
        if (w % d) continue;
        total += moebius(w / d) * ipow(BigInt(m), d);
    }
    return total / w;
}

// Lyndon count for a graded alphabet with m_k letters of weight k. Word
// counts a_n obey a_n = sum_k m_k a_{n-k}; then with c_n defined by
// n a_n = sum_{j<=n} c_j a_{n-j} (log derivative of the generating series),
// the graded Witt formula reads l_n = (1/n) sum_{d|n} mu(n/d) c_d.
inline BigInt graded_lyndon_count(const std::vector<BigInt>& letters_by_weight, unsigned w) {
    if (w < 1) throw DomainError("weight must be >= 1");
    auto m = [&](unsigned k) -> BigInt {
        return k >= 1 && k <= letters_by_weight.size() ? letters_by_weight[k - 1] : 0;
    };
    std::vector<BigInt> a(w + 1), c(w + 1);
    a[0] = 1;
    for (unsigned n = 1; n <= w; ++n)
        for (unsigned k = 1; k <= n; ++k) a[n] += m(k) * a[n - k];
    for (unsigned n = 1; n <= w; ++n) {
        c[n] = n * a[n];
        for (unsigned j = 1; j < n; ++j) c[n] -= c[j] * a[n - j];
    }
    BigInt total = 0;
    for (unsigned d = 1; d <= w; ++d)
        if (w % d == 0) total += moebius(w / d) * c[d];
    return total / w;
}

// --------------------------------------------------------------------------
// Counting catalog

enum class CountFamily {
    hsum_all,   // 2 * 3^{w-1}
    hpl_all,    // 3^w
    N_H,        // 2 * 3^{w-1} - 2^{w-1}
    N_AH,       // Moebius sum over (3^d - 2^d); see note below
    N_D,        // 4 * 3^{w-1}
    N_DH,       // 4 * 3^{w-2} - 2^{w-2}
    N_ADH,      // N_AH(w) - N_AH(w-1)
    ssum_all,   // (n-1) * n^{w-1}
    cyc_S,      // 4 * 5^{w-1}
    cyc_A,      // Moebius sum over 5^d
    cyc_D,      // cyc_S(w) - cyc_S(w-1)
    cyc_AD,     // cyc_A(w) - cyc_A(w-1)
    cyc_ADMH,   // difference of Moebius sums over (25 - 3 * 2^d)
};

// The source table for N_AH shows the bracket [2^2 - 3^d], which is negative
// and cannot count anything; readings_of_N_AH exposes it next to the
// magnitude reading (3^d - 2^d) = count_basis(3,w) - count_basis(2,w), which
// explicit reduction confirms. The catalog returns the magnitude reading.
inline std::pair<BigInt, BigInt> readings_of_N_AH(unsigned w) {
    BigInt as_printed = 0, magnitude = 0;
    for (unsigned d = 1; d <= w; ++d) {
        if (w % d) continue;
        as_printed += moebius(w / d) * (BigInt(4) - ipow(BigInt(3), d));
        magnitude += moebius(w / d) * (ipow(BigInt(3), d) - ipow(BigInt(2), d));
    }
    return {as_printed / w, magnitude / w};
}

inline BigInt counting_catalog(CountFamily fam, unsigned w, unsigned n_letters = 0) {
    if (w < 1) throw DomainError("counting_catalog needs w >= 1");
    auto moebius_sum = [w](auto f) {
        BigInt t = 0;
        for (unsigned d = 1; d <= w; ++d)
            if (w % d == 0) t += moebius(w / d) * f(d);
        return t / w;
    };
    switch (fam) {
        case CountFamily::hsum_all: return 2 * ipow(BigInt(3), w - 1);
        case CountFamily::hpl_all: return ipow(BigInt(3), w);
        case CountFamily::N_H: return 2 * ipow(BigInt(3), w - 1) - ipow(BigInt(2), w - 1);
        case CountFamily::N_AH: return readings_of_N_AH(w).second;
        case CountFamily::N_D: return 4 * ipow(BigInt(3), w - 1);
        case CountFamily::N_DH:
            if (w < 2) throw DomainError("N_DH needs w >= 2");
            return 4 * ipow(BigInt(3), w - 2) - ipow(BigInt(2), w - 2);
        case CountFamily::N_ADH:
            return readings_of_N_AH(w).second - (w >= 2 ? readings_of_N_AH(w - 1).second : 0);
        case CountFamily::ssum_all:
            if (n_letters < 2) throw DomainError("ssum_all needs an alphabet size n >= 2");
            return (n_letters - 1) * ipow(BigInt(n_letters), w - 1);
        case CountFamily::cyc_S: return 4 * ipow(BigInt(5), w - 1);
        case CountFamily::cyc_A: return count_basis(5, w);
        case CountFamily::cyc_D:
            if (w < 2) throw DomainError("cyc_D needs w >= 2");
            return 4 * ipow(BigInt(5), w - 1) - 4 * ipow(BigInt(5), w - 2);
        case CountFamily::cyc_AD:
            if (w < 2) throw DomainError("cyc_AD needs w >= 2");
            return count_basis(5, w) - count_basis(5, w - 1);
        case CountFamily::cyc_ADMH: {
            if (w < 2) throw DomainError("cyc_ADMH needs w >= 2");
            auto part = [](unsigned ww) {
                BigInt t = 0;
                for (unsigned d = 1; d <= ww; ++d)
                    if (ww % d == 0)
                        t += moebius(ww / d) * (BigInt(25) - 3 * ipow(BigInt(2), d));
                return t / ww;
            };
            return part(w) - part(w - 1);
        }
    }
    (void)moebius_sum;
    throw DomainError("unknown counting family");
}

// --------------------------------------------------------------------------
// Sum-alphabet words and Lyndon bases

// The order on signed sum indices: larger |a| first, then negative first.
struct SumIndexLess {
    bool operator()(int a, int b) const {
        unsigned ma = unsigned(std::abs(a)), mb = unsigned(std::abs(b));
        if (ma != mb) return ma > mb;
        return a < b;
    }
};

// All harmonic index vectors of total weight w (2 * 3^{w-1} of them).
inline std::vector<std::vector<int>> harmonic_words_of_weight(unsigned w) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(unsigned)> go = [&](unsigned left) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (unsigned j = 1; j <= left; ++j)
            for (int s : {-1, 1}) {
                cur.push_back(s * int(j));
                go(left - j);
                cur.pop_back();
            }
    };
    go(w);
    return out;
}

// Lyndon basis of the stuffle algebra at exact weight w.
inline std::vector<HarmonicIndex> lyndon_basis_sums(unsigned w) {
    std::vector<HarmonicIndex> out;
    for (const auto& word : harmonic_words_of_weight(w))
        if (is_lyndon(word, SumIndexLess{})) out.push_back(HarmonicIndex(word));
    BigInt expect = graded_lyndon_count(std::vector<BigInt>(w, BigInt(2)), w);
    if (BigInt(out.size()) != expect)
        throw NumericError("Lyndon basis size mismatch at weight " + std::to_string(w));
    return out;
}

// --------------------------------------------------------------------------
// Basis reduction. For weight w, the monomials in Lyndon generators of total
// weight w and the weight-w words are equinumerous; expanding every monomial
// gives a square, invertible change of basis over Q.

namespace detail {

using Matrix = std::vector<std::vector<Rational>>;

// Gauss-Jordan inverse over Q; throws if singular.
inline Matrix invert_exact(Matrix a) {
    const size_t n = a.size();
    Matrix inv(n, std::vector<Rational>(n, 0));
    for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) throw NumericError("basis change matrix is singular");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rational d = a[col][col];
        for (size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col];
            for (size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

// Multisets (as sorted index vectors into gens) with prescribed total weight.
inline void monomials_of_weight(const std::vector<unsigned>& gen_weights, unsigned w,
                                size_t start, std::vector<size_t>& cur,
                                std::vector<std::vector<size_t>>& out) {
    if (w == 0) {
        out.push_back(cur);
        return;
    }
    for (size_t i = start; i < gen_weights.size(); ++i) {
        if (gen_weights[i] > w) continue;
        cur.push_back(i);
        monomials_of_weight(gen_weights, w - gen_weights[i], i, cur, out);
        cur.pop_back();
    }
}

struct SumBasisTable {
    std::vector<HarmonicIndex> words;          // all weight-w indices
    std::vector<std::vector<size_t>> monos;    // monomials as gen-index multisets
    std::vector<HarmonicIndex> gens;           // Lyndon generators, weights 1..w
    Matrix inverse;                            // words expressed over monomials
};

inline const SumBasisTable& sum_basis_table(unsigned w) {
    static std::map<unsigned, SumBasisTable> cache;
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;

    SumBasisTable tb;
    for (const auto& v : harmonic_words_of_weight(w)) tb.words.emplace_back(v);
    std::vector<unsigned> gw;
    for (unsigned k = 1; k <= w; ++k)
        for (const auto& g : lyndon_basis_sums(k)) {
            tb.gens.push_back(g);
            gw.push_back(k);
        }
    std::vector<size_t> cur;
    monomials_of_weight(gw, w, 0, cur, tb.monos);
    if (tb.monos.size() != tb.words.size())
        throw NumericError("monomial/word count mismatch in basis reduction");

    std::map<HarmonicIndex, size_t> col;
    for (size_t i = 0; i < tb.words.size(); ++i) col[tb.words[i]] = i;

    const size_t n = tb.words.size();
    Matrix a(n, std::vector<Rational>(n, 0));
    for (size_t j = 0; j < tb.monos.size(); ++j) {
        Expr acc = Expr::constant(1);
        for (size_t gi : tb.monos[j]) {
            Expr next;
            Functional gen = Functional::harmonic(tb.gens[gi]);
            for (const auto& [t, c] : acc.terms) {
                if (t.is_unit()) {
                    next.add(Term::of(gen), c);
                    continue;
                }
                Expr prod = stuffle_product(t.funcs[0], gen);
                next += prod * c;
            }
            acc = std::move(next);
        }
        for (const auto& [t, c] : acc.terms) {
            if (t.funcs.size() != 1 || t.funcs[0].kind != Functional::Kind::Harmonic)
                throw NumericError("unexpected term in monomial expansion");
            a[j][col.at(t.funcs[0].hidx)] = c;
        }
    }
    // row j of 'a' holds monomial_j expanded over words, so row t of the
    // inverse holds word_t expanded over monomials
    tb.inverse = invert_exact(std::move(a));
    return cache.emplace(w, std::move(tb)).first->second;
}

}  // namespace detail

// S_idx(N) as a polynomial in Lyndon-basis sums.
inline Expr reduce_sum_to_basis(const HarmonicIndex& idx) {
    unsigned w = idx.weight();
    const auto& tb = detail::sum_basis_table(w);
    size_t t = 0;
    while (t < tb.words.size() && !(tb.words[t] == idx)) ++t;
    if (t == tb.words.size()) throw DomainError("index not found at its weight");
    Expr out;
    for (size_t j = 0; j < tb.monos.size(); ++j) {
        const Rational& c = tb.inverse[t][j];
        if (c == 0) continue;
        Term term;
        for (size_t gi : tb.monos[j]) term.push(Functional::harmonic(tb.gens[gi]));
        out.add(term, c);
    }
    return out;
}

// Shuffle-algebra reduction for a word, over the alphabet of its distinct
// letters (order: the letter order itself).
inline Expr reduce_word_to_basis(const Word& w) {
    if (w.empty()) return Expr::constant(1);
    std::vector<Letter> alphabet;
    for (const auto& l : w)
        if (std::find(alphabet.begin(), alphabet.end(), l) == alphabet.end())
            alphabet.push_back(l);
    std::sort(alphabet.begin(), alphabet.end());

    const unsigned n = unsigned(w.size());
    // enumerate all words over the alphabet
    std::vector<Word> words;
    Word cur;
    std::function<void()> go = [&]() {
        if (cur.size() == n) {
            words.push_back(cur);
            return;
        }
        for (const auto& l : alphabet) {
            cur.push_back(l);
            go();
            cur.pop_back();
        }
    };
    go();

    std::vector<Word> gens;
    std::vector<unsigned> gw;
    for (unsigned k = 1; k <= n; ++k)
        for (const auto& g : lyndon_words(alphabet, k)) {
            gens.push_back(g);
            gw.push_back(k);
        }
    std::vector<std::vector<size_t>> monos;
    std::vector<size_t> idxcur;
    detail::monomials_of_weight(gw, n, 0, idxcur, monos);
    if (monos.size() != words.size())
        throw NumericError("monomial/word count mismatch in shuffle reduction");

    std::map<Word, size_t> col;
    for (size_t i = 0; i < words.size(); ++i) col[words[i]] = i;

    detail::Matrix a(words.size(), std::vector<Rational>(words.size(), 0));
    for (size_t j = 0; j < monos.size(); ++j) {
        std::map<Word, Rational> acc{{Word{}, Rational(1)}};
        for (size_t gi : monos[j]) {
            std::map<Word, Rational> next;
            for (const auto& [u, c] : acc)
                for (const auto& [v, m] : shuffle_words(u, gens[gi])) next[v] += c * m;
            acc = std::move(next);
        }
        for (const auto& [word, c] : acc) a[j][col.at(word)] = c;
    }
    detail::Matrix inv = detail::invert_exact(std::move(a));

    size_t t = col.at(w);
    Expr out;
    for (size_t j = 0; j < monos.size(); ++j) {
        const Rational& c = inv[t][j];
        if (c == 0) continue;
        Term term;
        for (size_t gi : monos[j]) term.push(Functional::word(gens[gi]));
        out.add(term, c);
    }
    return out;
}

// Entry point per the build contract: rewrite homogeneous sums/words in the
// Lyndon basis; verified by expanding back.
inline Expr reduce_to_basis(const Expr& e, unsigned w_max = 4) {
    if (w_max > 4) throw DomainError("basis reduction supported to weight 4");
    Expr out;
    unsigned seen_weight = 0;
    for (const auto& [t, c] : e.terms) {
        if (t.funcs.size() != 1 || !t.consts.empty())
            throw DomainError("reduce_to_basis expects a combination of single sums or words");
        unsigned w = t.weight();
        if (w == 0 || w > w_max) throw DomainError("term weight outside 1..w_max");
        if (seen_weight == 0) seen_weight = w;
        if (w != seen_weight) throw DomainError("reduce_to_basis needs a homogeneous input");
        const Functional& f = t.funcs[0];
        if (f.kind == Functional::Kind::Harmonic) {
            if (!(f.bound == Bound::of_n()))
                throw DomainError("reduction works on sums with bound N");
            out += reduce_sum_to_basis(f.hidx) * c;
        } else if (f.kind == Functional::Kind::Word) {
            if (!f.formal_arg) throw DomainError("reduction works on words with argument x");
            out += reduce_word_to_basis(f.w) * c;
        } else {
            throw DomainError("reduce_to_basis covers harmonic sums and words");
        }
    }
    return canonicalize(out);
}

}  // namespace nestsum
