#pragma once

// Brute-force exact evaluation of the nested sums over Q. One forward sweep
// k = 1..N updating all nesting levels, innermost first:
//
//   T_i(k) = T_i(k-1) + w_i(k) * T_{i+1}(k),   T_{d+1}(k) = 1
//
// with w_i(k) = x^k/k^a (harmonic, S-sum) or s^k/(ak+b)^c (cyclotomic).
// O(depth) state, O(N*depth) rational operations. This is the reference
// implementation every algebraic identity is checked against; keep it dumb.

#include "errors.hpp"
#include "expr.hpp"
#include "indices.hpp"
#include "rational.hpp"

#include <vector>

namespace nestsum {

inline constexpr long long kOracleWorkLimit = 10'000'000;

namespace detail {

inline void oracle_guard(size_t depth, long long N) {
    if (N < 0) throw DomainError("sum bound must be nonnegative");
    if ((long long)depth * (N > 0 ? N : 1) > kOracleWorkLimit)
        throw ResourceGuard("exact sum too large: depth*N exceeds " +
                            std::to_string(kOracleWorkLimit));
}

}  // namespace detail

inline Rational eval_ssum_exact(const SSumIndex& idx, long long N) {
    idx.validate();
    const size_t d = idx.a.size();
    detail::oracle_guard(d, N);
    if (d == 0) return 1;  // empty nesting: S_{}(N) = 1 for N >= 0
    std::vector<Rational> T(d, Rational(0));
    std::vector<Rational> xpow(d, Rational(1));
    for (long long k = 1; k <= N; ++k) {
        Rational kq(k);
        for (size_t i = d; i-- > 0;) {
            xpow[i] *= idx.x[i];
            Rational term = xpow[i] / qpow(kq, idx.a[i]);
            if (i + 1 < d) term *= T[i + 1];
            T[i] += term;
        }
    }
    return T[0];
}

inline Rational eval_hsum_exact(const HarmonicIndex& idx, long long N) {
    return eval_ssum_exact(as_ssum(idx), N);
}

inline Rational eval_cyc_exact(const CycIndex& idx, long long N) {
    idx.validate();
    const size_t d = idx.levels.size();
    detail::oracle_guard(d, N);
    std::vector<Rational> T(d, Rational(0));
    std::vector<Rational> spow(d, Rational(1));
    for (long long k = 1; k <= N; ++k) {
        for (size_t i = d; i-- > 0;) {
            const CycLevel& l = idx.levels[i];
            spow[i] *= l.s;
            Rational term = spow[i] / qpow(Rational((long long)l.a * k + l.b), l.c);
            if (i + 1 < d) term *= T[i + 1];
            T[i] += term;
        }
    }
    return T[0];
}

// Sum functional at concrete N; words and infinite bounds have no exact
// rational value and are rejected.
inline Rational eval_functional_exact(const Functional& f, long long N) {
    if (f.kind == Functional::Kind::Word)
        throw DomainError("word integrals have no exact rational value");
    long long limit = f.bound.at(N);
    switch (f.kind) {
        case Functional::Kind::Harmonic: return eval_hsum_exact(f.hidx, limit);
        case Functional::Kind::SSum: return eval_ssum_exact(f.sidx, limit);
        case Functional::Kind::Cyc: return eval_cyc_exact(f.cidx, limit);
        default: break;
    }
    throw DomainError("unsupported functional");
}

// Exact value of an expression whose terms are products of sum functionals.
inline Rational eval_expr_exact(const Expr& e, long long N) {
    Rational total = 0;
    for (const auto& [t, c] : e.terms) {
        if (!t.consts.empty())
            throw DomainError("constant symbols have no exact rational value");
        Rational prod = c;
        for (const auto& f : t.funcs) prod *= eval_functional_exact(f, N);
        total += prod;
    }
    return total;
}

}  // namespace nestsum
