#pragma once

// Exact coefficient arithmetic. Everything symbolic in this library is a
// Q-linear combination, so the rational type is the one piece of plumbing
// all modules share. Backed by boost::multiprecision; kept behind aliases
// so the rest of the code never names boost directly.

#include "errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <string>

namespace nestsum {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& q) { return numerator(q); }
inline BigInt den(const Rational& q) { return denominator(q); }

inline Rational rat(long long n, long long d = 1) {
    if (d == 0) throw DomainError("rational with zero denominator");
    return Rational(BigInt(n), BigInt(d));
}

inline BigInt ipow(BigInt base, unsigned e) {
    BigInt r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

inline Rational qpow(const Rational& base, long long e) {
    if (e == 0) return Rational(1);
    if (base == 0 && e < 0) throw DomainError("0^negative");
    Rational r(ipow(num(base), unsigned(e < 0 ? -e : e)),
               ipow(den(base), unsigned(e < 0 ? -e : e)));
    if (e < 0) r = Rational(den(r) * (num(r) < 0 ? -1 : 1), abs(num(r)));
    return r;
}

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return r;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// Moebius mu, enough for word lengths; trial division is fine here.
inline int moebius(unsigned n) {
    if (n == 0) throw DomainError("moebius(0)");
    int mu = 1;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            mu = -mu;
        }
    }
    if (n > 1) mu = -mu;
    return mu;
}

inline unsigned euler_phi(unsigned n) {
    unsigned result = n;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

inline std::string to_string(const Rational& q) {
    std::string s = num(q).str();
    if (den(q) != 1) s += "/" + den(q).str();
    return s;
}

}  // namespace nestsum
