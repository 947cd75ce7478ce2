#pragma once

// Alphabet for word integrals. Three letter families share one struct:
//   core        0, 1, -1            dz/z, dz/(1-z), dz/(1+z)
//   generalized rational a          dz/(|a| - sign(a) z), a outside (0,1)
//   cyclotomic  (k,l), 0<=l<phi(k)  z^l dz / Phi_k(z)
// Core letters are the generalized ones at 0, +1, -1; construction folds
// those back to Core so equality means equal measures. The cyclotomic pair
// (0,0) in the text format also denotes dz/z and folds to Core 0.

#include "errors.hpp"
#include "rational.hpp"

#include <compare>
#include <string>
#include <vector>

namespace nestsum {

struct Letter {
    enum class Kind { Core, Generalized, Cyclotomic };

    Kind kind = Kind::Core;
    Rational a = 0;      // core/generalized weight
    unsigned cyc_k = 0;  // cyclotomic modulus
    unsigned cyc_l = 0;  // numerator power

    static Letter core(int v) {
        if (v < -1 || v > 1) throw DomainError("core letter must be 0 or +-1");
        Letter w;
        w.kind = Kind::Core;
        w.a = v;
        return w;
    }

    static Letter generalized(const Rational& a) {
        if (a == 0 || a == 1 || a == -1) return core(int(a));
        Letter w;
        w.kind = Kind::Generalized;
        w.a = a;
        return w;
    }

    static Letter cyclotomic(unsigned k, unsigned l) {
        if (k == 0) {
            if (l != 0) throw DomainError("cyclotomic letter (0,l) only valid as (0,0)");
            return core(0);
        }
        if (l >= euler_phi(k)) throw DomainError("cyclotomic letter needs l < phi(k)");
        Letter w;
        w.kind = Kind::Cyclotomic;
        w.cyc_k = k;
        w.cyc_l = l;
        return w;
    }

    bool is_core() const { return kind == Kind::Core; }
    bool is_zero() const { return kind != Kind::Cyclotomic && a == 0; }

    // core value as int, only meaningful for core letters
    int core_value() const { return int(a); }

    friend bool operator==(const Letter& x, const Letter& y) {
        return x.kind == y.kind && x.a == y.a && x.cyc_k == y.cyc_k && x.cyc_l == y.cyc_l;
    }

    // Total order; on core letters it is the basis order -1 < 0 < 1.
    friend bool operator<(const Letter& x, const Letter& y) {
        if (x.kind != y.kind) return int(x.kind) < int(y.kind);
        if (x.kind == Kind::Cyclotomic)
            return x.cyc_k != y.cyc_k ? x.cyc_k < y.cyc_k : x.cyc_l < y.cyc_l;
        return x.a < y.a;
    }
};

using Word = std::vector<Letter>;

inline Word core_word(std::initializer_list<int> vs) {
    Word w;
    for (int v : vs) w.push_back(Letter::core(v));
    return w;
}

inline bool is_core_word(const Word& w) {
    for (const auto& l : w)
        if (!l.is_core()) return false;
    return true;
}

inline bool is_zero_one_word(const Word& w) {
    for (const auto& l : w)
        if (!l.is_core() || l.core_value() < 0) return false;
    return true;
}

inline unsigned weight(const Word& w) { return unsigned(w.size()); }

inline std::string to_string(const Letter& l) {
    switch (l.kind) {
        case Letter::Kind::Core: return l.a == 0 ? "0" : (l.a == 1 ? "1" : "-1");
        case Letter::Kind::Generalized: return to_string(l.a);
        case Letter::Kind::Cyclotomic:
            return "(" + std::to_string(l.cyc_k) + "," + std::to_string(l.cyc_l) + ")";
    }
    return "?";
}

inline std::string to_string(const Word& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ",";
        s += to_string(w[i]);
    }
    return s;
}

}  // namespace nestsum
