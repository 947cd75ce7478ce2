#pragma once

// Text format, both directions. The printer emits the canonical form (term
// order fixed by TermLess); the parser accepts the same language plus
// whitespace and arbitrary term order, so print-then-parse is the identity
// on canonicalized expressions.
//
//   expr     := ['+'|'-'] term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ['^' uint]
//   base     := rational | const | sum | word
//   const    := 'z'k | 'ln2' | 'li'k'half' | 'catalan' | 'sigma0' | 'ipi' | 'pi'
//   sum      := 'S' '[' (ints | pairs) ']' '(' bound ')'
//             | 'CS' '[' '{'a','b','c','s'}' (',' ...)* ']' '(' bound ')'
//   word     := 'H' '[' letter (',' letter)* ']' '(' ('x' | rational) ')'
//   letter   := rational | '(' uint ',' uint ')'
//   bound    := [uint] 'N' | 'inf'
//
// H[...](1) folds to its constant value, so it never survives printing as a
// functional; sums keep symbolic bounds (evaluation substitutes N).

#include "errors.hpp"
#include "expr.hpp"

#include <cctype>
#include <string>

namespace nestsum {

// --------------------------------------------------------------------------
// Printing

inline std::string to_string(const ConstantSymbol& c) {
    switch (c.tag) {
        case ConstantSymbol::Tag::Zeta: return "z" + std::to_string(c.k);
        case ConstantSymbol::Tag::Ln2: return "ln2";
        case ConstantSymbol::Tag::LiHalf: return "li" + std::to_string(c.k) + "half";
        case ConstantSymbol::Tag::Catalan: return "catalan";
        case ConstantSymbol::Tag::Sigma0: return "sigma0";
        case ConstantSymbol::Tag::IPi: return "ipi";
        case ConstantSymbol::Tag::Pi: return "pi";
        case ConstantSymbol::Tag::WordAtOne: return "H[" + to_string(c.w) + "](1)";
    }
    return "?";
}

inline std::string to_string(const Functional& f) {
    switch (f.kind) {
        case Functional::Kind::Harmonic:
            return "S[" + to_string(f.hidx) + "](" + to_string(f.bound) + ")";
        case Functional::Kind::SSum:
            return "S[" + to_string(f.sidx) + "](" + to_string(f.bound) + ")";
        case Functional::Kind::Cyc:
            return "CS[" + to_string(f.cidx) + "](" + to_string(f.bound) + ")";
        case Functional::Kind::Word:
            return "H[" + to_string(f.w) + "](" +
                   (f.formal_arg ? std::string("x") : to_string(f.point)) + ")";
    }
    return "?";
}

inline std::string to_string(const Term& t) {
    if (t.is_unit()) return "1";
    std::string s;
    auto sep = [&s] {
        if (!s.empty()) s += "*";
    };
    for (const auto& [c, p] : t.consts) {
        sep();
        s += to_string(c);
        if (p > 1) s += "^" + std::to_string(p);
    }
    for (const auto& f : t.funcs) {
        sep();
        s += to_string(f);
    }
    return s;
}

inline std::string to_string(const Expr& e) {
    if (e.terms.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [t, c] : e.terms) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first)
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        first = false;
        if (t.is_unit())
            s += to_string(mag);
        else if (mag != 1)
            s += to_string(mag) + "*" + to_string(t);
        else
            s += to_string(t);
    }
    return s;
}

// JSON form: a list of {term, coeff:{num, den}}; num/den are decimal strings
// so arbitrary-size coefficients survive any JSON reader.
inline std::string to_json(const Expr& e) {
    std::string s = "[";
    bool first = true;
    for (const auto& [t, c] : e.terms) {
        if (!first) s += ",";
        first = false;
        s += "{\"term\":\"" + to_string(t) + "\",\"coeff\":{\"num\":\"" + num(c).str() +
             "\",\"den\":\"" + den(c).str() + "\"}}";
    }
    return s + "]";
}

// --------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
  public:
    explicit Parser(const std::string& src) : s_(src) {}

    Expr parse() {
        Expr e;
        skip_ws();
        bool neg = eat_sign();
        e += sign(parse_term(), neg);
        skip_ws();
        while (!done()) {
            size_t here = pos_;
            char c = peek();
            if (c != '+' && c != '-') throw ParseError("expected '+' or '-' between terms", here);
            ++pos_;
            skip_ws();
            e += sign(parse_term(), c == '-');
            skip_ws();
        }
        return canonicalize(e);
    }

  private:
    static Expr sign(Expr e, bool neg) { return neg ? -std::move(e) : std::move(e); }

    const std::string& s_;
    size_t pos_ = 0;

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!done() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat_sign() {
        if (peek() == '-') {
            ++pos_;
            skip_ws();
            return true;
        }
        if (peek() == '+') {
            ++pos_;
            skip_ws();
        }
        return false;
    }
    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
        skip_ws();
    }
    bool try_eat(char c) {
        if (peek() != c) return false;
        ++pos_;
        skip_ws();
        return true;
    }

    unsigned long long parse_uint() {
        if (!std::isdigit((unsigned char)peek())) throw ParseError("expected a digit", pos_);
        unsigned long long v = 0;
        while (std::isdigit((unsigned char)peek())) {
            v = v * 10 + (unsigned long long)(s_[pos_] - '0');
            if (v > (1ull << 62)) throw ParseError("integer literal too large", pos_);
            ++pos_;
        }
        skip_ws();
        return v;
    }

    long long parse_int() {
        bool neg = eat_sign();
        long long v = (long long)parse_uint();
        return neg ? -v : v;
    }

    Rational parse_rational() {
        size_t here = pos_;
        long long n = parse_int();
        if (try_eat('/')) {
            long long d = (long long)parse_uint();
            if (d == 0) throw ParseError("zero denominator", here);
            return Rational(n) / d;
        }
        return Rational(n);
    }

    std::string parse_ident() {
        if (!std::isalpha((unsigned char)peek())) throw ParseError("expected a name", pos_);
        std::string id;
        while (std::isalnum((unsigned char)peek())) id += s_[pos_++];
        skip_ws();
        return id;
    }

    Bound parse_bound() {
        size_t here = pos_;
        if (std::isdigit((unsigned char)peek())) {
            unsigned long long m = parse_uint();
            std::string id = parse_ident();
            if (id != "N") throw ParseError("expected 'N' after bound multiplier", here);
            return Bound::of_n(unsigned(m));
        }
        std::string id = parse_ident();
        if (id == "N") return Bound::of_n();
        if (id == "inf") return Bound::infinity();
        throw ParseError("expected a bound: N, kN or inf", here);
    }

    Letter parse_letter() {
        if (try_eat('(')) {
            unsigned k = unsigned(parse_uint());
            expect(',');
            unsigned l = unsigned(parse_uint());
            expect(')');
            return Letter::cyclotomic(k, l);
        }
        return Letter::generalized(parse_rational());
    }

    Functional parse_sum_body(bool cyclo) {
        expect('[');
        Functional f;
        if (cyclo) {
            std::vector<CycLevel> levels;
            do {
                expect('{');
                size_t here = pos_;
                long long a = parse_int();
                expect(',');
                long long b = parse_int();
                expect(',');
                long long c = parse_int();
                expect(',');
                long long s = parse_int();
                expect('}');
                if (a < 1 || b < 0 || b >= a || c < 1 || (s != 1 && s != -1))
                    throw ParseError("cyclotomic level must satisfy a > b >= 0, c >= 1, s = +-1",
                                     here);
                levels.emplace_back(unsigned(a), unsigned(b), unsigned(c), int(s));
            } while (try_eat(','));
            expect(']');
            expect('(');
            Bound bd = parse_bound();
            expect(')');
            return Functional::cyc(CycIndex{std::move(levels)}, bd);
        }
        if (peek() == '(') {
            std::vector<int> a;
            std::vector<Rational> x;
            do {
                expect('(');
                size_t here = pos_;
                long long e = parse_int();
                if (e < 1) throw ParseError("S-sum exponent must be >= 1", here);
                expect(',');
                Rational wt = parse_rational();
                if (wt == 0) throw ParseError("S-sum weight must be nonzero", here);
                expect(')');
                a.push_back(int(e));
                x.push_back(wt);
            } while (try_eat(','));
            expect(']');
            expect('(');
            Bound bd = parse_bound();
            expect(')');
            return Functional::ssum(SSumIndex{std::move(a), std::move(x)}, bd);
        }
        std::vector<int> a;
        do {
            size_t here = pos_;
            long long v = parse_int();
            if (v == 0) throw ParseError("harmonic index entries must be nonzero", here);
            a.push_back(int(v));
        } while (try_eat(','));
        expect(']');
        expect('(');
        Bound bd = parse_bound();
        expect(')');
        return Functional::harmonic(HarmonicIndex{std::move(a)}, bd);
    }

    // One multiplicand; the bool says whether it was a bare rational.
    std::pair<Expr, bool> parse_base() {
        size_t here = pos_;
        char c = peek();
        if (std::isdigit((unsigned char)c) || c == '-' || c == '+')
            return {Expr::constant(parse_rational()), true};
        if (!std::isalpha((unsigned char)c)) throw ParseError("expected a factor", here);

        std::string id = parse_ident();
        if (id == "S" || id == "CS") {
            try {
                return {Expr::of(parse_sum_body(id == "CS")), false};
            } catch (const DomainError& err) {
                throw ParseError(err.what(), here);
            }
        }
        if (id == "H") {
            expect('[');
            Word w;
            try {
                do w.push_back(parse_letter());
                while (try_eat(','));
            } catch (const DomainError& err) {
                throw ParseError(err.what(), here);
            }
            expect(']');
            expect('(');
            Expr e;
            try {
                if (std::isalpha((unsigned char)peek())) {
                    size_t argpos = pos_;
                    if (parse_ident() != "x")
                        throw ParseError("word argument must be x or a rational", argpos);
                    e = Expr::of(Functional::word(std::move(w)));
                } else {
                    Rational p = parse_rational();
                    if (p == 1) {
                        auto [q, sym] = fold_word_at_one(w);
                        e = sym ? Expr::of(Term::of(*sym), q) : Expr::constant(q);
                    } else {
                        e = Expr::of(Functional::word_at(std::move(w), p));
                    }
                }
            } catch (const DomainError& err) {
                throw ParseError(err.what(), here);
            }
            expect(')');
            return {e, false};
        }
        if (id == "ln2") return {Expr::of(Term::of(ConstantSymbol::ln2())), false};
        if (id == "catalan") return {Expr::of(Term::of(ConstantSymbol::catalan())), false};
        if (id == "sigma0") return {Expr::of(Term::of(ConstantSymbol::sigma0())), false};
        if (id == "ipi") return {Expr::of(Term::of(ConstantSymbol::i_pi())), false};
        if (id == "pi") return {Expr::of(Term::of(ConstantSymbol::pi())), false};
        if (id.size() >= 2 && id[0] == 'z') {
            unsigned k = 0;
            bool digits = true;
            for (size_t i = 1; i < id.size(); ++i) {
                if (!std::isdigit((unsigned char)id[i])) digits = false;
                k = k * 10 + unsigned(id[i] - '0');
            }
            if (digits && k >= 2) return {Expr::of(Term::of(ConstantSymbol::zeta(k))), false};
        }
        if (id.size() > 6 && id.rfind("li", 0) == 0 && id.substr(id.size() - 4) == "half") {
            unsigned k = 0;
            bool digits = true;
            for (size_t i = 2; i + 4 < id.size(); ++i) {
                if (!std::isdigit((unsigned char)id[i])) digits = false;
                k = k * 10 + unsigned(id[i] - '0');
            }
            if (digits && k >= 2) return {Expr::of(Term::of(ConstantSymbol::li_half(k))), false};
        }
        throw ParseError("unknown name '" + id + "'", here);
    }

    Expr parse_factor() {
        auto [e, plain] = parse_base();
        if (try_eat('^')) {
            size_t here = pos_;
            unsigned long long p = parse_uint();
            if (p > 64) throw ParseError("power too large", here);
            Expr out = Expr::constant(1);
            for (unsigned long long i = 0; i < p; ++i) out = out * e;
            return out;
        }
        (void)plain;
        return e;
    }

    Expr parse_term() {
        Expr e = parse_factor();
        while (try_eat('*')) e = e * parse_factor();
        return e;
    }
};

}  // namespace detail

inline Expr parse_expr(const std::string& src) {
    detail::Parser p(src);
    return p.parse();
}

}  // namespace nestsum
