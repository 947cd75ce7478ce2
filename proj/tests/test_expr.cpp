#include <catch2/catch_amalgamated.hpp>

#include <nestsum/expr.hpp>
#include <nestsum/grammar.hpp>

using namespace nestsum;

namespace {
Functional hs(std::initializer_list<int> idx) { return Functional::harmonic(HarmonicIndex(idx)); }
}  // namespace

TEST_CASE("letters fold to core") {
    CHECK(Letter::generalized(0) == Letter::core(0));
    CHECK(Letter::generalized(1) == Letter::core(1));
    CHECK(Letter::generalized(-1) == Letter::core(-1));
    CHECK(Letter::cyclotomic(0, 0) == Letter::core(0));
    CHECK(Letter::generalized(rat(1, 2)).kind == Letter::Kind::Generalized);
    CHECK_THROWS_AS(Letter::cyclotomic(4, 2), DomainError);  // phi(4) = 2
    CHECK_THROWS_AS(Letter::core(2), DomainError);

    // basis order on core letters
    CHECK(Letter::core(-1) < Letter::core(0));
    CHECK(Letter::core(0) < Letter::core(1));
}

TEST_CASE("index invariants") {
    CHECK_THROWS_AS(HarmonicIndex{0}, DomainError);
    CHECK(HarmonicIndex({-2, 1, 1}).weight() == 4);
    CHECK(HarmonicIndex({-2, 1, 1}).depth() == 3);
    CHECK_THROWS_AS(SSumIndex({0}, {Rational(1)}), DomainError);
    CHECK_THROWS_AS(SSumIndex({1}, {Rational(0)}), DomainError);
    CHECK_THROWS_AS(CycLevel(2, 2, 1, 1), DomainError);
    CHECK_THROWS_AS(CycLevel(2, 1, 0, 1), DomainError);
    CHECK_THROWS_AS(CycLevel(2, 1, 1, 2), DomainError);
    CHECK(CycIndex{CycLevel(2, 1, 2, -1), CycLevel(3, 0, 1, 1)}.weight() == 3);
}

TEST_CASE("bounds") {
    CHECK(to_string(Bound::of_n()) == "N");
    CHECK(to_string(Bound::of_n(2)) == "2N");
    CHECK(to_string(Bound::infinity()) == "inf");
    CHECK(Bound::of_n(2).at(7) == 14);
    CHECK_THROWS_AS(Bound::infinity().at(3), DomainError);
    CHECK_THROWS_AS(Bound::of_n(0), DomainError);
}

TEST_CASE("term order: weight, then degree and depth descending") {
    Expr e;
    e.add(Term::of(hs({2})), 1);
    e.add(Term::of(hs({1, 1})), 2);
    CHECK(to_string(e) == "2*S[1,1](N) + S[2](N)");

    Expr diff = Expr::of(hs({1, 1}), 2) - Expr::of(hs({2}), 1);
    CHECK(to_string(diff) == "2*S[1,1](N) - S[2](N)");

    // same weight: the squared depth-1 sum (degree 2) precedes the depth-2 sum
    Expr prod = Expr::of(Term::of(hs({1})) * Term::of(hs({1})));
    prod += Expr::of(hs({1, 1}), -1);
    CHECK(to_string(prod) == "S[1](N)*S[1](N) - S[1,1](N)");

    // constants sort after functionals of the same weight
    Expr mixed = Expr::of(Term::of(ConstantSymbol::zeta(2))) + Expr::of(hs({2}));
    CHECK(to_string(mixed) == "S[2](N) + z2");

    // weight ascending across blocks
    Expr blocks = Expr::of(hs({3})) + Expr::of(hs({1})) + Expr::constant(rat(1, 2));
    CHECK(to_string(blocks) == "1/2 + S[1](N) + S[3](N)");
}

TEST_CASE("expr arithmetic") {
    Expr a = Expr::of(hs({1})) + Expr::constant(2);
    Expr b = Expr::of(hs({1}), -1) + Expr::constant(3);
    CHECK(to_string(a + b) == "5");
    CHECK((a - a).is_zero());
    CHECK(to_string(a * rat(1, 2)) == "1 + 1/2*S[1](N)");
    Expr sq = a * a;
    CHECK(to_string(sq) == "4 + 4*S[1](N) + S[1](N)*S[1](N)");
}

TEST_CASE("canonicalize folds words at fixed points") {
    // H[0,1](1) = z2
    Expr e = Expr::of(Functional::word_at(core_word({0, 1}), rat(1, 2)));
    Expr at1;
    at1.add(Term::of(Functional::word(core_word({0, 1}))), 1);
    CHECK(to_string(canonicalize(e)) == "H[0,1](1/2)");

    auto [q1, s1] = fold_word_at_one(core_word({0, 1}));
    REQUIRE(s1.has_value());
    CHECK(q1 == 1);
    CHECK(to_string(*s1) == "z2");

    auto [q2, s2] = fold_word_at_one(core_word({-1}));
    CHECK(to_string(*s2) == "ln2");

    // eta(2) = z2/2
    auto [q3, s3] = fold_word_at_one(core_word({0, -1}));
    CHECK(q3 == rat(1, 2));
    CHECK(to_string(*s3) == "z2");

    // eta(3) = 3/4 z3
    auto [q4, s4] = fold_word_at_one(core_word({0, 0, -1}));
    CHECK(q4 == rat(3, 4));
    CHECK(to_string(*s4) == "z3");

    // all zeros vanish at 1, and any word vanishes at 0
    auto [q5, s5] = fold_word_at_one(core_word({0, 0}));
    CHECK(q5 == 0);
    Expr zero = canonicalize(Expr::of(Functional::word_at(core_word({0, 1, -1}), 0)));
    CHECK(zero.is_zero());

    CHECK_THROWS_AS(fold_word_at_one(core_word({1, 0})), DomainError);
    CHECK_THROWS_AS(canonicalize(Expr::of(Functional::word_at(core_word({0, 0}), 0))),
                    DomainError);

    // Euler: zeta(2,1) = zeta(3)
    auto [q6, s6] = fold_word_at_one(core_word({0, 1, 1}));
    CHECK(q6 == 1);
    CHECK(to_string(*s6) == "z3");

    // mixed-sign values stay symbolic
    auto [q7, s7] = fold_word_at_one(core_word({-1, 1}));
    CHECK(q7 == 1);
    CHECK(to_string(*s7) == "H[-1,1](1)");
}

TEST_CASE("weights and depths of terms") {
    Term t = Term::of(ConstantSymbol::zeta(2)) * Term::of(hs({1, 1}));
    CHECK(t.weight() == 4);
    CHECK(t.degree() == 2);
    CHECK(t.depth() == 2);
    CHECK(Term::of(ConstantSymbol::li_half(4)).weight() == 4);
    CHECK(Term::of(ConstantSymbol::catalan()).weight() == 2);
    Term w = Term::of(Functional::word(core_word({0, 1, 0, -1})));
    CHECK(w.weight() == 4);
    CHECK(w.depth() == 2);
}
