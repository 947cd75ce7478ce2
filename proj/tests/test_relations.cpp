#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nestsum/relations.hpp"

using namespace nestsum;

namespace {

Expr hsum(std::initializer_list<int> a, unsigned mult = 1) {
    return Expr::of(Functional::harmonic(HarmonicIndex(a), Bound::of_n(mult)));
}

Expr wexpr(std::initializer_list<int> ls) {
    return Expr::of(Functional::word(core_word(ls)));
}

Expr zeta(unsigned k) { return Expr::of(Term::of(ConstantSymbol::zeta(k))); }

Expr sigma0_pow(unsigned p, const Rational& c) {
    return Expr::of(Term::of(ConstantSymbol::sigma0(), p), c);
}

// linear extension of a word-to-Expr map over an expanded expression
template <typename F>
Expr map_words(const Expr& e, F&& f) {
    Expr out;
    for (const auto& [t, c] : e.terms) {
        Term consts;
        consts.consts = t.consts;
        Expr factor = Expr::constant(Rational(1));
        for (const auto& fx : t.funcs) {
            REQUIRE(fx.kind == Functional::Kind::Word);
            factor = factor * f(fx.w);
        }
        out += Expr::of(consts, c) * factor;
    }
    return out;
}

}  // namespace

TEST_CASE("duplication halves the argument of plain harmonic sums") {
    // S_2(N) = 2 [S_2(2N) + S_{-2}(2N)]
    Expr d2 = duplicate_hsum(HarmonicIndex{2});
    Expr expect = (hsum({2}, 2) + hsum({-2}, 2)) * Rational(2);
    CHECK((d2 - expect).is_zero());

    for (long long N = 1; N <= 12; ++N)
        CHECK(eval_expr_exact(d2, N) == eval_hsum_exact(HarmonicIndex{2}, N));

    // S_{1,1}: prefactor 2^{2-2} = 1, four sign patterns
    Expr d11 = duplicate_hsum(HarmonicIndex{1, 1});
    CHECK(d11.terms.size() == 4);
    for (long long N = 1; N <= 10; ++N)
        CHECK(eval_expr_exact(d11, N) == eval_hsum_exact(HarmonicIndex{1, 1}, N));
}

TEST_CASE("duplication on random positive indices") {
    std::mt19937 rng(20240517);
    std::uniform_int_distribution<int> pick_w(1, 4);
    for (int trial = 0; trial < 40; ++trial) {
        int w = pick_w(rng);
        std::vector<int> idx;
        int left = w;
        while (left > 0) {
            std::uniform_int_distribution<int> part(1, left);
            int p = part(rng);
            idx.push_back(p);
            left -= p;
        }
        HarmonicIndex hi{idx};
        Expr dup = duplicate_hsum(hi);
        std::uniform_int_distribution<long long> pick_n(1, 15);
        long long N = pick_n(rng);
        CHECK(eval_expr_exact(dup, N) == eval_hsum_exact(hi, N));
    }
}

TEST_CASE("duplication squares the weights of S-sums") {
    std::mt19937 rng(777);
    const std::vector<Rational> pool{rat(1, 2), rat(-1, 3), Rational(2), Rational(-1), rat(3, 4)};
    std::uniform_int_distribution<size_t> pick_x(0, pool.size() - 1);
    std::uniform_int_distribution<int> pick_w(1, 4);
    std::uniform_int_distribution<long long> pick_n(1, 10);
    for (int trial = 0; trial < 30; ++trial) {
        int w = pick_w(rng);
        std::vector<int> a;
        int left = w;
        while (left > 0) {
            std::uniform_int_distribution<int> part(1, left);
            int p = part(rng);
            a.push_back(p);
            left -= p;
        }
        std::vector<Rational> x, x2;
        for (size_t i = 0; i < a.size(); ++i) {
            Rational v = pool[pick_x(rng)];
            x.push_back(v);
            x2.push_back(v * v);
        }
        SSumIndex idx{a, x};
        long long N = pick_n(rng);
        CHECK(eval_expr_exact(duplicate_ssum(idx), N) == eval_ssum_exact(SSumIndex{a, x2}, N));
    }

    CHECK_THROWS_AS(duplicate_hsum(HarmonicIndex{1, -2}), DomainError);
}

TEST_CASE("sign flip of the argument") {
    CHECK((minus_x(core_word({1})) + wexpr({-1})).is_zero());
    CHECK((minus_x(core_word({0, 1})) + wexpr({0, -1})).is_zero());
    CHECK((minus_x(core_word({-1, 0, 1})) - wexpr({1, 0, -1})).is_zero());
    CHECK_THROWS_AS(minus_x(core_word({1, 0})), DomainError);

    // involution over every core word of weight <= 4 with nonzero last letter
    std::vector<Word> all{Word{}};
    for (int len = 1; len <= 4; ++len) {
        std::vector<Word> next;
        for (const auto& w : all)
            if (w.size() == size_t(len - 1))
                for (int v : {-1, 0, 1}) {
                    Word nw = w;
                    nw.push_back(Letter::core(v));
                    next.push_back(nw);
                }
        for (auto& w : next) all.push_back(std::move(w));
    }
    int checked = 0;
    for (const auto& w : all) {
        if (w.empty() || w.back().is_zero()) continue;
        Expr once = minus_x(w);
        REQUIRE(once.terms.size() == 1);
        const auto& [t, c] = *once.terms.begin();
        Expr twice = minus_x(t.funcs[0].w) * c;
        CHECK((twice - Expr::of(Functional::word(w))).is_zero());
        ++checked;
    }
    CHECK(checked == 2 + 6 + 18 + 54);  // words of length k with nonzero tail: 2*3^{k-1}
}

TEST_CASE("values of convergent words at 1") {
    CHECK((word_value_at_one(core_word({0, 1})) - zeta(2)).is_zero());
    CHECK((word_value_at_one(core_word({0, 1, 0})) + zeta(3) * Rational(2)).is_zero());
    // int_0^1 ln x/(1+x) = -zeta_2/2
    CHECK((word_value_at_one(core_word({-1, 0})) + zeta(2) * rat(1, 2)).is_zero());
    CHECK(word_value_at_one(core_word({0, 0})).is_zero());
    CHECK_THROWS_AS(word_value_at_one(core_word({1, 0})), DomainError);
}

TEST_CASE("shuffle regularization at 1") {
    CHECK((reg_word_at_one(core_word({1})) - sigma0_pow(1, Rational(1))).is_zero());
    CHECK((reg_word_at_one(core_word({1, 1})) - sigma0_pow(2, rat(1, 2))).is_zero());
    CHECK((reg_word_at_one(core_word({1, 0})) + zeta(2)).is_zero());

    Expr r101 = reg_word_at_one(core_word({1, 0, 1}));
    Expr e101 = sigma0_pow(1, Rational(1)) * zeta(2) - zeta(3) * Rational(2);
    CHECK((r101 - e101).is_zero());

    Expr r110 = reg_word_at_one(core_word({1, 1, 0}));
    Expr e110 = zeta(3) - sigma0_pow(1, Rational(1)) * zeta(2);
    CHECK((r110 - e110).is_zero());

    // convergent words fall through to the plain value
    CHECK((reg_word_at_one(core_word({0, 1})) - zeta(2)).is_zero());
}

TEST_CASE("argument reflection 1-x on {0,1} words") {
    CHECK((one_minus_x(core_word({1})) + wexpr({0})).is_zero());
    CHECK((one_minus_x(core_word({0})) + wexpr({1})).is_zero());
    CHECK((one_minus_x(core_word({0, 0})) - wexpr({1, 1})).is_zero());

    // H_{0,1}(1-x) = zeta_2 + H_0 H_1 - H_{0,1}
    Expr got = one_minus_x(core_word({0, 1}));
    Expr expect = zeta(2) + wexpr({0}) * wexpr({1}) - wexpr({0, 1});
    CHECK((got - expand_products(expect)).is_zero());

    // H_{1,0,1}(1-x) = -H_0 H_{0,1} + 2 H_{0,0,1} - zeta_2 H_0 - 2 zeta_3
    got = one_minus_x(core_word({1, 0, 1}));
    expect = wexpr({0}) * wexpr({0, 1}) * Rational(-1) + wexpr({0, 0, 1}) * Rational(2) -
             zeta(2) * wexpr({0}) - zeta(3) * Rational(2);
    CHECK((got - expand_products(expect)).is_zero());

    CHECK_THROWS_AS(one_minus_x(core_word({-1, 1})), DomainError);
}

TEST_CASE("1-x twice is the identity") {
    std::vector<Word> words;
    for (int len = 1; len <= 4; ++len) {
        std::vector<Word> layer{Word{}};
        for (int i = 0; i < len; ++i) {
            std::vector<Word> next;
            for (const auto& w : layer)
                for (int v : {0, 1}) {
                    Word nw = w;
                    nw.push_back(Letter::core(v));
                    next.push_back(nw);
                }
            layer = std::move(next);
        }
        for (auto& w : layer) words.push_back(std::move(w));
    }
    REQUIRE(words.size() == 2 + 4 + 8 + 16);
    for (const auto& w : words) {
        Expr once = expand_products(one_minus_x(w));
        Expr twice = map_words(once, [](const Word& u) { return one_minus_x(u); });
        CHECK((expand_products(twice) - Expr::of(Functional::word(w))).is_zero());
    }
}

TEST_CASE("tabulated argument transforms") {
    Expr sq = transform_word(core_word({1, 0, 0, 1}), TransformKind::Square);
    CHECK(sq.terms.size() == 4);
    for (const auto& [t, c] : sq.terms) CHECK((c == 4 || c == -4));

    Expr inv = transform_word(core_word({1, 0, 1}), TransformKind::Inverse);
    bool has_ipi = false;
    for (const auto& [t, c] : inv.terms)
        for (const auto& [s, p] : t.consts)
            if (s.tag == ConstantSymbol::Tag::IPi) has_ipi = true;
    CHECK(has_ipi);

    Expr conf = transform_word(core_word({1, -1, 0}), TransformKind::Conformal);
    // net constants: 13/8 zeta_3 - ln2 zeta_2
    Rational z3_coeff = 0, l2z2_coeff = 0;
    for (const auto& [t, c] : conf.terms) {
        if (t == Term::of(ConstantSymbol::zeta(3))) z3_coeff = c;
        if (t == Term::of(ConstantSymbol::ln2()) * Term::of(ConstantSymbol::zeta(2)))
            l2z2_coeff = c;
    }
    CHECK(z3_coeff == rat(13, 8));
    CHECK(l2z2_coeff == Rational(-1));

    CHECK_THROWS_AS(transform_word(core_word({1, 1}), TransformKind::Square), DomainError);
}

TEST_CASE("Mellin kernels of the classic single sums") {
    MellinForm f1 = to_mellin(Functional::harmonic(HarmonicIndex{1}));
    REQUIRE(f1.pieces.size() == 1);
    CHECK(f1.pieces[0].pre == MellinPre::XNMinusOne);
    CHECK(f1.pieces[0].den == MellinDen::XMinusOne);
    CHECK((f1.pieces[0].num - Expr::constant(Rational(1))).is_zero());

    MellinForm f2 = to_mellin(Functional::harmonic(HarmonicIndex{2}));
    REQUIRE(f2.pieces.size() == 1);
    CHECK((f2.pieces[0].num + wexpr({0})).is_zero());

    MellinForm f11 = to_mellin(Functional::harmonic(HarmonicIndex{1, 1}));
    REQUIRE(f11.pieces.size() == 1);
    CHECK((f11.pieces[0].num - wexpr({1})).is_zero());

    MellinForm fm1 = to_mellin(Functional::harmonic(HarmonicIndex{-1}));
    REQUIRE(fm1.pieces.size() == 1);
    CHECK(fm1.pieces[0].pre == MellinPre::NegXNMinusOne);
    CHECK(fm1.pieces[0].den == MellinDen::XPlusOne);
    CHECK((fm1.pieces[0].num - Expr::constant(Rational(1))).is_zero());

    CHECK(to_string(f2).find("(x^N-1)/(x-1)") != std::string::npos);
}

TEST_CASE("Mellin forms reproduce every sum of weight <= 3 exactly") {
    for (unsigned w = 1; w <= 3; ++w)
        for (const auto& idx : harmonic_words_of_weight(w)) {
            HarmonicIndex hi{idx};
            MellinForm f = to_mellin(Functional::harmonic(hi));
            for (long long N = 1; N <= 10; ++N) {
                Expr v = mellin_eval_exact(f, N);
                Expr want = Expr::constant(eval_hsum_exact(hi, N));
                INFO("index weight " << w << " N " << N);
                CHECK((v - want).is_zero());
            }
        }
}

TEST_CASE("Mellin forms at weight 4, sampled") {
    const std::vector<std::vector<int>> sample{
        {-2, 1, 1}, {2, 2}, {-1, 1, 1, 1}, {1, 1, 2}, {-4}, {3, -1}, {1, -1, -1}, {-2, -2}};
    for (const auto& idx : sample) {
        HarmonicIndex hi{idx};
        MellinForm f = to_mellin(Functional::harmonic(hi));
        for (long long N = 1; N <= 8; ++N) {
            Expr v = mellin_eval_exact(f, N);
            CHECK((v - Expr::constant(eval_hsum_exact(hi, N))).is_zero());
        }
    }
}

TEST_CASE("the alternating presentation of S_{-2,1,1}") {
    MellinForm f = to_mellin(Functional::harmonic(HarmonicIndex{-2, 1, 1}));
    REQUIRE(f.pieces.size() == 1);
    CHECK(f.pieces[0].pre == MellinPre::NegXNMinusOne);
    // kernel zeta_3 - H_{0,1,1}(x)
    CHECK((f.pieces[0].num - (zeta(3) - wexpr({0, 1, 1}))).is_zero());

    MellinForm p = printed_alternating(f);
    CHECK(p.alternating_sign);
    REQUIRE(p.pieces.size() == 1);
    CHECK(p.pieces[0].pre == MellinPre::XPowN);
    CHECK((p.pieces[0].num - (wexpr({0, 1, 1}) - zeta(3))).is_zero());

    // additive constant H_{-1,0,1,1}(1) - zeta_3 ln 2
    Expr cexp = Expr::of(Term::of(ConstantSymbol::word_at_one(core_word({-1, 0, 1, 1})))) -
                Expr::of(Term::of(ConstantSymbol::zeta(3)) * Term::of(ConstantSymbol::ln2()));
    CHECK((p.constant - cexp).is_zero());

    for (long long N = 1; N <= 8; ++N) {
        Expr v = mellin_eval_exact(p, N);
        CHECK((v - Expr::constant(eval_hsum_exact(HarmonicIndex{-2, 1, 1}, N))).is_zero());
    }
}

TEST_CASE("S-sum Mellin form carries the log kernel and the weight as range") {
    SSumIndex idx{{2}, {rat(1, 2)}};
    MellinForm f = to_mellin(Functional::ssum(idx));
    CHECK(f.upper == rat(1, 2));
    REQUIRE(f.pieces.size() == 1);
    CHECK(f.pieces[0].logpow == 1);
    CHECK_THROWS_AS(mellin_eval_exact(f, 3), NumericError);

    // weight 1 collapses to the harmonic dictionary
    MellinForm g = to_mellin(Functional::ssum(SSumIndex{{2}, {Rational(1)}}));
    CHECK(g.upper == 1);
    REQUIRE(g.pieces.size() == 1);
    CHECK((g.pieces[0].num + wexpr({0})).is_zero());

    CHECK_THROWS_AS(to_mellin(Functional::ssum(SSumIndex{{1, 1}, {rat(1, 2), Rational(1)}})),
                    DomainError);
    CHECK_THROWS_AS(to_mellin(Functional::ssum(SSumIndex{{2}, {Rational(2)}})), DomainError);
    CHECK_THROWS_AS(to_mellin(Functional::harmonic(HarmonicIndex{2}, Bound::of_n(2))),
                    DomainError);
    CHECK_THROWS_AS(to_mellin(Functional::cyc(CycIndex{{{2, 1, 2, 1}}})), DomainError);
}

TEST_CASE("derivatives with respect to the sum bound") {
    // d/dN S_1 = zeta_2 - S_2
    Expr d1 = diff_N(Functional::harmonic(HarmonicIndex{1}));
    CHECK((d1 - (zeta(2) - hsum({2}))).is_zero());

    // d/dN S_2 = 2 zeta_3 - 2 S_3
    Expr d2 = diff_N(Functional::harmonic(HarmonicIndex{2}));
    CHECK((d2 - (zeta(3) * Rational(2) - hsum({3}) * Rational(2))).is_zero());

    // d/dN S_{-1} = -zeta_2/2 - S_{-2}
    Expr dm1 = diff_N(Functional::harmonic(HarmonicIndex{-1}));
    CHECK((dm1 + zeta(2) * rat(1, 2) + hsum({-2})).is_zero());

    // d/dN S_{1,1} = zeta_2 S_1 + zeta_3 - S_{1,2} - S_{2,1}
    Expr d11 = diff_N(Functional::harmonic(HarmonicIndex{1, 1}));
    Expr e11 = zeta(2) * hsum({1}) + zeta(3) - hsum({1, 2}) - hsum({2, 1});
    CHECK((d11 - e11).is_zero());

    // linear extension over expressions, constants drop
    Expr lin = diff_N(Expr::constant(Rational(3)) + hsum({1}) * Rational(2));
    CHECK((lin - (zeta(2) - hsum({2})) * Rational(2)).is_zero());

    CHECK_THROWS_AS(diff_N(Functional::harmonic(HarmonicIndex{2, 2})), DomainError);
    CHECK_THROWS_AS(diff_N(Functional::ssum(SSumIndex{{1}, {rat(1, 2)}})), DomainError);
}
