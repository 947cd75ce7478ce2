#include <catch2/catch_amalgamated.hpp>

#include <nestsum/oracle.hpp>
#include <nestsum/rational.hpp>

using namespace nestsum;

TEST_CASE("rational helpers") {
    CHECK(rat(22, 7) == Rational(22) / 7);
    CHECK_THROWS(rat(1, 0));
    CHECK(qpow(rat(2, 3), 3) == rat(8, 27));
    CHECK(qpow(rat(2, 3), -2) == rat(9, 4));
    CHECK(qpow(Rational(5), 0) == 1);
    CHECK_THROWS(qpow(Rational(0), -1));
    CHECK(ipow(BigInt(3), 5) == 243);
    CHECK(factorial(10) == 3628800);
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(3, 5) == 0);
    CHECK(to_string(rat(-3, 6)) == "-1/2");
    CHECK(to_string(Rational(4)) == "4");
}

TEST_CASE("moebius and totient") {
    int mu[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};  // mu(1..12)
    for (unsigned n = 1; n <= 12; ++n) CHECK(moebius(n) == mu[n - 1]);
    CHECK(moebius(30) == -1);
    CHECK(moebius(210) == 1);
    unsigned phi[] = {1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4};
    for (unsigned n = 1; n <= 12; ++n) CHECK(euler_phi(n) == phi[n - 1]);
    CHECK(euler_phi(36) == 12);
}

TEST_CASE("exact sums, worked values") {
    // harmonic numbers
    CHECK(eval_hsum_exact(HarmonicIndex{1}, 3) == rat(11, 6));
    CHECK(eval_hsum_exact(HarmonicIndex{1}, 1) == 1);
    CHECK(eval_hsum_exact(HarmonicIndex{1}, 0) == 0);
    CHECK(eval_hsum_exact(HarmonicIndex{2}, 4) == rat(205, 144));

    // alternation enters through the sign of the index
    CHECK(eval_hsum_exact(HarmonicIndex{-1}, 2) == rat(-1, 2));
    CHECK(eval_hsum_exact(HarmonicIndex{-2, 1, 1}, 2) == rat(-9, 16));

    // nesting uses inner partial sums up to the same k
    // S_{1,1}(2) = 1*S_1(1) + 1/2*S_1(2) = 1 + 3/4
    CHECK(eval_hsum_exact(HarmonicIndex{1, 1}, 2) == rat(7, 4));

    // empty index behaves as the constant 1
    CHECK(eval_ssum_exact(SSumIndex{{}, {}}, 5) == 1);
}

TEST_CASE("exact sums, general weights") {
    // S_{2}(1/3; N) = sum 3^-k / k^2
    Rational expect = rat(1, 3) + rat(1, 9) / 4 + rat(1, 27) / 9;
    CHECK(eval_ssum_exact(SSumIndex{{2}, {rat(1, 3)}}, 3) == expect);

    // sign weights reproduce the harmonic case
    CHECK(eval_ssum_exact(as_ssum(HarmonicIndex{-2, 1, 1}), 2) == rat(-9, 16));
}

TEST_CASE("exact cyclotomic sums") {
    // sum_{k<=2} (-1)^k / (2k+1)^2 = -1/9 + 1/25
    CHECK(eval_cyc_exact(CycIndex{CycLevel(2, 1, 2, -1)}, 2) == rat(-16, 225));

    // a=1, b=0 with positive sign collapses to the harmonic case
    CHECK(eval_cyc_exact(CycIndex{CycLevel(1, 0, 1, 1)}, 3) == rat(11, 6));

    // nested: sum_k (-1)^k/(2k+1) * sum_{j<=k} 1/(3j+2)
    Rational inner1 = rat(1, 5), inner2 = inner1 + rat(1, 8);
    CHECK(eval_cyc_exact(CycIndex{CycLevel(2, 1, 1, -1), CycLevel(3, 2, 1, 1)}, 2) ==
          -rat(1, 3) * inner1 + rat(1, 5) * inner2);
}

TEST_CASE("exact sums, resource guard") {
    CHECK_THROWS_AS(eval_hsum_exact(HarmonicIndex{1}, 10'000'001), ResourceGuard);
    CHECK_THROWS_AS(eval_hsum_exact(HarmonicIndex{1, 1, 1}, 4'000'000), ResourceGuard);
    CHECK_THROWS_AS(eval_hsum_exact(HarmonicIndex{1}, -1), DomainError);
}
