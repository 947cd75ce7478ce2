#include <catch2/catch_amalgamated.hpp>

#include <nestsum/grammar.hpp>

using namespace nestsum;

namespace {
std::string rt(const std::string& s) { return to_string(parse_expr(s)); }
}  // namespace

TEST_CASE("parse round trips on canonical strings") {
    const char* fixed[] = {
        "S[1](N)",
        "S[-2,1,1](N)",
        "2*S[1,1](N) - S[2](N)",
        "S[(1,1/2),(2,-1)](N)",
        "S[(2,1/3)](2N)",
        "CS[{2,1,2,-1}](N)",
        "CS[{1,0,1,1},{3,2,2,-1}](inf)",
        "H[0,1](x)",
        "H[0,1,-1](x)",
        "H[-1,0](1/2)",
        "H[2,-1/2](x)",
        "H[(4,1),0](1/2)",
        "S[1](inf)",
        "1/2 + S[1](N) + S[3](N)",
        "2*ln2 + z2",
        "-1/2*z2*ln2^2 + li4half",
        "-sigma0 + catalan",
        "S[1](N)*S[1](N) - S[1,1](N)",
        "7/16",
        "0",
        "z2*H[1,0](x)",
    };
    for (const char* s : fixed) {
        INFO(s);
        CHECK(rt(s) == s);
    }
}

TEST_CASE("parse normalizes order and folded values") {
    CHECK(rt("S[2](N) + 2*S[1,1](N)") == "2*S[1,1](N) + S[2](N)");
    CHECK(rt("H[0,1](1)") == "z2");
    CHECK(rt("3*H[0,-1](1)") == "3/2*z2");
    CHECK(rt("H[-1](1)") == "ln2");
    CHECK(rt("H[0,1,1](1)") == "z3");
    CHECK(rt("H[0,-1,-1](1)") == "H[0,-1,-1](1)");
    CHECK(rt("H[0,0](1)") == "0");
    CHECK(rt("H[0,1](0)") == "0");
    CHECK(rt("S[1](N) - S[1](N)") == "0");
    CHECK(rt("2^3 + 1") == "9");
    CHECK(rt("z2^1") == "z2");
    CHECK(rt("S[1](N)^2") == "S[1](N)*S[1](N)");
    CHECK(rt(" 1/2 * S[ 1 ]( N ) ") == "1/2*S[1](N)");
    CHECK(rt("H[(1,0)](x)") == "H[(1,0)](x)");  // 1/(x-1), distinct from letter 1
    CHECK(rt("+S[1](N)") == "S[1](N)");
}

TEST_CASE("parse errors carry positions") {
    auto pos_of = [](const std::string& s) -> size_t {
        try {
            parse_expr(s);
        } catch (const ParseError& e) {
            return e.position;
        }
        return size_t(-1);
    };
    CHECK(pos_of("S[0](N)") == 2);
    CHECK(pos_of("S[1](M)") != size_t(-1));
    CHECK(pos_of("w2") == 0);
    CHECK(pos_of("z2 z3") == 3);
    CHECK(pos_of("S[1](N") != size_t(-1));
    CHECK(pos_of("1/0") == 0);
    CHECK(pos_of("CS[{2,3,1,1}](N)") == 4);        // needs a > b
    CHECK(pos_of("CS[{2,1,1,3}](N)") == 4);        // sign must be +-1
    CHECK(pos_of("S[(0,1)](N)") == 3);             // exponent >= 1
    CHECK(pos_of("H[1,0](1)") != size_t(-1));      // divergent at 1
    CHECK(pos_of("H[1/2,1](1)") != size_t(-1));    // pole inside (0,1)
    CHECK(pos_of("H[(4,3)](x)") != size_t(-1));    // l >= phi(4)
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("S[1,1,1](0N)"), ParseError);
}

TEST_CASE("json rendering") {
    CHECK(to_json(parse_expr("0")) == "[]");
    CHECK(to_json(parse_expr("-1/2*S[2](N)")) ==
          "[{\"term\":\"S[2](N)\",\"coeff\":{\"num\":\"-1\",\"den\":\"2\"}}]");
    CHECK(to_json(parse_expr("3")) == "[{\"term\":\"1\",\"coeff\":{\"num\":\"3\",\"den\":\"1\"}}]");
}
