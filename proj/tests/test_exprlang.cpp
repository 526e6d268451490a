#include "picard/exprlang.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace picard::expr;

namespace {

const std::set<std::string> kVars = {"t", "s", "x"};

double ev(const std::string& text, EvalContext ctx = {}) {
    return parse(text, kVars).eval(ctx);
}

}  // namespace

TEST_CASE("operator precedence and associativity") {
    CHECK(structurally_equal(parse("t*s*x/2", kVars), parse("((t*s)*x)/2", kVars)));
    CHECK(structurally_equal(parse("t+s*x", kVars), parse("t+(s*x)", kVars)));
    CHECK(structurally_equal(parse("-t^2", kVars), parse("-(t^2)", kVars)));
    CHECK(structurally_equal(parse("2^3^2", kVars), parse("2^(3^2)", kVars)));
    CHECK(structurally_equal(parse("t-s-x", kVars), parse("(t-s)-x", kVars)));
    CHECK(!structurally_equal(parse("t+s", kVars), parse("s+t", kVars)));
    CHECK(parse("exp(-(t-s)^2)", kVars).eval({{"t", 1.0}, {"s", 1.0}}) == 1.0);
}

TEST_CASE("parse errors carry byte offsets") {
    try {
        parse("2*", kVars);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 2);
    }
    try {
        parse("t + q", kVars);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
        CHECK(std::string(e.what()).find('q') != std::string::npos);
    }
    CHECK_THROWS_AS(parse("", kVars), ParseError);
    CHECK_THROWS_AS(parse("(t", kVars), ParseError);
    CHECK_THROWS_AS(parse("foo(1)", kVars), ParseError);
    CHECK_THROWS_AS(parse("min(1)", kVars), ParseError);        // arity
    CHECK_THROWS_AS(parse("exp(1, 2)", kVars), ParseError);     // arity
    CHECK_THROWS_AS(parse("exp", kVars), ParseError);           // bare function name
    CHECK_THROWS_AS(parse("1 2", kVars), ParseError);           // trailing input
}

TEST_CASE("evaluation domain errors carry the sub-expression") {
    try {
        ev("sqrt(-1)");
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.subexpr.find("sqrt") != std::string::npos);
    }
    CHECK_THROWS_AS(ev("log(-2)"), EvalError);
    CHECK_THROWS_AS(ev("0^-1"), EvalError);
    CHECK_THROWS_AS(ev("pow(0, -2)"), EvalError);
    CHECK_THROWS_AS(ev("(-1)^0.5"), EvalError);
    CHECK_THROWS_AS(ev("t"), EvalError);  // declared but unbound
}

TEST_CASE("differential table of hand-computed values") {
    struct Triple {
        const char* text;
        EvalContext ctx;
        double expect;
    };
    const std::vector<Triple> table = {
        {"1+2*3", {}, 7.0},
        {"(1+2)*3", {}, 9.0},
        {"2^10", {}, 1024.0},
        {"2^-1", {}, 0.5},
        {"-3+5", {}, 2.0},
        {"10/4", {}, 2.5},
        {"exp(0)", {}, 1.0},
        {"exp(1)", {}, 2.7182818284590452},
        {"log(1)", {}, 0.0},
        {"log(exp(2))", {}, 2.0},
        {"sin(0)", {}, 0.0},
        {"cos(0)", {}, 1.0},
        {"sqrt(16)", {}, 4.0},
        {"abs(-5)", {}, 5.0},
        {"tanh(0)", {}, 0.0},
        {"tanh(1)", {}, 0.76159415595576485},
        {"min(2,3)", {}, 2.0},
        {"max(2,3)", {}, 3.0},
        {"pow(2,0.5)", {}, 1.4142135623730951},
        {"pow(9,0.5)", {}, 3.0},
        {"t+s", {{"t", 1.0}, {"s", 2.0}}, 3.0},
        {"t*s", {{"t", 3.0}, {"s", 4.0}}, 12.0},
        {"t-s-1", {{"t", 10.0}, {"s", 3.0}}, 6.0},
        {"t/s/2", {{"t", 12.0}, {"s", 3.0}}, 2.0},
        {"2^3^2", {}, 512.0},
        {"-2^2", {}, -4.0},
        {"(-2)^2", {}, 4.0},
        {"1/2 + 1/4", {}, 0.75},
        {"min(1, exp(1))", {}, 1.0},
        {"sin(1)^2 + cos(1)^2", {}, 1.0},
        {"x^2 - 2*x + 1", {{"x", 5.0}}, 16.0},
        {"max(min(1,2), -3)", {}, 1.0},
    };
    CHECK(table.size() >= 30);
    for (const auto& row : table) {
        const double got = ev(row.text, row.ctx);
        if (row.expect == 0.0)
            CHECK(std::abs(got) <= 1e-15);
        else
            CHECK(std::abs(got - row.expect) <= 1e-15 * std::abs(row.expect));
    }
}

TEST_CASE("print and reparse reproduces the tree") {
    const std::vector<std::string> samples = {
        "t*s*x/2",      "exp(-(t-s)^2)",          "min(1, max(t, s))",
        "2^3^2",        "-t^2 + sqrt(abs(s))",     "pow(t, 2) / (1 + x)",
        "tanh(t)*cos(s)-sin(x)", "1e-3 * t + 2.5E2", "0.125",
    };
    for (const auto& text : samples) {
        const Expr e = parse(text, kVars);
        const Expr round = parse(e.print(), kVars);
        CHECK(structurally_equal(e, round));
    }
}

TEST_CASE("variable collection") {
    const auto vars = variables(parse("t + exp(s) * 2", kVars));
    CHECK(vars == std::set<std::string>{"t", "s"});
    CHECK(variables(parse("1+2", kVars)).empty());
}

TEST_CASE("scientific notation and leading dots parse as numbers") {
    CHECK(ev("1e3") == 1000.0);
    CHECK(ev(".5 * 4") == 2.0);
    CHECK(ev("2.5e-1") == 0.25);
}
