#include <doctest.h>

#include <cmath>

#include "wkam/expression.hpp"

using namespace wkam;

TEST_CASE("parse and evaluate basic potentials") {
    auto V = PotentialExpr::parse("cos(2*pi*x)", 1);
    CHECK(V.eval(0.0) == doctest::Approx(1.0).epsilon(1e-14));

    auto zero = PotentialExpr::parse("0", 1);
    CHECK(zero.eval(0.3) == 0.0);
    CHECK(zero.eval(0.9) == 0.0);

    // Independent oracle: direct evaluation with std::cos/std::sin.
    auto mix = PotentialExpr::parse("cos(2*pi*x)+0.5*sin(4*pi*x)", 1);
    for (double x : {0.0, 0.25, 0.5, 0.37}) {
        double expect = std::cos(2 * M_PI * x) + 0.5 * std::sin(4 * M_PI * x);
        CHECK(mix.eval(x) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(mix.eval(0.5) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("grammar corners") {
    CHECK(PotentialExpr::parse("2^3^2", 1).eval(0.0) == doctest::Approx(512.0)); // right assoc
    CHECK(PotentialExpr::parse("-x^2", 1).eval(0.5) == doctest::Approx(-0.25));
    CHECK(PotentialExpr::parse("2^-1", 1).eval(0.0) == doctest::Approx(0.5));
    CHECK(PotentialExpr::parse("abs(-3)", 1).eval(0.0) == doctest::Approx(3.0));
    CHECK(PotentialExpr::parse("exp(0)", 1).eval(0.0) == doctest::Approx(1.0));
    CHECK(PotentialExpr::parse("(1+2)*(3-1)/2", 1).eval(0.0) == doctest::Approx(3.0));
    CHECK(PotentialExpr::parse(" 1 + 2 * x ", 1).eval(0.25) == doctest::Approx(1.5));
}

TEST_CASE("evaluation is periodic by construction") {
    auto V = PotentialExpr::parse("x", 1); // sawtooth after wrapping
    CHECK(V.eval(1.25) == doctest::Approx(0.25));
    CHECK(V.eval(-0.25) == doctest::Approx(0.75));
    auto W = PotentialExpr::parse("x+y", 2);
    CHECK(W.eval(1.25, 2.5) == doctest::Approx(0.75));
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(PotentialExpr::parse("", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("cos(2*pi*x", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("foo(x)", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("1 + * 2", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("y", 1), ParseError); // y needs dim 2
    CHECK_NOTHROW(PotentialExpr::parse("y", 2));

    try {
        PotentialExpr::parse("1 + foo(x)", 1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("non-finite values at probe nodes are rejected") {
    CHECK_THROWS_AS(PotentialExpr::parse("1/0", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("1/(x-0.5)", 1), ParseError);
    CHECK_THROWS_AS(PotentialExpr::parse("exp(1000)", 1), ParseError);
}

TEST_CASE("symbolic derivative matches finite differences") {
    auto V = PotentialExpr::parse("cos(2*pi*x)+0.3*exp(sin(2*pi*x))", 1);
    auto dV = V.derivative(0);
    const double h = 1e-6;
    for (double x : {0.1, 0.33, 0.71, 0.9}) {
        double fd = (V.eval(x + h) - V.eval(x - h)) / (2 * h);
        CHECK(dV.eval(x) == doctest::Approx(fd).epsilon(1e-7));
    }

    auto W = PotentialExpr::parse("cos(2*pi*x)*sin(2*pi*y)", 2);
    auto dWy = W.derivative(1);
    for (double x : {0.2, 0.6}) {
        double fd = (W.eval(x, 0.4 + h) - W.eval(x, 0.4 - h)) / (2 * h);
        CHECK(dWy.eval(x, 0.4) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("parse-evaluate round trip is deterministic") {
    auto a = PotentialExpr::parse("cos(2*pi*x)+0.5*sin(4*pi*x)", 1);
    auto b = PotentialExpr::parse(a.source(), 1);
    for (int i = 0; i < 64; ++i) {
        double x = i / 64.0;
        CHECK(a.eval(x) == b.eval(x));
    }
}
