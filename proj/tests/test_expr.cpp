#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helicity/expr.hpp"

using namespace helicity;
using namespace helicity::expr;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("precedence and associativity") {
  CHECK(parse_expression("1+2*3").eval() == 7);
  CHECK(parse_expression("(1+2)*3").eval() == 9);
  CHECK(parse_expression("8-3-2").eval() == 3);
  CHECK(parse_expression("8/4/2").eval() == 1);
  CHECK(parse_expression("2^3^2").eval() == 64);  // left-associative
  CHECK(parse_expression("-2^2").eval() == -4);   // ^ binds tighter than unary minus
  CHECK(parse_expression("2^-1").eval() == 0.5);
  CHECK(parse_expression("--3").eval() == 3);
  CHECK(parse_expression("1.5e2 + .5").eval() == 150.5);
  CHECK(parse_expression("pi").eval() == kPi);
}

TEST_CASE("parameters and functions") {
  const Expr e = parse_expression("h0*(1 + a*sin(k*x1))");
  CHECK(e.eval({{"h0", 1}, {"a", 0.1}, {"k", 2}, {"x1", kPi / 4}}) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(e.names() == std::set<std::string>{"a", "h0", "k", "x1"});
  CHECK(parse_expression("sqrt(4) + exp(0) + tanh(0) + cos(0)").eval() == 4);
}

TEST_CASE("pythagorean identity on a grid") {
  const Grid g = Grid::cube(2, 16);
  const ScalarField f = eval_on_grid(parse_expression("sin(x1 + 0.3*x2)^2 + cos(x1 + 0.3*x2)^2"), g);
  CHECK((f - 1).abs().maxCoeff() < 1e-15);
}

TEST_CASE("grid sampling") {
  const Grid g = Grid::cube(1, 4);
  const ScalarField x = eval_on_grid(parse_expression("x1"), g);
  REQUIRE(x.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(i * kPi / 2));
  const ScalarField two = eval_on_grid(parse_expression("2"), g);
  CHECK((two == 2).all());
  const ScalarField tt = eval_on_grid(parse_expression("t*c"), g, {{"c", 3}}, 0.5);
  CHECK((tt == 1.5).all());
}

TEST_CASE("domain errors name the point") {
  const Grid g = Grid::cube(1, 4);
  try {
    eval_on_grid(parse_expression("1/x1"), g);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("x1=0") != std::string::npos);
  }
  CHECK_THROWS_AS(eval_on_grid(parse_expression("sqrt(x1 - 1)"), g), DomainError);
  CHECK_THROWS_AS(eval_on_grid(parse_expression("(x1 - 1)^0.5"), g), DomainError);
  CHECK_THROWS_AS(parse_expression("exp(1000)").eval(), DomainError);
  CHECK(parse_expression("(-2)^3").eval() == -8);
}

TEST_CASE("syntax errors carry positions") {
  auto position = [](const char* src) {
    try {
      parse_expression(src);
    } catch (const SyntaxError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  CHECK(position("1 +") == 3);
  CHECK(position("(1 + 2") == 6);
  CHECK(position("2 $ 3") == 2);
  CHECK(position("1e") == 1);
  CHECK(position("sin") == 0);
  CHECK(position("1e999") == 0);
  CHECK(position("") == 0);
  CHECK_THROWS_AS(parse_expression("foo(1)"), UnknownNameError);
}

TEST_CASE("unknown identifiers") {
  const Grid g = Grid::cube(2, 4);
  try {
    eval_on_grid(parse_expression("x3 + 1"), g);
    FAIL("expected an unknown name");
  } catch (const UnknownNameError& e) {
    CHECK(e.name() == "x3");
  }
  CHECK_THROWS_AS(require_bound(parse_expression("a*b"), {"a"}), UnknownNameError);
  CHECK_NOTHROW(require_bound(parse_expression("a*pi"), {"a"}));
}

TEST_CASE("print then parse is idempotent") {
  const char* sources[] = {"1+2*3",       "-x1^2",          "2^-1^2",          "a/b/c - -d",
                           "sin(x1)*cos(-(x2+t))", "0.1 + 1e-17*x1", "h0*(1 + a*sin(k*x1))",
                           "((3))",       "2^(1/3)",        "-(-(-1))"};
  for (const char* src : sources) {
    const Expr once = parse_expression(src);
    const Expr twice = parse_expression(once.str());
    CHECK(once.str() == twice.str());
    const std::map<std::string, double> vals = {{"x1", 0.7}, {"x2", -1.3}, {"t", 0.2}, {"a", 2},
                                                {"b", 3},     {"c", 5},     {"d", 7},   {"h0", 1},
                                                {"k", 2}};
    CHECK(once.eval(vals) == twice.eval(vals));
  }
}
