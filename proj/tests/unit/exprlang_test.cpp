#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "expr_cases.hpp"
#include "expr_gen.hpp"
#include "expr_oracle.hpp"
#include "selection/errors.hpp"
#include "selection/exprlang.hpp"

using namespace selection;
using selection::expr::eval;
using selection::expr::parse;
using selection::expr::print;

namespace {

std::size_t parse_error_offset(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error for '" << src << "'");
  return 0;
}

std::string parse_error_detail(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.detail();
  }
  return "";
}

}  // namespace

TEST_CASE("parse and eval golden cases") {
  for (const auto& c : testing::kEvalCases) {
    INFO(c.source << " at x = " << c.x);
    CHECK(eval(parse(c.source), c.x) == c.expected);
  }
  CHECK(eval(parse("pi"), 0.0) == doctest::Approx(3.14159265358979));
  CHECK(eval(parse("e"), 0.0) == doctest::Approx(2.71828182845905));
}

TEST_CASE("precedence and associativity") {
  for (const auto& c : testing::kPrintCases) CHECK(print(parse(c.source)) == c.printed);
}

TEST_CASE("syntax errors carry byte offsets") {
  for (const auto& c : testing::kErrorCases) {
    INFO("source: '" << c.source << "'");
    CHECK(parse_error_offset(c.source) == c.offset);
    CHECK(parse_error_detail(c.source) == c.detail);
  }
}

TEST_CASE("evaluation domain errors report the subexpression") {
  try {
    eval(parse("1 + 1/(x-1)"), 1.0);
    FAIL("expected division error");
  } catch (const EvalError& e) {
    CHECK(e.offset() == 5);
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }
  try {
    eval(parse("sqrt(x)"), -1.0);
    FAIL("expected sqrt error");
  } catch (const EvalError& e) {
    CHECK(e.offset() == 0);
  }
  CHECK_THROWS_AS(eval(parse("(-1)^0.5"), 0.0), EvalError);
}

TEST_CASE("grid-certified bounds") {
  const Grid grid(0.0, 1.0, 10);
  CHECK(expr::bound_on_grid(parse("1"), grid) == std::pair{1.0, 1.0});
  CHECK(expr::bound_on_grid(parse("x"), grid) == std::pair{0.0, 1.0});
  const auto [lo, hi] = expr::bound_on_grid(parse("2 - (x-0.3)^2"), grid);
  CHECK(hi == 2.0);
  CHECK(lo == doctest::Approx(2.0 - 0.49));
  CHECK_THROWS_AS(expr::bound_on_grid(parse("1/(x-0.5)"), grid), EvalError);
}

TEST_CASE("structural equality ignores offsets") {
  CHECK(parse("1+x") == parse("  1 +   x"));
  CHECK_FALSE(parse("1+x") == parse("x+1"));
  CHECK_FALSE(parse("min(x,1)") == parse("max(x,1)"));
}

TEST_CASE("print/parse round trip on random trees") {
  testing::ExprGenerator gen(20240611);
  for (int i = 0; i < 2000; ++i) {
    const auto e = gen.any(5);
    const std::string text = print(e);
    INFO(text);
    const auto back = parse(text);
    REQUIRE(back == e);
    CHECK(print(back) == text);
  }
}

TEST_CASE("eval agrees with a direct string interpreter") {
  testing::ExprGenerator gen(77);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const std::string text = print(gen.safe(4));
    const double x = xs(rng);
    INFO(text << " at x = " << x);
    const double got = eval(parse(text), x);
    const double want = testing::DirectEvaluator(text, x).value();
    REQUIRE(std::isfinite(want));
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}
