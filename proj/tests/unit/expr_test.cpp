#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace symkawa;
using test::same;

TEST_CASE("parse builds the documented atoms") {
  Expr e = parse("beta(t)*u_3x");
  CHECK(e.kind() == ExprKind::Mul);
  CHECK(e.operands().size() == 2);
  CHECK(same(e, parse("u_3x*beta(t)")));
  Expr s = parse("delta*t^((5*rho+2)/3)");
  CHECK(s.kind() == ExprKind::Mul);
  Expr c = parse("lambda*(t^2+1)^(1/2)*exp(-3*nu*arctan(t))");
  CHECK(same(parse(c.str()), c));
  CHECK(parse("2^3^2").number() == 512);
  CHECK(parse("-u^2").str() == parse("-(u^2)").str());
}

TEST_CASE("parse reports byte offsets") {
  try {
    parse("u + * x");
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse("sin(x"), InputError);
  CHECK_THROWS_AS(parse("t^x"), InputError);
}

TEST_CASE("differentiate") {
  Assumptions pos = Assumptions::parse({"t>0"});
  CHECK(same(differentiate(parse("t^rho"), Expr::t(), 1, pos), parse("rho*t^(rho-1)"), pos));
  CHECK(same(differentiate(parse("A(t)"), Expr::t()), parse("alpha(t)")));
  CHECK(same(differentiate(parse("u^n"), Expr::u(), 1, Assumptions::parse({"u>0"})), parse("n*u^(n-1)"),
             Assumptions::parse({"u>0"})));
  CHECK(same(differentiate(parse("beta(t)"), Expr::t(), 2), parse("diff(beta(t),t,2)")));
  CHECK(same(differentiate(parse("t^3*x"), Expr::t(), 2), parse("6*t*x")));
}

TEST_CASE("normalize") {
  CHECK(normalize(parse("(u+1)^2 - u^2 - 2*u - 1")).is_zero());
  Assumptions pos = Assumptions::parse({"t>0"});
  CHECK(normalize(parse("t^(1/2)*t^(3/2) - t^2"), pos).is_zero());
  CHECK(normalize(parse("exp(t)^3 - exp(3*t)")).is_zero());
  CHECK(normalize(parse("ln(exp(t+x)) - t - x")).is_zero());
  CHECK_FALSE(normalize(parse("sin(x)^2 + cos(x)^2 - 1")).is_zero());
  CHECK(is_zero(parse("sin(x)^2 + cos(x)^2 - 1")) == ZeroVerdict::ProbablyZero);
  CHECK(is_zero(parse("sin(x)^2 + cos(x)^2")) == ZeroVerdict::Nonzero);
}

TEST_CASE("substitute") {
  Expr fu = parse("diff(f(u),u,1)");
  CHECK(same(substitute(fu, {{parse("f(u)"), parse("u^2")}}), parse("2*u")));
  Expr lhs = parse("u_t + u*u_x");
  Expr r = substitute(lhs, {{parse("u_t"), parse("-(u*u_x + beta*u_3x + sigma*u_5x)")}});
  CHECK(same(r, parse("-beta*u_3x - sigma*u_5x")));
  Expr s = substitute(parse("delta*t^((5*rho+2)/3)"), {{Expr::parameter("rho"), Expr(2)}});
  CHECK(same(s, parse("delta*t^4")));
}

TEST_CASE("eval_numeric") {
  NumericEnv env;
  env.symbols = {{"t", 3.0}};
  CHECK(eval_numeric(parse("t^2"), env) == doctest::Approx(9.0));
  env.symbols = {{"t", 1.0}};
  CHECK(std::abs(eval_numeric(parse("arctan(t)"), env) - 0.7853981633974483) < 1e-12);
  env.symbols = {{"t", 2.0}, {"delta", 1.0}, {"rho", 1.0}};
  CHECK(eval_numeric(parse("delta*t^((5*rho+2)/3)"), env) == doctest::Approx(5.0396842).epsilon(1e-7));
}

TEST_CASE("algebraic properties on random expressions") {
  std::mt19937_64 rng(7);
  NumericEnv env;
  for (int i = 0; i < 1000; ++i) {
    Expr a = test::random_expr(rng, 3);
    REQUIRE(normalize(a - a).is_zero());
  }
  for (int i = 0; i < 200; ++i) {
    Expr a = test::random_expr(rng, 3), b = test::random_expr(rng, 3);
    Expr da = differentiate(a, Expr::x()), db = differentiate(b, Expr::x());
    REQUIRE(normalize(differentiate(a + b, Expr::x()) - da - db).is_zero());
    REQUIRE(normalize(differentiate(a * b, Expr::x()) - da * b - a * db).is_zero());
    REQUIRE(parse(a.str()) == a);
    Expr n = normalize(a);
    for (int k = 0; k < 8; ++k) {
      std::uniform_real_distribution<double> d(0.2, 1.5);
      env.symbols = {{"t", d(rng)}, {"x", d(rng)}, {"u", d(rng)}, {"k", d(rng)}};
      double va = eval_numeric(a, env), vn = eval_numeric(n, env);
      if (!std::isfinite(va)) continue;
      REQUIRE(std::abs(va - vn) <= 1e-9 * std::max(1.0, std::abs(va)));
    }
  }
}

TEST_CASE("assumptions parse and reject malformed facts") {
  Assumptions a = Assumptions::parse({"t>0", "n!=0"});
  CHECK(a.positive("t"));
  CHECK(a.nonzero("n"));
  CHECK_THROWS_AS(Assumptions::parse({"t>>0"}), InputError);
}
