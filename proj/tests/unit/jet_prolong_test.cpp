#include <doctest.h>

#include "helpers.hpp"
#include "symkawa/classify.hpp"
#include "symkawa/prolong.hpp"

using namespace symkawa;
using test::same;

namespace {

PdeInstance kdv_like() { return PdeInstance(PdeClass::LinearGauged, Expr::u(), 1, 1, 1); }

VectorField random_field(std::mt19937_64& rng) {
  const char* pool[] = {"0", "1", "t", "x", "u", "t^2", "x*t", "u*t", "2*x", "-u"};
  std::uniform_int_distribution<int> d(0, 9);
  return VectorField::parse(std::string(pool[d(rng)]) + "; " + pool[d(rng)] + "; " + pool[d(rng)]);
}

bool same_field(const VectorField& a, const VectorField& b) {
  return canonical(a.tau - b.tau).is_zero() && canonical(a.xi - b.xi).is_zero() &&
         canonical(a.eta - b.eta).is_zero();
}

}  // namespace

TEST_CASE("total derivatives") {
  CHECK(same(total_derivative(Expr::u(), Direction::X), parse("u_x")));
  CHECK(same(total_derivative(parse("beta(t)*u_3x"), Direction::X), parse("beta(t)*u_4x")));
  CHECK(same(total_derivative(parse("x*u_x"), Direction::T), parse("x*u_tx")));
  CHECK(same(total_derivative(parse("beta(t)*u"), Direction::T), parse("diff(beta(t),t,1)*u + beta(t)*u_t")));
}

TEST_CASE("on-shell reduction") {
  PdeInstance pde = kdv_like();
  CHECK(on_shell_reduce(to_expr(pde.lhs()), pde).is_zero());
  CHECK(same(on_shell_reduce(parse("u_tx"), pde), parse("-(u_x^2 + u*u_2x + u_4x + u_6x)")));
  CHECK(same(on_shell_reduce(parse("u_t + u_3x"), pde), parse("-u*u_x - u_5x")));
}

TEST_CASE("jet monomial splitting") {
  auto parts = split_by_jets(to_poly(parse("3*u_x*u_2x + t*u_x + x")));
  CHECK(parts.size() == 3);
  CHECK_THROWS(split_by_jets(to_poly(parse("exp(u_x)"))));
}

TEST_CASE("invariance residual") {
  PdeInstance generic(PdeClass::NonlinearGauged, parse("u^2"), 1, parse("t^2+1"), parse("t^3+t+1"));
  CHECK(invariance_residual(VectorField::parse("0; 1; 0"), generic).is_zero());
  Assumptions pos = Assumptions::parse({"t>0"});
  PdeInstance c1(PdeClass::LinearGauged, Expr::u(), 1, parse("lambda*t^rho"), parse("delta*t^((5*rho+2)/3)"), 0, pos);
  CHECK(is_symmetry(VectorField::parse("3*t; (rho+1)*x; (rho-2)*u", pos), c1) == Verdict::Yes);
  PdeInstance flat(PdeClass::NonlinearGauged, parse("u^2"), 1, 1, 1);
  CHECK(is_symmetry(VectorField::parse("t; x; 0"), flat) == Verdict::No);
}

TEST_CASE("is_symmetry examples") {
  PdeInstance c2(PdeClass::NonlinearGauged, parse("u^2"), 1, parse("lambda"), parse("delta"));
  CHECK(is_symmetry(VectorField::parse("1; 0; 0"), c2) == Verdict::Yes);
  PdeInstance c4(PdeClass::LinearGauged, Expr::u(), 1, parse("lambda*(t^2+1)^(1/2)*exp(-3*nu*arctan(t))"),
                 parse("delta*(t^2+1)^(3/2)*exp(-5*nu*arctan(t))"));
  CHECK(is_symmetry(VectorField::parse("t^2+1; (t-nu)*x; x-(t+nu)*u"), c4) == Verdict::Yes);
  PdeInstance bad(PdeClass::NonlinearGauged, parse("u^2"), 1, 1, Expr::t());
  CHECK(is_symmetry(VectorField::parse("1; 0; 0"), bad) == Verdict::No);
}

TEST_CASE("commutator examples") {
  auto c = [](const char* a, const char* b) { return commutator(VectorField::parse(a), VectorField::parse(b)); };
  CHECK(same_field(c("1;0;0", "0;t;1"), VectorField::parse("0;1;0")));
  CHECK(same_field(c("t;x;0", "0;1;0"), VectorField::parse("0;-1;0")));
  CHECK(same_field(c("0;1;0", "t^2+1; (t-nu)*x; x-(t+nu)*u"), VectorField::parse("0; t-nu; 1")));
}

TEST_CASE("commutator is bilinear, antisymmetric and satisfies Jacobi") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    VectorField a = random_field(rng), b = random_field(rng), c = random_field(rng);
    REQUIRE(same_field(commutator(a, b), commutator(b, a).scaled(Poly(Rational(-1)))));
    REQUIRE(same_field(commutator(a + c, b), commutator(a, b) + commutator(c, b)));
    VectorField jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b));
    REQUIRE(jac.is_zero());
  }
}

TEST_CASE("prolongation and residual are linear in the field") {
  std::mt19937_64 rng(5);
  PdeInstance pde(PdeClass::NonlinearGauged, parse("u^2"), 1, parse("t"), parse("t^2+1"));
  for (int i = 0; i < 30; ++i) {
    VectorField a = random_field(rng), b = random_field(rng);
    for (auto [jt, jx] : {std::pair{1, 0}, {0, 1}, {0, 3}, {0, 5}})
      REQUIRE(canonical(prolong_coefficient(a + b, jt, jx) - prolong_coefficient(a, jt, jx) -
                        prolong_coefficient(b, jt, jx))
                  .is_zero());
    REQUIRE(canonical(invariance_residual(a + b, pde) - invariance_residual(a, pde) - invariance_residual(b, pde))
                .is_zero());
  }
}

TEST_CASE("brackets of symmetries are symmetries on every table row") {
  for (int table : {1, 2})
    for (int n : table_cases(table)) {
      ClassificationCase c = lookup_case(table, n);
      PdeInstance pde = c.pde();
      for (std::size_t i = 0; i < c.basis.size(); ++i)
        for (std::size_t j = i + 1; j < c.basis.size(); ++j)
          REQUIRE(is_symmetry(commutator(c.basis[i], c.basis[j]), pde) == Verdict::Yes);
    }
}
