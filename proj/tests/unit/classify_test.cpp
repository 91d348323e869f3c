#include <doctest.h>

#include "helpers.hpp"
#include "symkawa/classify.hpp"

using namespace symkawa;
using test::same;

TEST_CASE("table lookup") {
  CHECK(table_cases(1).size() == 10);
  CHECK(table_cases(2).size() == 5);
  ClassificationCase c6 = lookup_case(1, 6);
  CHECK(same(c6.f, parse("u^n"), c6.assume));
  CHECK(same(c6.beta, parse("lambda*t^rho"), c6.assume));
  CHECK(same(c6.sigma, parse("delta*t^((5*rho+2)/3)"), c6.assume));
  REQUIRE(c6.basis.size() == 2);
  VectorField scaling = VectorField::parse("3*n*t; (rho+1)*n*x; (rho-2)*u", c6.assume);
  CHECK(canonical(c6.basis[1].tau - scaling.tau).is_zero());
  CHECK(canonical(c6.basis[1].xi - scaling.xi).is_zero());
  CHECK(canonical(c6.basis[1].eta - scaling.eta).is_zero());

  ClassificationCase c23 = lookup_case(2, 3);
  CHECK(same(c23.beta, parse("lambda")));
  CHECK(c23.basis.size() == 3);

  CHECK_THROWS_AS(lookup_case(1, 6, {{"n", Expr(1)}}), InputError);
  CHECK_THROWS_AS(lookup_case(1, 6, {{"zeta", Expr(1)}}), InputError);
  CHECK_THROWS_AS(lookup_case(3, 0), InputError);
  CHECK(same(lookup_case(1, 6, {{"rho", Expr(2)}}).sigma, parse("delta*t^4"), c6.assume));
}

TEST_CASE("every table row verifies with symbolic parameters") {
  const int dims1[] = {1, 2, 2, 2, 3, 3, 2, 2, 2, 2};
  const int dims2[] = {2, 3, 3, 3, 3};
  for (int table : {1, 2}) {
    for (const CaseReport& r : verify_table(table)) {
      INFO("table " << table << " case " << r.number);
      CHECK(r.pass);
      for (const FieldCheck& f : r.fields) CHECK(f.verdict == Verdict::Yes);
      CHECK(r.dimension == (table == 1 ? dims1 : dims2)[r.number]);
    }
  }
}

TEST_CASE("structure constants of the arctan row involve nu") {
  CaseReport r = verify_case(lookup_case(2, 4));
  REQUIRE(r.pass);
  bool found = false;
  for (const CommutatorCheck& c : r.commutators)
    for (const Expr& k : c.coefficients)
      if (k.str().find("nu") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("a corrupted basis fails") {
  ClassificationCase c = lookup_case(1, 6);
  c.basis[1] = VectorField::parse("3*n*t; (rho+1)*n*x; (rho-3)*u", c.assume);
  CaseReport r = verify_case(c);
  CHECK_FALSE(r.pass);
  CHECK(r.fields[1].verdict == Verdict::No);
  CHECK_FALSE(r.fields[1].residual.is_zero());
}

TEST_CASE("span utilities") {
  std::vector<VectorField> basis = {VectorField::parse("0;1;0"), VectorField::parse("0;t;1")};
  CHECK(span_rank(basis) == 2);
  auto c = express_in_span(basis, VectorField::parse("0; 2+3*t; 3"));
  REQUIRE(c);
  CHECK(same(to_expr((*c)[0]), 2));
  CHECK(same(to_expr((*c)[1]), 3));
  CHECK_FALSE(express_in_span(basis, VectorField::parse("1;0;0")));
}

TEST_CASE("kernel examples") {
  PdeInstance p8(PdeClass::NonlinearGauged, parse("u^2+u^3"), 1, parse("t^2+1"), parse("t^3+t+1"));
  CHECK(is_symmetry(VectorField::parse("0;1;0"), p8) == Verdict::Yes);
  CHECK(is_symmetry(VectorField::parse("1;0;0"), p8) == Verdict::No);
  PdeInstance p10(PdeClass::LinearGauged, Expr::u(), 1, parse("t^2+2"), parse("t^5+1"));
  CHECK(is_symmetry(VectorField::parse("0;t;1"), p10) == Verdict::Yes);
  CHECK(is_symmetry(VectorField::parse("1;0;0"), p10) == Verdict::No);
  CHECK(certainly_off_table(p8));
  CHECK_FALSE(certainly_off_table(lookup_case(1, 1, {{"lambda", Expr(1)}, {"delta", Expr(1)}}).pde()));
}

TEST_CASE("random kernel checks") {
  for (PdeClass c : {PdeClass::Full, PdeClass::NonlinearGauged, PdeClass::LinearGauged}) {
    KernelReport r = verify_kernel(c, 6, 4);
    CHECK(r.ok);
    CHECK(r.samples.size() == 6);
  }
  CHECK_THROWS_AS(verify_kernel(PdeClass::LinearB, 2), InputError);
}
