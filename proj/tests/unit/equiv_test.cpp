#include <doctest.h>

#include "helpers.hpp"
#include "symkawa/equiv.hpp"

using namespace symkawa;
using test::same;

namespace {

Expr E(const Poly& p) { return to_expr(p); }

GroupElement element(EquivGroup g, std::map<std::string, Rational> params) {
  GroupElement e;
  e.group = g;
  e.params = std::move(params);
  e.validate();
  return e;
}

bool contains_equation(const DeterminingSystem& sys, const std::string& text) {
  Poly ref = canonical(to_poly(parse(text)));
  for (const DetEquation& e : sys.equations) {
    if (canonical(e.lhs - ref).is_zero() || canonical(e.lhs + ref).is_zero()) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("point transformations of instances") {
  PdeInstance full = PdeInstance::symbolic(PdeClass::Full);
  TransformResult id = apply_point_transformation(PointTransformation::identity(), full);
  REQUIRE(id.image);
  CHECK(same(id.image->beta(), full.beta()));
  CHECK(same(id.image->sigma(), full.sigma()));

  PdeInstance kaw(PdeClass::Full, parse("1 + a0*u"), 1, parse("b0"), parse("s0"));
  auto shift = PointTransformation::from_exprs(Expr::t(), 1, -Expr::t(), 1, 0);
  TransformResult r = apply_point_transformation(shift, kaw);
  CHECK(same(E(r.G), parse("a0*u")));
  CHECK(same(E(r.B), parse("b0")));

  auto dilate = PointTransformation::from_exprs(Expr::t(), 2, 0, 1, 0);
  TransformResult d = apply_point_transformation(dilate, full);
  CHECK(same(E(d.B), parse("8*beta(t)")));
  CHECK(same(E(d.S), parse("32*sigma(t)")));
  CHECK(same(E(d.G), parse("2*alpha(t)*f(u)")));

  auto broken = PointTransformation::from_exprs(Expr::t(), 1, 0, Expr::x(), 0);
  CHECK_THROWS_AS(apply_point_transformation(broken, PdeInstance(PdeClass::Full, parse("u^2"), 1, 1, 1)),
                  FormBroken);
}

TEST_CASE("closed-form group images") {
  PdeInstance full = PdeInstance::symbolic(PdeClass::Full);
  ElementImage img = equiv_group_image(element(EquivGroup::Full, {{"d1", 2}, {"d0", 3}}), full);
  CHECK(same(E(img.B), parse("8*beta(t)")));
  CHECK(same(E(img.S), parse("32*sigma(t)")));
  CHECK(same(E(img.alpha_pull), parse("2/3*alpha(t)")));

  PdeInstance lin = PdeInstance::symbolic(PdeClass::LinearGauged);
  GroupElement g5 = element(EquivGroup::LinearGauged, {{"d1", 1}, {"d2", 1}, {"d3", 0}, {"d4", 1}, {"e2", 1}});
  PointTransformation tr = induced(g5, lin);
  CHECK(same(E(tr.T), parse("t/(t+1)")));
  CHECK(same(E(canonical(tr.X1 * Poly(var_poly(VarId::X)) + tr.X0)), parse("x/(t+1)")));
  CHECK(same(E(equiv_group_image(g5, lin).S), parse("sigma(t)/(t+1)^3")));

  GroupElement g2 = element(EquivGroup::FullExtended, {{"d2", 2}});
  ElementImage i2 = equiv_group_image(g2, full);
  CHECK(same(E(i2.f_new), parse("f(u) + 2")));
  CHECK(E(induced(g2, full).X0).str().find("A(t)") != std::string::npos);
}

TEST_CASE("closed forms agree with the direct method on random elements") {
  std::mt19937_64 rng(1);
  for (EquivGroup g : {EquivGroup::Full, EquivGroup::FullExtended, EquivGroup::LinearB, EquivGroup::NonlinearGauged, EquivGroup::LinearGauged}) {
    PdeInstance pde = PdeInstance::symbolic(group_class(g));
    for (int i = 0; i < 5; ++i) {
      GroupElement e = random_group_element(g, rng);
      Agreement a = compare_with_direct(equiv_group_image(e, pde),
                                        apply_point_transformation(induced(e, pde), pde), pde.assumptions());
      REQUIRE_MESSAGE(a.ok, e.str());
    }
  }
}

TEST_CASE("degenerate group elements are rejected") {
  CHECK_THROWS_AS(element(EquivGroup::Full, {{"d1", 0}}), InputError);
  CHECK_THROWS_AS(element(EquivGroup::NonlinearGauged, {{"d9", 1}}), InputError);
  CHECK_THROWS_AS(element(EquivGroup::LinearGauged, {{"d1", 1}, {"d2", 1}, {"d3", 1}, {"d4", 1}}), InputError);
}

TEST_CASE("admissible systems") {
  DeterminingSystem full = derive_admissible_system(AdmissibleBranch::Full);
  CHECK(contains_equation(full, "diff(U1(t,x),x,1)"));
  CHECK(contains_equation(full, "sigma_n(t)*diff(T(t),t,1) - sigma(t)*X1(t)^5"));
  CHECK(contains_equation(full, "beta_n(t)*diff(T(t),t,1) - beta(t)*X1(t)^3"));
  DeterminingSystem nl = derive_admissible_system(AdmissibleBranch::Nonlinear);
  CHECK(contains_equation(nl, "diff(X1(t),t,1)"));
  CHECK(contains_equation(nl, "diff(U1(t),t,1)"));
  DeterminingSystem lin = derive_admissible_system(AdmissibleBranch::Linear);
  CHECK(contains_equation(lin, "alpha_n(t)*U1(t)*diff(T(t),t,1) - alpha(t)*X1(t)"));
  std::mt19937_64 rng(2);
  for (EquivGroup g : {EquivGroup::Full, EquivGroup::FullExtended, EquivGroup::LinearB, EquivGroup::NonlinearGauged, EquivGroup::LinearGauged}) {
    DeterminingSystem sys = derive_admissible_system(admissible_branch(g));
    for (int i = 0; i < 5; ++i) REQUIRE(check_admissible(sys, random_group_element(g, rng)).ok);
  }
}

TEST_CASE("gauging alpha") {
  PdeInstance unit(PdeClass::Full, parse("u^2"), 1, parse("t"), 1);
  GaugeResult g0 = gauge_alpha(unit);
  CHECK(same(E(g0.tr.T), Expr::t()));

  Assumptions pos = Assumptions::parse({"t>0"});
  PdeInstance cube(PdeClass::Full, parse("u^2"), parse("3*t^2"), parse("3*t^2"), parse("3*t^2"), 0, pos);
  GaugeResult g1 = gauge_alpha(cube);
  CHECK(same(E(g1.tr.T), parse("t^3")));
  REQUIRE(g1.pde);
  CHECK(same(g1.pde->beta(), 1));
  CHECK(same(g1.pde->sigma(), 1));

  PdeInstance ex(PdeClass::Full, parse("u^2"), parse("exp(t)"), parse("t*exp(t)"), 1, 0, pos);
  GaugeResult g2 = gauge_alpha(ex);
  REQUIRE(g2.pde);
  CHECK(same(E(g2.beta_pull), Expr::t()));
  CHECK(same(E(g2.tr.T), parse("exp(t)")));
  CHECK(same(g2.pde->beta(), parse("ln(t)"), pos));

  PdeInstance opaque(PdeClass::Full, parse("u^2"), parse("exp(t^2)"), 1, 1, 0, pos);
  CHECK(gauge_alpha(opaque).nonclosed);

  PdeInstance lb(PdeClass::LinearB, Expr::u(), parse("2*t"), parse("t"), parse("t"), parse("b"), pos);
  GaugeResult g3 = gauge_alpha_and_b(lb);
  REQUIRE(g3.pde);
  CHECK(g3.pde->cls() == PdeClass::LinearGauged);
}

TEST_CASE("reducibility") {
  Assumptions pos = Assumptions::parse({"t>0"});
  ReducibilityVerdict r1 = check_reducibility(PdeInstance(PdeClass::Full, parse("u^2"), parse("t"), parse("t"), parse("t"), 0, pos));
  CHECK(r1.reducible);
  REQUIRE(r1.witness);
  CHECK(witness_constant(*r1.witness, PdeInstance(PdeClass::Full, parse("u^2"), parse("t"), parse("t"), parse("t"), 0, pos)));

  ReducibilityVerdict r2 = check_reducibility(PdeInstance(PdeClass::Full, parse("u^2"), 1, 1, parse("t")));
  CHECK_FALSE(r2.reducible);
  bool named = false;
  for (const ReducibilityCondition& c : r2.conditions)
    if (c.verdict == ZeroVerdict::Nonzero && c.name == "(σ/α)_t" && same(c.value, 1)) named = true;
  CHECK(named);

  PdeInstance lin(PdeClass::Full, Expr::u(), 1, parse("t"), parse("t^3"), 0, pos);
  ReducibilityVerdict r3 = check_reducibility(lin);
  CHECK(r3.reducible);
  REQUIRE(r3.witness);
  CHECK(witness_constant(*r3.witness, lin));

  CHECK_THROWS(check_reducibility(PdeInstance::symbolic(PdeClass::Full)));
}

TEST_CASE("pushforward of generators") {
  VectorField dt = VectorField::parse("1; 0; 0");
  VectorField same_dt = pushforward(PointTransformation::identity(), dt);
  CHECK(canonical(same_dt.tau - dt.tau).is_zero());
  VectorField g = pushforward(PointTransformation::from_exprs(Expr::t(), 1, -Expr::t(), 1, 0), dt);
  CHECK(same(g.tau_expr(), 1));
  CHECK(same(g.xi_expr(), -1));
  Assumptions pos = Assumptions::parse({"t>0"});
  VectorField c = pushforward(PointTransformation::from_exprs(parse("t^3"), 1, 0, 1, 0, pos), dt);
  CHECK(same(c.tau_expr(), parse("3*t^(2/3)"), pos));
}

TEST_CASE("composition and inversion") {
  Assumptions pos = Assumptions::parse({"t>0"});
  auto a = PointTransformation::from_exprs(parse("2*t+1"), 3, parse("t"), 2, parse("x"), pos);
  auto inv = inverse(a);
  REQUIRE(inv);
  PointTransformation id = compose(*inv, a);
  CHECK(same(E(id.T), Expr::t()));
  CHECK(same(E(id.X1), 1));
  CHECK(same(E(id.X0), 0));
  CHECK(same(E(id.U1), 1));
  CHECK(same(E(id.U0), 0));
}
