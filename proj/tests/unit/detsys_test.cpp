#include <doctest.h>

#include "helpers.hpp"
#include "symkawa/detsys.hpp"

using namespace symkawa;

TEST_CASE("determining system splits the residual completely") {
  PdeInstance pde = PdeInstance::symbolic(PdeClass::NonlinearGauged);
  DeterminingSystem sys = derive_determining(pde);
  CHECK(sys.provenance == "symmetry");
  Poly sum;
  std::set<std::string> keys;
  for (const DetEquation& e : sys.equations) {
    CHECK(keys.insert(e.key).second);
    CHECK_FALSE(contains_kernel_kind(e.lhs, KernelKind::Jet));
  }
  for (auto& [m, c] : split_by_jets(sys.residual)) sum = sum + jet_monomial_poly(m) * c;
  CHECK(canonical(sum - sys.residual).is_zero());
}

TEST_CASE("check_satisfies examples") {
  Assumptions a = Assumptions::parse({"u>0", "n!=0"});
  PdeInstance c7(PdeClass::NonlinearGauged, parse("u^n"), 1, parse("lambda*exp(t)"), parse("delta*exp(5*t/3)"), 0, a);
  DeterminingSystem sys = derive_determining(c7);
  CHECK(check_satisfies(sys, VectorField::parse("3*n; n*x; u", a), a) == Verdict::Yes);
  CHECK(check_satisfies(sys, VectorField::parse("1; 0; 0", a), a) == Verdict::No);
  CHECK(check_satisfies(sys, VectorField::parse("0; 0; 0"), a) == Verdict::Yes);
}

TEST_CASE("ansatz reduction matches the reference equations") {
  AnsatzReport r = verify_ansatz_reduction(PdeClass::NonlinearGauged);
  CHECK(r.ok);
  CHECK(r.missing.empty());
  CHECK(r.refined);
  CHECK(r.first_group_vanishes);
  CHECK(r.reduced_matches);
  CHECK(verify_ansatz_reduction(PdeClass::LinearGauged).ok);
  AnsatzReport bad = verify_ansatz_reduction(PdeClass::NonlinearGauged, true);
  CHECK_FALSE(bad.ok);
}

TEST_CASE("determining system agrees with the direct test") {
  std::mt19937_64 rng(11);
  const char* fs[] = {"u^2", "u^3+u", "exp(u)"};
  const char* bs[] = {"1", "t", "t^2+1"};
  const char* fields[] = {"0;1;0", "1;0;0", "t;x;0", "0;t;1", "3*t;x;-2*u", "0;0;u"};
  for (int i = 0; i < 20; ++i) {
    PdeInstance pde(PdeClass::NonlinearGauged, parse(fs[rng() % 3]), 1, parse(bs[rng() % 3]), parse(bs[rng() % 3]));
    DeterminingSystem sys = derive_determining(pde);
    VectorField vf = VectorField::parse(fields[rng() % 6]);
    REQUIRE(check_satisfies(sys, vf) == is_symmetry(vf, pde));
  }
}
