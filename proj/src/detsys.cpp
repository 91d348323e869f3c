#include "symkawa/detsys.hpp"

namespace symkawa {

namespace {

Poly fn(const std::string& name, std::vector<Poly> args, std::vector<int> orders = {}) {
  return make_func(name, std::move(args), std::move(orders));
}

Poly T() { return var_poly(VarId::T); }
Poly X() { return var_poly(VarId::X); }
Poly U() { return var_poly(VarId::U); }

// Nonzero rational c with a = c * b.
bool proportional(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return false;
  auto c = canonical(divide(a, b)).as_constant();
  return c && sgn(*c) != 0;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::No || b == Verdict::No) return Verdict::No;
  if (a == Verdict::Probably || b == Verdict::Probably) return Verdict::Probably;
  return Verdict::Yes;
}

}  // namespace

DeterminingSystem derive_determining(const PdeInstance& pde) {
  DeterminingSystem sys;
  sys.provenance = "symmetry";
  sys.unknowns = {"tau", "xi", "eta"};
  sys.residual = invariance_residual(VectorField::generic(), pde);
  for (auto& [k, c] : split_by_jets(sys.residual)) sys.equations.push_back({jet_monomial_name(k), c});
  return sys;
}

SubstitutionMap field_substitution(const VectorField& vf) {
  std::vector<Kernel> formals{var_kernel(VarId::T), var_kernel(VarId::X), var_kernel(VarId::U)};
  SubstitutionMap m;
  m.functions["tau"] = {formals, vf.tau};
  m.functions["xi"] = {formals, vf.xi};
  m.functions["eta"] = {formals, vf.eta};
  return m;
}

Verdict check_satisfies(const DeterminingSystem& sys, const VectorField& vf, const Assumptions& a,
                        std::uint64_t seed) {
  SubstitutionMap m = field_substitution(vf);
  Verdict v = Verdict::Yes;
  for (const DetEquation& e : sys.equations) {
    v = combine(v, verdict_of(canonical(substitute(e.lhs, m, a)), a, seed));
    if (v == Verdict::No) break;
  }
  return v;
}

AnsatzReport verify_ansatz_reduction(PdeClass cls, bool corrupt) {
  if (cls != PdeClass::NonlinearGauged && cls != PdeClass::LinearGauged)
    throw InputError("ansatz reduction is available for the nonlinear-gauged and linear-gauged classes");
  PdeInstance pde = PdeInstance::symbolic(cls);
  DeterminingSystem sys = derive_determining(pde);

  Poly tau = fn("tau", {T()}), xi1 = fn("xi1", {T()}), xi0 = fn("xi0", {T()}), mu = fn("mu", {T()});
  Poly eta0 = fn("eta0", {T(), X()});
  auto d = [](const Poly& p, VarId v, int k = 1) {
    Poly r = p;
    for (int i = 0; i < k; ++i) r = partial(r, var_kernel(v));
    return canonical(r);
  };
  Poly lin = Poly(corrupt ? 3 : 2) * xi1 + mu;
  VectorField ansatz{tau, canonical(xi1 * X() + xi0), canonical(lin * U() + eta0)};
  SubstitutionMap m = field_substitution(ansatz);

  const Poly& f = pde.F();
  Poly fu = d(f, VarId::U);
  Poly beta = pde.beta_poly(), sigma = pde.sigma_poly();
  Poly two = Poly(2) * xi1 + mu;
  std::vector<std::pair<std::string, Poly>> refs = {
      {"eta0-equation", canonical(d(eta0, VarId::X) * f + d(two, VarId::T) * U() + d(eta0, VarId::T) +
                                  d(eta0, VarId::X, 3) * beta + d(eta0, VarId::X, 5) * sigma)},
      {"f-equation", canonical((two * U() + eta0) * fu - (xi1 - d(tau, VarId::T)) * f - d(xi1, VarId::T) * X() -
                               d(xi0, VarId::T))},
      {"sigma-equation", canonical(tau * d(sigma, VarId::T) - (Poly(5) * xi1 - d(tau, VarId::T)) * sigma)},
      {"beta-equation", canonical(tau * d(beta, VarId::T) - (Poly(3) * xi1 - d(tau, VarId::T)) * beta)},
  };

  AnsatzReport rep;
  rep.cls = cls;
  std::vector<bool> hit(refs.size(), false);
  std::vector<Poly> f_groups;
  bool all_matched = true;
  for (const DetEquation& e : sys.equations) {
    Poly r = canonical(substitute(e.lhs, m, {}));
    if (r.is_zero()) continue;
    AnsatzMatch am{e.key, "", to_expr(r)};
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (proportional(r, refs[i].second)) {
        am.matched = refs[i].first;
        hit[i] = true;
        if (i == 1) f_groups.push_back(r);
        break;
      }
    }
    if (am.matched.empty()) all_matched = false;
    rep.groups.push_back(std::move(am));
  }
  for (std::size_t i = 0; i < refs.size(); ++i)
    if (!hit[i]) rep.missing.push_back(refs[i].first);
  rep.ok = all_matched && rep.missing.empty();

  if (cls == PdeClass::NonlinearGauged && rep.ok) {
    rep.refined = true;
    SubstitutionMap refine;
    std::vector<Kernel> tx{var_kernel(VarId::T), var_kernel(VarId::X)};
    refine.functions["eta0"] = {tx, param_poly("c0")};
    refine.functions["mu"] = {{var_kernel(VarId::T)}, canonical(Poly(-2) * fn("xi1", {T()}) + param_poly("c1"))};
    rep.first_group_vanishes = canonical(substitute(refs[0].second, refine, {})).is_zero();
    Poly g = canonical(substitute(f_groups.front(), refine, {}));
    Poly xc = d(g, VarId::X);
    rep.x_coefficient = to_expr(xc);
    rep.reduced = to_expr(canonical(g - xc * X()));
    Poly expected = canonical((param_poly("c1") * U() + param_poly("c0")) * fu -
                              (xi1 - d(tau, VarId::T)) * f - d(xi0, VarId::T));
    bool linear_in_x = d(xc, VarId::X).is_zero();
    rep.reduced_matches = linear_in_x && proportional(to_poly(rep.reduced), expected) &&
                          proportional(xc, d(xi1, VarId::T));
    rep.ok = rep.first_group_vanishes && rep.reduced_matches;
  }
  return rep;
}

}  // namespace symkawa
