#include "symkawa/equiv.hpp"

#include <algorithm>
#include <set>

namespace symkawa {

namespace {

Poly T() { return var_poly(VarId::T); }
Poly X() { return var_poly(VarId::X); }
Poly U() { return var_poly(VarId::U); }

Poly d(const Poly& p, VarId v) { return canonical(partial(p, var_kernel(v))); }
Poly fn(const std::string& name, std::vector<Poly> args, std::vector<int> orders = {}) {
  return make_func(name, std::move(args), std::move(orders));
}
Poly div(const Poly& a, const Poly& b) { return canonical(divide(a, b)); }

Poly sub_var(const Poly& p, VarId v, const Poly& value, const Assumptions& a) {
  SubstitutionMap m;
  m.bind(var_kernel(v), value);
  return canonical(substitute(p, m, a));
}

bool exactly_zero(const Poly& p) { return canonical(p).is_zero(); }

struct GroupSpec {
  EquivGroup group;
  const char* name;
  PdeClass cls;
  std::vector<std::pair<std::string, Rational>> identity;
};

const std::vector<GroupSpec>& specs() {
  static const std::vector<GroupSpec> s = {
      {EquivGroup::Full, "full", PdeClass::Full, {{"d0", 1}, {"d1", 1}, {"d2", 0}, {"d3", 1}, {"d4", 0}}},
      {EquivGroup::FullExtended, "full-extended", PdeClass::Full,
       {{"d0", 1}, {"d1", 1}, {"d2", 0}, {"d3", 0}, {"d4", 1}, {"d5", 0}, {"e0", 0}}},
      {EquivGroup::LinearB, "linear-b", PdeClass::LinearB,
       {{"d1", 1}, {"d2", 0}, {"dp1", 0}, {"dp2", 1}, {"e0", 0}, {"e1", 0}, {"e2", 1}, {"e3", 0}}},
      {EquivGroup::NonlinearGauged, "nonlinear-gauged", PdeClass::NonlinearGauged,
       {{"d1", 1}, {"d2", 0}, {"d3", 1}, {"d4", 0}, {"d5", 0}, {"d6", 1}, {"d7", 0}}},
      {EquivGroup::LinearGauged, "linear-gauged", PdeClass::LinearGauged,
       {{"d1", 1}, {"d2", 0}, {"d3", 0}, {"d4", 1}, {"e0", 0}, {"e1", 0}, {"e2", 1}}},
  };
  return s;
}

const GroupSpec& spec(EquivGroup g) {
  for (const GroupSpec& s : specs())
    if (s.group == g) return s;
  throw Error("unknown group");
}

bool has_free_T(EquivGroup g) { return g == EquivGroup::Full || g == EquivGroup::FullExtended || g == EquivGroup::LinearB; }

// Sign-definite up to isolated zeros: every term is a positive multiple of
// positive kernels or even powers.
bool nonnegative(const Poly& p, const Assumptions& a) {
  if (p.is_zero()) return false;
  for (const Term& t : p.terms()) {
    if (sgn(t.coeff) <= 0) return false;
    for (const Factor& f : t.mono.factors()) {
      if (is_positive(f.kernel, a)) continue;
      auto k = f.exponent.to_int();
      if (f.kernel->kind != KernelKind::OpaquePow && k && *k % 2 == 0) continue;
      return false;
    }
  }
  return true;
}

// Nonzero kernels whose common powers may be cancelled from an equation.
bool strippable(const Kernel& k) {
  switch (k->kind) {
    case KernelKind::Number:
    case KernelKind::Var:
    case KernelKind::SumBase: return true;
    case KernelKind::Elem: return k->fn == ElemFn::Exp;
    case KernelKind::Func: {
      static const std::set<std::string> names = {"X1",    "U1",     "alpha",  "beta",
                                                  "sigma", "alpha_n", "beta_n", "sigma_n"};
      bool plain = std::all_of(k->orders.begin(), k->orders.end(), [](int o) { return o == 0; });
      if (k->name == "T") return k->orders.size() == 1 && k->orders[0] == 1;
      return plain && names.count(k->name) != 0;
    }
    default: return false;
  }
}

// Clears denominators, cancels common nonzero factors and the rational content.
Poly strip(const Poly& p0) {
  Poly p = canonical(p0);
  if (p.is_zero()) return p;
  Poly n = as_fraction(p).numerator;
  std::vector<Kernel> ks;
  for (const Term& t : n.terms())
    for (const Factor& f : t.mono.factors()) ks.push_back(f.kernel);
  std::sort(ks.begin(), ks.end(), KernelLess());
  ks.erase(std::unique(ks.begin(), ks.end(), [](const Kernel& a, const Kernel& b) { return compare_kernels(a, b) == 0; }),
           ks.end());
  std::vector<Factor> scale;
  for (const Kernel& k : ks) {
    long lo = 0;
    bool integral = true, first = true;
    for (const Term& t : n.terms()) {
      const LinExp* e = t.mono.exponent_of(k);
      long v = 0;
      if (e) {
        auto iv = e->to_int();
        if (!iv) {
          integral = false;
          break;
        }
        v = *iv;
      }
      lo = first ? v : std::min(lo, v);
      first = false;
    }
    if (!integral || lo == 0) continue;
    if (lo < 0 || strippable(k)) scale.push_back({k, LinExp(-lo)});
  }
  if (!scale.empty()) {
    std::sort(scale.begin(), scale.end(), [](const Factor& a, const Factor& b) { return compare_kernels(a.kernel, b.kernel) < 0; });
    n = canonical(n * Poly::from_monomial(Monomial(scale)));
  }
  mpz_class g = 0, l = 1;
  for (const Term& t : n.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  }
  Rational c(l, g == 0 ? mpz_class(1) : g);
  c.canonicalize();
  if (!n.is_zero() && sgn(n.terms()[0].coeff) < 0) c = -c;
  return n.scaled(c);
}

// Groups terms by their exponents of the given kernels; the remaining factors
// must not involve those kernels.
std::vector<std::pair<std::string, Poly>> split_by(const Poly& p, const std::vector<Kernel>& keys) {
  std::vector<std::pair<std::vector<long>, std::vector<Term>>> groups;
  const Poly c = canonical(p);
  for (const Term& t : c.terms()) {
    std::vector<long> key(keys.size(), 0);
    std::vector<Factor> rest;
    for (const Factor& f : t.mono.factors()) {
      bool matched = false;
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (compare_kernels(f.kernel, keys[i]) == 0) {
          auto k = f.exponent.to_int();
          if (!k) throw Error("cannot split: non-integer power");
          key[i] = *k;
          matched = true;
        }
      if (!matched) {
        for (const Kernel& k : keys)
          if (kernel_depends_on(f.kernel, k->kind == KernelKind::Func ? var_kernel(VarId::U) : k))
            throw Error("cannot split: splitting variable inside another factor");
        rest.push_back(f);
      }
    }
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = groups.end() - 1;
    }
    it->second.push_back({Monomial(std::move(rest)), t.coeff});
  }
  std::vector<std::pair<std::string, Poly>> out;
  for (auto& [key, ts] : groups) {
    std::string name;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (key[i] == 0) continue;
      if (!name.empty()) name += "*";
      name += to_expr(Poly::from_kernel(keys[i])).str();
      if (key[i] != 1) name += "^" + std::to_string(key[i]);
    }
    Poly q = canonical(Poly::from_terms(std::move(ts)));
    if (!q.is_zero()) out.emplace_back(name.empty() ? "1" : name, std::move(q));
  }
  return out;
}

Kernel single_kernel(const Poly& p) { return p.terms().at(0).mono.factors().at(0).kernel; }

// Drops every term containing a derivative of U0 of x-order two or more.
Poly drop_high_U0(const Poly& p) {
  std::vector<Term> keep;
  for (const Term& t : p.terms()) {
    bool high = false;
    for (const Factor& f : t.mono.factors())
      if (f.kernel->kind == KernelKind::Func && f.kernel->name == "U0" && f.kernel->orders.size() == 2 &&
          f.kernel->orders[1] >= 2)
        high = true;
    if (!high) keep.push_back(t);
  }
  return canonical(Poly::from_terms(std::move(keep)));
}

}  // namespace

const char* group_name(EquivGroup g) { return spec(g).name; }

EquivGroup parse_group(const std::string& name) {
  for (const GroupSpec& s : specs())
    if (name == s.name) return s.group;
  throw InputError("unknown group '" + name + "' (expected full, full-extended, linear-b, nonlinear-gauged or linear-gauged)");
}

PdeClass group_class(EquivGroup g) { return spec(g).cls; }

const std::vector<std::string>& group_parameters(EquivGroup g) {
  static const std::map<EquivGroup, std::vector<std::string>> names = [] {
    std::map<EquivGroup, std::vector<std::string>> m;
    for (const GroupSpec& s : specs())
      for (const auto& [k, val] : s.identity) m[s.group].push_back(k);
    return m;
  }();
  return names.at(g);
}

Rational GroupElement::param(const std::string& name) const {
  if (auto it = params.find(name); it != params.end()) return it->second;
  for (const auto& [k, v] : spec(group).identity)
    if (k == name) return v;
  throw InputError("group " + std::string(group_name(group)) + " has no parameter '" + name + "'");
}

void GroupElement::validate() const {
  const GroupSpec& s = spec(group);
  for (const auto& [k, v] : params)
    if (std::none_of(s.identity.begin(), s.identity.end(), [&](const auto& e) { return e.first == k; }))
      throw InputError("group " + std::string(s.name) + " has no parameter '" + k + "'");
  auto nz = [&](const Rational& v, const char* what) {
    if (sgn(v) == 0) throw InputError(std::string("degenerate group element: ") + what + " = 0");
  };
  auto p = [&](const char* n) { return param(n); };
  switch (group) {
    case EquivGroup::Full: nz(p("d0") * p("d1") * p("d3"), "d0 d1 d3"); break;
    case EquivGroup::FullExtended: nz(p("d0") * p("d1") * p("d4"), "d0 d1 d4"); break;
    case EquivGroup::LinearB:
      nz(p("dp2") * p("d1") - p("dp1") * p("d2"), "dp2 d1 - dp1 d2");
      nz(p("e2"), "e2");
      break;
    case EquivGroup::NonlinearGauged: nz(p("d1") * p("d3") * p("d6"), "d1 d3 d6"); break;
    case EquivGroup::LinearGauged:
      nz(p("e2"), "e2");
      nz(p("d1") * p("d4") - p("d2") * p("d3"), "d1 d4 - d2 d3");
      break;
  }
  Poly Tc = canonical(T);
  if (!has_free_T(group) && !Tc.identical(var_poly(VarId::T)))
    throw InputError("group " + std::string(s.name) + " has no free function T");
  if (!is_function_of(Tc, kDepT)) throw InputError("T must depend on t only");
  if (is_zero(d(Tc, VarId::T), assume) == ZeroVerdict::Zero) throw InputError("degenerate group element: T_t = 0");
}

std::string GroupElement::str() const {
  std::string s = std::string(group_name(group)) + " {";
  bool first = true;
  for (const auto& [k, v] : spec(group).identity) {
    s += (first ? "" : ", ") + k + "=" + param(k).get_str();
    first = false;
  }
  if (has_free_T(group)) s += ", T=" + to_expr(T).str();
  return s + "}";
}

std::optional<Poly> antiderivative(const Poly& alpha) {
  Poly a = canonical(alpha);
  if (!is_function_of(a, kDepT) || contains_kernel_kind(a, KernelKind::Func) ||
      contains_kernel_kind(a, KernelKind::OpaquePow))
    return std::nullopt;
  Poly r;
  for (const Term& term : a.terms()) {
    std::vector<Factor> cf, tf;
    for (const Factor& f : term.mono.factors()) ((f.kernel->deps & kDepT) ? tf : cf).push_back(f);
    Poly c = Poly::from_monomial(Monomial(cf), term.coeff);
    if (tf.empty()) {
      r += c * T();
      continue;
    }
    if (tf.size() != 1 || !tf[0].exponent.is_constant()) return std::nullopt;
    const Kernel& K = tf[0].kernel;
    const Rational e = tf[0].exponent.constant();
    if (K->kind == KernelKind::Var) {
      if (e == -1) r += c * make_elem(ElemFn::Ln, T());
      else r += c * Poly::from_kernel(K, LinExp(e + 1)).scaled(1 / (e + 1));
    } else if (K->kind == KernelKind::Elem && K->fn == ElemFn::Exp) {
      Poly slope = d(K->args[0], VarId::T);
      if (depends_on(slope, kDepT)) return std::nullopt;
      r += div(c * Poly::from_kernel(K, LinExp(e)), slope.scaled(e));
    } else {
      return std::nullopt;
    }
  }
  return canonical(r);
}

Poly nonlocal_A(const PdeInstance& pde) {
  const Poly& a = pde.alpha_poly();
  if (a.identical(fn("alpha", {T()}))) return fn("A", {T()});
  if (auto r = antiderivative(a)) return *r;
  throw DomainError("alpha has no tabulated antiderivative; use the symbolic alpha(t)");
}

PointTransformation induced(const GroupElement& g, const PdeInstance& pde) {
  g.validate();
  Assumptions as = pde.assumptions();
  as.merge(g.assume);
  auto p = [&](const char* n) { return Poly(g.param(n)); };
  switch (g.group) {
    case EquivGroup::Full: return PointTransformation::make(g.T, p("d1"), p("d2"), p("d3"), p("d4"), as);
    case EquivGroup::FullExtended: {
      Poly A = nonlocal_A(pde);
      return PointTransformation::make(g.T, p("d1"), p("d1") * p("d2") * A + p("d3"), p("d4"), p("d5"), as);
    }
    case EquivGroup::LinearB: {
      Poly A = nonlocal_A(pde), b = canonical(to_poly(pde.b(), as));
      Poly Q = canonical(p("d2") * A + p("d1"));
      Poly D = p("dp2") * p("d1") - p("dp1") * p("d2");
      return PointTransformation::make(g.T, div(p("e2"), Q), div(p("e1") * A + p("e0"), Q), div(p("e2") * Q, D),
                                       div(p("e2") * (-p("d2") * X() + p("d2") * b * A + p("e3")), D), as);
    }
    case EquivGroup::NonlinearGauged:
      return PointTransformation::make(p("d1") * T() + p("d2"), p("d3"), p("d4") * T() + p("d5"), p("d6"), p("d7"),
                                       as);
    case EquivGroup::LinearGauged: {
      Poly Q = canonical(p("d2") * T() + p("d1"));
      Poly D = p("d1") * p("d4") - p("d2") * p("d3");
      return PointTransformation::make(div(p("d4") * T() + p("d3"), Q), div(p("e2"), Q), div(p("e1") * T() + p("e0"), Q),
                                       div(p("e2") * Q, D),
                                       div(-p("e2") * p("d2") * X() + p("e1") * p("d1") - p("e0") * p("d2"), D), as);
    }
  }
  throw Error("unknown group");
}

ElementImage equiv_group_image(const GroupElement& g, const PdeInstance& pde) {
  if (pde.cls() != group_class(g.group))
    throw InputError(std::string("group ") + group_name(g.group) + " acts on class " + class_name(group_class(g.group)) +
                     ", not " + class_name(pde.cls()));
  PointTransformation tr = induced(g, pde);
  const Assumptions& as = tr.assume;
  auto p = [&](const char* n) { return Poly(g.param(n)); };
  Poly Tt = d(tr.T, VarId::T);
  const Poly &alpha = pde.alpha_poly(), &beta = pde.beta_poly(), &sigma = pde.sigma_poly(), &F = pde.F();
  auto f_at = [&](const Poly& u_old) { return sub_var(F, VarId::U, u_old, as); };
  ElementImage r;
  switch (g.group) {
    case EquivGroup::Full:
    case EquivGroup::FullExtended: {
      bool second = g.group == EquivGroup::FullExtended;
      Poly s = second ? p("d4") : p("d3"), o = second ? p("d5") : p("d4");
      r.alpha_pull = div(p("d1") * alpha, p("d0") * Tt);
      r.f_new = canonical(p("d0") * (f_at(div(U() - o, s)) + (second ? p("d2") : Poly())));
      r.B = div(power(p("d1"), 3) * beta, Tt);
      r.S = div(power(p("d1"), 5) * sigma, Tt);
      if (second) r.A_new = canonical(div(p("d1") * nonlocal_A(pde), p("d0")) + p("e0"));
      break;
    }
    case EquivGroup::LinearB: {
      Poly A = nonlocal_A(pde), b = canonical(to_poly(pde.b(), as));
      Poly Q = canonical(p("d2") * A + p("d1"));
      Poly D = p("dp2") * p("d1") - p("dp1") * p("d2");
      r.alpha_pull = div(D * alpha, Tt * power(Q, 2));
      r.f_new = U();
      r.b_new = div(b * p("d1") * p("e2") + p("d1") * p("e1") - p("d2") * p("e0") - p("e3") * p("e2"), D);
      r.B = div(power(p("e2"), 3) * beta, Tt * power(Q, 3));
      r.S = div(power(p("e2"), 5) * sigma, Tt * power(Q, 5));
      r.A_new = div(p("dp2") * A + p("dp1"), Q);
      break;
    }
    case EquivGroup::NonlinearGauged:
      r.alpha_pull = Poly(1);
      r.f_new = div(p("d3") * f_at(div(U() - p("d7"), p("d6"))) + p("d4"), p("d1"));
      r.B = div(power(p("d3"), 3) * beta, p("d1"));
      r.S = div(power(p("d3"), 5) * sigma, p("d1"));
      break;
    case EquivGroup::LinearGauged: {
      Poly Q = canonical(p("d2") * T() + p("d1"));
      Poly D = p("d1") * p("d4") - p("d2") * p("d3");
      r.alpha_pull = Poly(1);
      r.f_new = U();
      r.B = div(power(p("e2"), 3) * beta, Q * D);
      r.S = div(power(p("e2"), 5) * sigma, power(Q, 3) * D);
      break;
    }
  }
  if (r.A_new) r.A_consistent = exactly_zero(div(d(*r.A_new, VarId::T), Tt) - r.alpha_pull);
  Poly u_new = canonical(tr.U1 * U() + tr.U0);
  r.G = canonical(r.alpha_pull * (sub_var(r.f_new, VarId::U, u_new, as) + r.b_new));
  if (auto tinv = invert_time(tr.T, as)) {
    auto at = [&](const Poly& q) { return to_expr(sub_var(q, VarId::T, *tinv, as)); };
    try {
      r.image.emplace(pde.cls(), to_expr(r.f_new), at(r.alpha_pull), at(r.B), at(r.S), to_expr(r.b_new), as);
    } catch (const InputError&) {
      r.image.reset();
    }
  }
  return r;
}

Agreement compare_with_direct(const ElementImage& closed, const TransformResult& direct, const Assumptions& a) {
  Agreement ag;
  auto same = [&](const char* what, const Poly& x, const Poly& y) {
    if (is_zero(canonical(x - y), a) != ZeroVerdict::Zero || !exactly_zero(x - y)) ag.mismatches.push_back(what);
  };
  same("alpha f", closed.G, direct.G);
  same("beta", closed.B, direct.B);
  same("sigma", closed.S, direct.S);
  if (direct.linear_form) {
    same("alpha", closed.alpha_pull, direct.alpha_pull);
    same("b", closed.b_new, direct.b_new);
  }
  if (!closed.A_consistent) ag.mismatches.push_back("A_t = alpha");
  ag.ok = ag.mismatches.empty();
  return ag;
}

GroupElement random_group_element(EquivGroup grp, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> half(-6, 6), pos(1, 6), pick(0, 3);
  for (;;) {
    GroupElement g;
    g.group = grp;
    for (const auto& [k, v] : spec(grp).identity) g.params[k] = Rational(half(rng), 2);
    for (auto& [k, v] : g.params) v.canonicalize();
    if (has_free_T(grp)) {
      Rational a(half(rng), 2), c(half(rng), 2);
      a.canonicalize();
      c.canonicalize();
      switch (pick(rng)) {
        case 0: g.T = fn("T", {T()}); break;
        case 1: g.T = canonical(Poly(a) * T() + Poly(c)); break;
        case 2: {
          Rational b(pos(rng), 2);
          b.canonicalize();
          g.T = canonical(power(T(), 3) + Poly(b) * T() + Poly(c));
          break;
        }
        default: g.T = make_elem(ElemFn::Exp, canonical(Poly(a) * T())); break;
      }
    }
    try {
      g.validate();
      return g;
    } catch (const InputError&) {
    }
  }
}

const char* branch_name(AdmissibleBranch b) {
  switch (b) {
    case AdmissibleBranch::Full: return "full";
    case AdmissibleBranch::Nonlinear: return "nonlinear";
    case AdmissibleBranch::Linear: return "linear";
  }
  return "?";
}

AdmissibleBranch parse_branch(const std::string& name) {
  for (AdmissibleBranch b : {AdmissibleBranch::Full, AdmissibleBranch::Nonlinear, AdmissibleBranch::Linear})
    if (name == branch_name(b)) return b;
  throw InputError("unknown branch '" + name + "' (expected full, nonlinear or linear)");
}

AdmissibleBranch admissible_branch(EquivGroup g) {
  switch (g) {
    case EquivGroup::Full: return AdmissibleBranch::Full;
    case EquivGroup::FullExtended:
    case EquivGroup::NonlinearGauged: return AdmissibleBranch::Nonlinear;
    case EquivGroup::LinearB:
    case EquivGroup::LinearGauged: return AdmissibleBranch::Linear;
  }
  return AdmissibleBranch::Full;
}

DeterminingSystem derive_admissible_system(AdmissibleBranch branch) {
  const bool linear = branch == AdmissibleBranch::Linear;
  PdeInstance src = PdeInstance::symbolic(linear ? PdeClass::LinearB : PdeClass::Full);
  Poly t = T(), x = X();
  Poly U0 = fn("U0", {t, x});
  Poly Gp = param_poly("G_n"), Bp = param_poly("B_n"), Sp = param_poly("S_n");
  auto residual = [&](const Poly& U1) {
    PointTransformation tr{fn("T", {t}), fn("X1", {t}), fn("X0", {t}), U1, U0, {}};
    TildeDerivatives td = tilde_derivatives(tr, src);
    return canonical(td.ut + Gp * td.ux + Bp * td.u3x + Sp * td.u5x);
  };
  auto coefficients = [](const Poly& r) {
    std::map<std::string, Poly> m;
    for (auto& [k, c] : split_by_jets(r)) m[jet_monomial_name(k)] = c;
    return m;
  };

  DeterminingSystem sys;
  sys.provenance = "admissible";
  sys.unknowns = {"T", "X1", "X0", "U1", "U0", "alpha_n", "beta_n", "sigma_n"};
  if (linear) sys.unknowns.push_back("b_n");
  else sys.unknowns.push_back("f_n");

  // U1 = U1(t, x): the u_4x coefficient forces U1_x = 0.
  auto c1 = coefficients(residual(fn("U1", {t, x})));
  SubstitutionMap top;
  top.bind(param_kernel("S_n"), fn("sigma_n", {t}));
  sys.equations.push_back({"u_4x", strip(canonical(substitute(c1.at("u_4x"), top, {})))});

  Poly U1 = fn("U1", {t});
  Poly r2 = residual(U1);
  auto c2 = coefficients(r2);
  Poly G_new = linear ? canonical(fn("alpha_n", {t}) * (U1 * U() + U0 + param_poly("b_n")))
                      : canonical(fn("alpha_n", {t}) * fn("f_n", {canonical(U1 * U() + U0)}));
  SubstitutionMap restore;
  restore.bind(param_kernel("G_n"), G_new);
  restore.bind(param_kernel("B_n"), fn("beta_n", {t}));
  restore.bind(param_kernel("S_n"), fn("sigma_n", {t}));
  auto back = [&](const Poly& p) { return canonical(substitute(p, restore, {})); };

  // Eliminate the new elements from the u-free coefficient.
  Poly c0 = c2.count("1") ? c2.at("1") : Poly();
  for (const auto& [name, key] : std::vector<std::pair<const char*, const char*>>{
           {"S_n", "u_5x"}, {"B_n", "u_3x"}, {"G_n", "u_x"}}) {
    const Poly& ck = c2.at(key);
    Poly num = canonical(partial(c0, param_kernel(name)));
    if (num.is_zero()) continue;
    c0 = canonical(c0 - div(num, canonical(partial(ck, param_kernel(name)))) * ck);
  }
  for (const char* key : {"u_5x", "u_3x", "u_x"}) sys.equations.push_back({key, strip(back(c2.at(key)))});
  Poly e6 = strip(c0);
  sys.equations.push_back({"1", e6});
  for (const auto& [key, c] : c2)
    if (key != "1" && key != "u_5x" && key != "u_3x" && key != "u_x") sys.equations.push_back({key, strip(back(c))});
  Poly e7 = sys.equations[3].lhs;

  if (branch == AdmissibleBranch::Nonlinear) {
    Kernel fk = single_kernel(fn("f", {U()})), uk = var_kernel(VarId::U);
    Poly rest;
    for (auto& [k, c] : split_by(e6, {fk, uk})) {
      if (k == "1") rest = c;
      else sys.equations.push_back({"1 | " + k, strip(c)});
    }
    // With U0_x = 0 and U1_t = 0 the remainder gives U0_t.
    SubstitutionMap m;
    m.functions["U0"] = {{var_kernel(VarId::T), var_kernel(VarId::X)}, fn("U0", {t})};
    sys.equations.push_back({"1 | rest", strip(canonical(substitute(rest, m, {})))});
    Poly e7r = canonical(substitute(e7, m, {}));
    for (auto& [k, c] : split_by(e7r, {var_kernel(VarId::X)})) sys.equations.push_back({"u_x | " + k, strip(c)});
  } else if (linear) {
    Kernel uk = var_kernel(VarId::U);
    for (auto& [k, c] : split_by(e6, {uk}))
      sys.equations.push_back({"1 | " + k, strip(k == "1" ? drop_high_U0(c) : c)});
    for (auto& [k, c] : split_by(e7, {uk})) sys.equations.push_back({"u_x | " + k, strip(c)});
  }
  return sys;
}

AdmissibleCheck check_admissible(const DeterminingSystem& sys, const GroupElement& g) {
  PdeClass cls = group_class(g.group);
  PdeInstance src = PdeInstance::symbolic(cls);
  ElementImage el = equiv_group_image(g, src);
  PointTransformation tr = induced(g, src);
  const std::vector<Kernel> t_{var_kernel(VarId::T)}, tx{var_kernel(VarId::T), var_kernel(VarId::X)},
      u_{var_kernel(VarId::U)};
  SubstitutionMap m1;
  m1.functions["T"] = {t_, tr.T};
  m1.functions["X1"] = {t_, tr.X1};
  m1.functions["X0"] = {t_, tr.X0};
  m1.functions["U1"] = {tx, tr.U1};
  m1.functions["U0"] = {tx, tr.U0};
  m1.functions["alpha_n"] = {t_, el.alpha_pull};
  m1.functions["beta_n"] = {t_, el.B};
  m1.functions["sigma_n"] = {t_, el.S};
  m1.functions["f_n"] = {u_, el.f_new};
  m1.bind(param_kernel("b_n"), el.b_new);
  if (cls == PdeClass::NonlinearGauged || cls == PdeClass::LinearGauged) m1.functions["alpha"] = {t_, Poly(1)};
  if (cls == PdeClass::LinearGauged) m1.bind(param_kernel("b"), Poly());
  SubstitutionMap m2;
  m2.functions["U1"] = {t_, tr.U1};
  if (!depends_on(tr.U0, kDepX)) m2.functions["U0"] = {t_, tr.U0};
  AdmissibleCheck c;
  for (const DetEquation& e : sys.equations) {
    Poly r = canonical(substitute(canonical(substitute(e.lhs, m1, tr.assume)), m2, tr.assume));
    if (!r.is_zero()) c.failing.push_back(e.key);
  }
  c.ok = c.failing.empty();
  return c;
}

GaugeResult gauge_alpha(const PdeInstance& pde) {
  const PdeClass cls = pde.cls();
  const Assumptions& as = pde.assumptions();
  const bool linear = is_linear_class(cls);
  GaugeResult g{PointTransformation::identity(), pde, false, pde.beta_poly(), pde.sigma_poly()};
  if (cls == PdeClass::NonlinearGauged || cls == PdeClass::LinearGauged) return g;
  if (cls == PdeClass::Full) {
    Poly fuu = d(d(pde.F(), VarId::U), VarId::U);
    if (is_zero(fuu, as) != ZeroVerdict::Nonzero)
      throw InputError("gauging alpha needs f_uu != 0 in the full class (use the linear-b class for f = u)");
  }
  const Poly& alpha = pde.alpha_poly();
  if (!nonnegative(alpha, as) && !nonnegative(canonical(-alpha), as))
    throw DomainError("alpha must keep one sign for t~ = int alpha dt to be monotone; add an assumption such as t>0");
  g.beta_pull = div(pde.beta_poly(), alpha);
  g.sigma_pull = div(pde.sigma_poly(), alpha);
  Poly U0 = linear ? canonical(to_poly(pde.b(), as)) : Poly();
  g.pde.reset();
  auto A = antiderivative(alpha);
  if (!A) {
    g.tr = PointTransformation{fn("A", {T()}), Poly(1), Poly(), Poly(1), U0, as};
    g.nonclosed = true;
    return g;
  }
  g.tr = PointTransformation::make(*A, Poly(1), Poly(), Poly(1), U0, as);
  TransformResult r = apply_point_transformation(g.tr, pde);
  if (!r.alpha_pull.identical(Poly(1)) || !r.b_new.is_zero()) throw Error("gauging did not normalize alpha");
  if (!r.image) {
    g.nonclosed = true;
    return g;
  }
  g.pde.emplace(linear ? PdeClass::LinearGauged : PdeClass::NonlinearGauged, r.image->f(), Expr(1), r.image->beta(),
                r.image->sigma(), Expr(0), as);
  return g;
}

GaugeResult gauge_alpha_and_b(const PdeInstance& pde) {
  if (!is_linear_class(pde.cls())) throw InputError("gauging alpha and b needs a linear class");
  return gauge_alpha(pde);
}

bool witness_constant(const PointTransformation& tr, const PdeInstance& pde, TransformResult* out) {
  TransformResult r;
  try {
    r = apply_point_transformation(tr, pde);
  } catch (const FormBroken&) {
    return false;
  }
  bool ok = d(r.B, VarId::T).is_zero() && d(r.S, VarId::T).is_zero() && d(r.G_hat, VarId::T).is_zero();
  if (out) *out = std::move(r);
  return ok;
}

ReducibilityVerdict check_reducibility(const PdeInstance& pde_in) {
  const Assumptions& as = pde_in.assumptions();
  const Poly& F = pde_in.F();
  if (contains_kernel_kind(F, KernelKind::Func)) throw InputError("branch undecidable: f is a symbolic function");
  Poly fu = d(F, VarId::U), fuu = d(fu, VarId::U);
  ZeroVerdict bv = is_zero(fuu, as);
  if (bv == ZeroVerdict::ProbablyZero) throw InputError("branch undecidable: f_uu only probably vanishes");
  ReducibilityVerdict v;
  v.nonlinear_branch = bv == ZeroVerdict::Nonzero;
  const Poly &alpha = pde_in.alpha_poly(), &beta = pde_in.beta_poly(), &sigma = pde_in.sigma_poly();
  auto add = [&](const char* name, const Poly& value) {
    Poly c = canonical(value);
    v.conditions.push_back({name, to_expr(c), is_zero(c, as)});
  };
  if (v.nonlinear_branch) {
    add("(β/α)_t", d(div(beta, alpha), VarId::T));
    add("(σ/α)_t", d(div(sigma, alpha), VarId::T));
  } else {
    add("((1/α)(β/α)_t)_t", d(div(d(div(beta, alpha), VarId::T), alpha), VarId::T));
    add("(σα²/β³)_t", d(div(sigma * power(alpha, 2), power(beta, 3)), VarId::T));
  }
  bool any_nonzero = false, any_probable = false;
  for (const auto& c : v.conditions) {
    any_nonzero = any_nonzero || c.verdict == ZeroVerdict::Nonzero;
    any_probable = any_probable || c.verdict == ZeroVerdict::ProbablyZero;
  }
  v.reducible = !any_nonzero && !any_probable;
  v.inconclusive = !any_nonzero && any_probable;
  if (!v.reducible) return v;

  // An equation of the full class with linear f is the linear-b equation
  // with alpha' = f_u alpha and b = f(0) / f_u.
  PdeInstance pde = pde_in;
  if (!v.nonlinear_branch && pde.cls() == PdeClass::Full) {
    Poly b = div(canonical(F - fu * U()), fu);
    pde = PdeInstance(PdeClass::LinearB, Expr::u(), to_expr(canonical(fu * alpha)), pde_in.beta(), pde_in.sigma(),
                      to_expr(b), as);
  }
  GaugeResult g = [&] {
    try {
      return gauge_alpha(pde);
    } catch (const DomainError&) {
      Assumptions half = as;
      half.assume_positive("t");
      pde = PdeInstance(pde.cls(), pde.f(), pde.alpha(), pde.beta(), pde.sigma(), pde.b(), half);
      v.note = "witness valid for t > 0";
      return gauge_alpha(pde);
    }
  }();
  if (g.nonclosed) {
    v.criterion_only = true;
    v.note = "no closed-form time change for the gauge alpha = 1";
    return v;
  }
  PointTransformation w = g.tr;
  if (!v.nonlinear_branch) {
    const Poly& a = pde.alpha_poly();
    Poly p = d(div(pde.beta_poly(), a), VarId::T);
    p = div(p, a);
    if (!p.is_zero()) {
      // beta/alpha = p T + q in the gauged time; a projective change of time
      // t~ = -1/(p t + q) makes the coefficients constant.
      Poly q = canonical(div(pde.beta_poly(), a) - p * g.tr.T);
      if (depends_on(q, kDepT) || depends_on(p, kDepT)) {
        v.criterion_only = true;
        v.note = "could not normalize the residual time dependence";
        return v;
      }
      Poly Q = canonical(p * T() + q);
      PointTransformation m = PointTransformation::make(div(Poly(-1), Q), reciprocal(Q), Poly(), div(Q, p), -X(),
                                                        pde.assumptions());
      w = compose(m, g.tr);
    }
  }
  TransformResult r;
  if (!witness_constant(w, pde, &r)) {
    v.criterion_only = true;
    v.note = "constructed witness does not give constant coefficients";
    return v;
  }
  v.witness = w;
  v.new_alpha = to_expr(r.alpha_pull);
  v.new_beta = to_expr(r.B);
  v.new_sigma = to_expr(r.S);
  return v;
}

}  // namespace symkawa
