#include "symkawa/jet.hpp"

#include <algorithm>

namespace symkawa {

const char* class_name(PdeClass c) {
  switch (c) {
    case PdeClass::Full: return "full";
    case PdeClass::NonlinearGauged: return "nonlinear-gauged";
    case PdeClass::LinearB: return "linear-b";
    case PdeClass::LinearGauged: return "linear-gauged";
  }
  return "?";
}

PdeClass parse_class(const std::string& name) {
  for (PdeClass c : {PdeClass::Full, PdeClass::NonlinearGauged, PdeClass::LinearB, PdeClass::LinearGauged})
    if (name == class_name(c)) return c;
  throw InputError("unknown class '" + name + "'");
}

bool is_linear_class(PdeClass c) { return c == PdeClass::LinearB || c == PdeClass::LinearGauged; }

namespace {

void require_nonzero(const Poly& p, const Assumptions& a, const std::string& what) {
  if (is_zero(p, a) != ZeroVerdict::Nonzero) throw InputError(what + " must not vanish");
}

}  // namespace

PdeInstance::PdeInstance(PdeClass cls, Expr f, Expr alpha, Expr beta, Expr sigma, Expr b, Assumptions assume)
    : cls_(cls),
      f_(std::move(f)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      sigma_(std::move(sigma)),
      b_(std::move(b)),
      assume_(std::move(assume)) {
  pF_ = canonical(to_poly(f_, assume_));
  pa_ = canonical(to_poly(alpha_, assume_));
  pb_ = canonical(to_poly(beta_, assume_));
  ps_ = canonical(to_poly(sigma_, assume_));
  Poly pbias = canonical(to_poly(b_, assume_));
  if (!is_function_of(pF_, kDepU)) throw InputError("f must depend on u only");
  for (const Poly* p : {&pa_, &pb_, &ps_})
    if (!is_function_of(*p, kDepT)) throw InputError("alpha, beta and sigma must depend on t only");
  if (!is_function_of(pbias, 0)) throw InputError("b must be a constant");
  if (is_linear_class(cls_) && !(pF_.identical(var_poly(VarId::U))))
    throw InputError(std::string("class ") + class_name(cls_) + " requires f = u");
  if (cls_ == PdeClass::NonlinearGauged || cls_ == PdeClass::LinearGauged) {
    if (!pa_.identical(Poly(1))) throw InputError(std::string("class ") + class_name(cls_) + " requires alpha = 1");
  }
  if (cls_ != PdeClass::LinearB && !pbias.is_zero())
    throw InputError(std::string("class ") + class_name(cls_) + " requires b = 0");
  Poly fu = canonical(partial(pF_, var_kernel(VarId::U)));
  require_nonzero(fu, assume_, "f_u");
  require_nonzero(pa_, assume_, "alpha");
  require_nonzero(pb_, assume_, "beta");
  require_nonzero(ps_, assume_, "sigma");
  if (cls_ == PdeClass::NonlinearGauged) {
    Poly fuu = canonical(partial(fu, var_kernel(VarId::U)));
    require_nonzero(fuu, assume_, "f_uu");
  }
  pF_ = canonical(pF_ + pbias);
  Poly flow = pa_ * pF_ * jet_poly(0, 1) + pb_ * jet_poly(0, 3) + ps_ * jet_poly(0, 5);
  rhs_ = canonical(-flow);
  lhs_ = canonical(jet_poly(1, 0) + flow);
}

PdeInstance PdeInstance::symbolic(PdeClass cls) {
  Expr t = Expr::t(), u = Expr::u();
  Expr f = is_linear_class(cls) ? u : Expr::function("f", {u});
  Expr a = (cls == PdeClass::Full || cls == PdeClass::LinearB) ? Expr::function("alpha", {t}) : Expr(1);
  Expr b = cls == PdeClass::LinearB ? Expr::parameter("b") : Expr(0);
  return PdeInstance(cls, f, a, Expr::function("beta", {t}), Expr::function("sigma", {t}), b);
}

PdeInstance PdeInstance::with_params(const std::map<std::string, Expr>& values) const {
  if (values.empty()) return *this;
  std::vector<Binding> bs;
  for (const auto& [k, v] : values) bs.push_back({Expr::parameter(k), v});
  auto sub = [&](const Expr& e) { return substitute(e, bs, assume_); };
  return PdeInstance(cls_, sub(f_), sub(alpha_), sub(beta_), sub(sigma_), sub(b_), assume_);
}

std::string PdeInstance::str() const {
  std::string s = std::string("[") + class_name(cls_) + "] f = " + f_.str() + ", alpha = " + alpha_.str() +
                  ", beta = " + beta_.str() + ", sigma = " + sigma_.str();
  if (cls_ == PdeClass::LinearB) s += ", b = " + b_.str();
  return s;
}

Poly total_derivative(const Poly& p, Direction d) {
  if (d == Direction::X) {
    return canonical(differentiate(
        p,
        [](const KernelNode& n) -> Poly {
          if (n.kind == KernelKind::Var) {
            if (n.var == VarId::X) return Poly(1);
            if (n.var == VarId::U) return jet_poly(0, 1);
            return Poly();
          }
          if (n.kind == KernelKind::Jet) return jet_poly(n.jet_t, n.jet_x + 1);
          return Poly();
        },
        kDepX | kDepU | kDepJet));
  }
  return canonical(differentiate(
      p,
      [](const KernelNode& n) -> Poly {
        if (n.kind == KernelKind::Var) {
          if (n.var == VarId::T) return Poly(1);
          if (n.var == VarId::U) return jet_poly(1, 0);
          return Poly();
        }
        if (n.kind == KernelKind::Jet) {
          if (n.jet_t == 1) throw DomainError("D_t of " + jet_name(n.jet_t, n.jet_x) + " leaves the jet space; reduce on shell first");
          return jet_poly(1, n.jet_x);
        }
        return Poly();
      },
      kDepT | kDepU | kDepJet));
}

Expr total_derivative(const Expr& e, Direction d) { return to_expr(total_derivative(to_poly(e), d)); }

Poly on_shell_reduce(const Poly& p, const PdeInstance& pde) {
  std::vector<Kernel> ks;
  collect_kernels(p, ks, true);
  int top = -1;
  for (const Kernel& k : ks)
    if (k->kind == KernelKind::Jet && k->jet_t == 1) top = std::max(top, k->jet_x);
  if (top < 0) return canonical(p);
  SubstitutionMap m;
  Poly cur = pde.rhs();
  for (int b = 0; b <= top; ++b) {
    if (b > 0) cur = total_derivative(cur, Direction::X);
    m.bind(jet_kernel(1, b), cur);
  }
  return canonical(substitute(p, m, pde.assumptions()));
}

Expr on_shell_reduce(const Expr& e, const PdeInstance& pde) {
  return to_expr(on_shell_reduce(to_poly(e, pde.assumptions()), pde));
}

std::string jet_monomial_name(const JetMonomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (const auto& [j, k] : m) {
    if (!s.empty()) s += "*";
    s += jet_name(j.first, j.second);
    if (k != 1) s += "^" + std::to_string(k);
  }
  return s;
}

Poly jet_monomial_poly(const JetMonomial& m) {
  Poly p(1);
  for (const auto& [j, k] : m) p = p * power(jet_poly(j.first, j.second), k);
  return p;
}

bool jet_monomial_less(const JetMonomial& a, const JetMonomial& b) {
  int da = 0, db = 0;
  for (const auto& e : a) da += e.second;
  for (const auto& e : b) db += e.second;
  if (da != db) return da < db;
  // Higher coordinates first, then by exponent.
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].first != b[i].first) return a[i].first > b[i].first;
    if (a[i].second != b[i].second) return a[i].second > b[i].second;
  }
  return a.size() < b.size();
}

std::vector<std::pair<JetMonomial, Poly>> split_by_jets(const Poly& p) {
  auto less = [](const JetMonomial& a, const JetMonomial& b) { return jet_monomial_less(a, b); };
  std::map<JetMonomial, std::vector<Term>, decltype(less)> groups(less);
  const Poly c = canonical(p);
  for (const Term& t : c.terms()) {
    JetMonomial key;
    std::vector<Factor> rest;
    for (const Factor& f : t.mono.factors()) {
      if (f.kernel->kind == KernelKind::Jet) {
        auto k = f.exponent.to_int();
        if (!k || *k < 0) throw InputError("jet coordinate with non-integer or negative power");
        key.push_back({{f.kernel->jet_t, f.kernel->jet_x}, static_cast<int>(*k)});
      } else {
        if (f.kernel->deps & kDepJet) throw InputError("jet coordinate occurs non-polynomially");
        rest.push_back(f);
      }
    }
    std::sort(key.begin(), key.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    groups[key].push_back({Monomial(std::move(rest)), t.coeff});
  }
  std::vector<std::pair<JetMonomial, Poly>> out;
  for (auto& [k, ts] : groups) {
    Poly c = canonical(Poly::from_terms(std::move(ts)));
    if (!c.is_zero()) out.emplace_back(k, std::move(c));
  }
  return out;
}

}  // namespace symkawa
