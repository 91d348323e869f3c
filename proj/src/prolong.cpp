#include "symkawa/prolong.hpp"

#include <set>

namespace symkawa {

VectorField VectorField::from_exprs(const Expr& tau, const Expr& xi, const Expr& eta, const Assumptions& a) {
  VectorField v{canonical(to_poly(tau, a)), canonical(to_poly(xi, a)), canonical(to_poly(eta, a))};
  for (const Poly* p : {&v.tau, &v.xi, &v.eta})
    if (!is_function_of(*p, kDepT | kDepX | kDepU)) throw InputError("vector field components must not contain jets");
  return v;
}

VectorField VectorField::parse(const std::string& text, const Assumptions& a) {
  std::vector<std::string> parts;
  std::vector<long> starts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ';') {
      parts.push_back(text.substr(start, i - start));
      starts.push_back(static_cast<long>(start));
      start = i + 1;
    }
  }
  if (parts.size() != 3) throw InputError("vector field must have three components separated by ';'");
  std::vector<Expr> es;
  for (std::size_t i = 0; i < 3; ++i) {
    try {
      es.push_back(symkawa::parse(parts[i]));
    } catch (const InputError& e) {
      throw InputError(e.what(), e.offset() >= 0 ? starts[i] + e.offset() : -1);
    }
  }
  return from_exprs(es[0], es[1], es[2], a);
}

VectorField VectorField::generic() {
  std::vector<Poly> args{var_poly(VarId::T), var_poly(VarId::X), var_poly(VarId::U)};
  return {make_func("tau", args, {}), make_func("xi", args, {}), make_func("eta", args, {})};
}

VectorField VectorField::operator+(const VectorField& o) const {
  return {canonical(tau + o.tau), canonical(xi + o.xi), canonical(eta + o.eta)};
}

VectorField VectorField::scaled(const Poly& c) const {
  return {canonical(tau * c), canonical(xi * c), canonical(eta * c)};
}

Poly VectorField::apply(const Poly& g) const {
  Poly r;
  if (!tau.is_zero()) r += tau * partial(g, var_kernel(VarId::T));
  if (!xi.is_zero()) r += xi * partial(g, var_kernel(VarId::X));
  if (!eta.is_zero()) r += eta * partial(g, var_kernel(VarId::U));
  return canonical(r);
}

std::string VectorField::str() const {
  return to_expr(tau).str() + "; " + to_expr(xi).str() + "; " + to_expr(eta).str();
}

Poly prolong_coefficient(const VectorField& vf, int a, int b) {
  if (a == 1 && b == 0) {
    Poly r = total_derivative(vf.eta, Direction::T) - jet_poly(1, 0) * total_derivative(vf.tau, Direction::T) -
             jet_poly(0, 1) * total_derivative(vf.xi, Direction::T);
    return canonical(r);
  }
  if (a != 0 || b < 0 || b > 9) throw InputError("prolongation coefficient not available for " + jet_name(a, b));
  Poly phi = vf.eta;
  if (b == 0) return phi;
  Poly dtau = total_derivative(vf.tau, Direction::X);
  Poly dxi = total_derivative(vf.xi, Direction::X);
  for (int k = 1; k <= b; ++k) {
    Poly r = total_derivative(phi, Direction::X);
    if (!dtau.is_zero()) r -= jet_poly(1, k - 1) * dtau;
    if (!dxi.is_zero()) r -= jet_poly(0, k) * dxi;
    phi = canonical(r);
  }
  return phi;
}

Poly invariance_residual(const VectorField& vf, const PdeInstance& pde) {
  const Poly& delta = pde.lhs();
  Poly r = vf.apply(delta);
  std::vector<Kernel> ks;
  collect_kernels(delta, ks, false);
  std::set<std::pair<int, int>> seen;
  for (const Kernel& k : ks) {
    if (k->kind != KernelKind::Jet || !seen.insert({k->jet_t, k->jet_x}).second) continue;
    Poly d = partial(delta, k);
    if (d.is_zero()) continue;
    r += d * prolong_coefficient(vf, k->jet_t, k->jet_x);
  }
  return on_shell_reduce(r, pde);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "YES";
    case Verdict::No: return "NO";
    case Verdict::Probably: return "PROBABLY";
  }
  return "?";
}

Verdict verdict_of(const Poly& residual, const Assumptions& a, std::uint64_t seed) {
  switch (is_zero(residual, a, seed)) {
    case ZeroVerdict::Zero: return Verdict::Yes;
    case ZeroVerdict::ProbablyZero: return Verdict::Probably;
    case ZeroVerdict::Nonzero: return Verdict::No;
  }
  return Verdict::No;
}

Verdict is_symmetry(const VectorField& vf, const PdeInstance& pde, std::uint64_t seed) {
  return verdict_of(invariance_residual(vf, pde), pde.assumptions(), seed);
}

VectorField commutator(const VectorField& a, const VectorField& b) {
  return {canonical(a.apply(b.tau) - b.apply(a.tau)), canonical(a.apply(b.xi) - b.apply(a.xi)),
          canonical(a.apply(b.eta) - b.apply(a.eta))};
}

}  // namespace symkawa
