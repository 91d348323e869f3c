#include "symkawa/transform.hpp"

#include <algorithm>

namespace symkawa {

namespace {

Poly T() { return var_poly(VarId::T); }
Poly X() { return var_poly(VarId::X); }
Poly U() { return var_poly(VarId::U); }

Poly d(const Poly& p, VarId v) { return canonical(partial(p, var_kernel(v))); }

Poly sub_vars(const Poly& p, const std::optional<Poly>& t, const std::optional<Poly>& x,
              const std::optional<Poly>& u, const Assumptions& a) {
  SubstitutionMap m;
  if (t) m.bind(var_kernel(VarId::T), *t);
  if (x) m.bind(var_kernel(VarId::X), *x);
  if (u) m.bind(var_kernel(VarId::U), *u);
  return canonical(substitute(p, m, a));
}

bool t_free(const Poly& p) { return !depends_on(p, kDepT); }

// Old coordinates written in the new ones.
struct OldCoords {
  Poly t, x, u;
};

OldCoords old_coords(const PointTransformation& tr, const Poly& tinv) {
  const Assumptions& a = tr.assume;
  Poly X1 = sub_vars(tr.X1, tinv, {}, {}, a), X0 = sub_vars(tr.X0, tinv, {}, {}, a);
  Poly x = canonical(divide(X() - X0, X1));
  Poly U1 = sub_vars(tr.U1, tinv, x, {}, a), U0 = sub_vars(tr.U0, tinv, x, {}, a);
  return {tinv, x, canonical(divide(U() - U0, U1))};
}

Poly to_new(const Poly& p, const OldCoords& c, const Assumptions& a) { return sub_vars(p, c.t, c.x, c.u, a); }

Poly linear_coefficient(const Poly& p, int b) {
  for (auto& [k, c] : split_by_jets(p))
    if (k.size() == 1 && k[0].first == std::make_pair(0, b) && k[0].second == 1) return c;
  return Poly();
}

// candidate = t in terms of s (written as t) for s = T(t); checked by substitution.
bool inverts(const Poly& T, const Poly& cand, const Assumptions& a) {
  return canonical(sub_vars(T, cand, {}, {}, a) - var_poly(VarId::T)).is_zero();
}

// Affine argument p t + q with constant p != 0.
std::optional<std::pair<Poly, Poly>> affine_in_t(const Poly& arg) {
  Poly p = d(arg, VarId::T);
  if (p.is_zero() || !t_free(p) || !is_function_of(arg, kDepT)) return std::nullopt;
  return std::make_pair(p, canonical(arg - p * T()));
}

}  // namespace

PointTransformation PointTransformation::make(const Poly& T_, const Poly& X1, const Poly& X0, const Poly& U1,
                                              const Poly& U0, Assumptions assume) {
  PointTransformation tr{canonical(T_), canonical(X1), canonical(X0), canonical(U1), canonical(U0), std::move(assume)};
  if (!is_function_of(tr.T, kDepT)) throw InputError("T must depend on t only");
  if (!is_function_of(tr.X1, kDepT) || !is_function_of(tr.X0, kDepT)) throw InputError("X1 and X0 must depend on t only");
  if (!is_function_of(tr.U1, kDepT | kDepX) || !is_function_of(tr.U0, kDepT | kDepX))
    throw InputError("U1 and U0 must depend on t and x only");
  if (is_zero(d(tr.T, VarId::T), tr.assume) == ZeroVerdict::Zero) throw InputError("degenerate transformation: T_t = 0");
  if (is_zero(tr.X1, tr.assume) == ZeroVerdict::Zero) throw InputError("degenerate transformation: X1 = 0");
  if (is_zero(tr.U1, tr.assume) == ZeroVerdict::Zero) throw InputError("degenerate transformation: U1 = 0");
  return tr;
}

PointTransformation PointTransformation::from_exprs(const Expr& T_, const Expr& X1, const Expr& X0, const Expr& U1,
                                                    const Expr& U0, Assumptions assume) {
  return make(to_poly(T_, assume), to_poly(X1, assume), to_poly(X0, assume), to_poly(U1, assume),
              to_poly(U0, assume), assume);
}

PointTransformation PointTransformation::identity() { return make(var_poly(VarId::T), Poly(1), Poly(), Poly(1), Poly()); }

std::string PointTransformation::str() const {
  return "t~ = " + to_expr(T).str() + ", x~ = " + to_expr(canonical(X1 * X() + X0)).str() +
         ", u~ = " + to_expr(canonical(U1 * U() + U0)).str();
}

std::optional<Poly> invert_time(const Poly& Tin, const Assumptions& a) {
  Poly T_ = canonical(Tin);
  if (!is_function_of(T_, kDepT) || t_free(T_)) return std::nullopt;
  const Poly s = T();
  std::vector<Poly> cands;

  Poly slope = d(T_, VarId::T);
  if (t_free(slope)) cands.push_back(canonical(divide(s - sub_vars(T_, Poly(), {}, {}, a), slope)));

  std::vector<Term> dep, rest;
  for (const Term& term : T_.terms()) {
    bool td = false;
    for (const Factor& f : term.mono.factors()) td = td || (f.kernel->deps & kDepT);
    (td ? dep : rest).push_back(term);
  }
  Poly cst = Poly::from_terms(rest);
  if (dep.size() == 1) {
    const Term& term = dep[0];
    std::vector<Factor> cf, tf;
    for (const Factor& f : term.mono.factors()) ((f.kernel->deps & kDepT) ? tf : cf).push_back(f);
    if (tf.size() == 1 && tf[0].exponent.is_constant()) {
      Poly c = Poly::from_monomial(Monomial(cf), term.coeff);
      Poly v = canonical(divide(s - cst, c));  // K^e
      const Kernel& K = tf[0].kernel;
      const Rational e = tf[0].exponent.constant();
      Poly w = power(v, LinExp(Rational(1) / e), a);  // K
      if (K->kind == KernelKind::Var) {
        cands.push_back(w);
      } else if (K->kind == KernelKind::SumBase) {
        if (auto pq = affine_in_t(K->args[0])) cands.push_back(canonical(divide(w - pq->second, pq->first)));
      } else if (K->kind == KernelKind::Elem && K->fn == ElemFn::Exp) {
        if (auto pq = affine_in_t(K->args[0])) {
          Poly L = canonical(divide(make_elem(ElemFn::Ln, v), Poly(e)));
          cands.push_back(canonical(divide(L - pq->second, pq->first)));
        }
      } else if (K->kind == KernelKind::Elem && K->fn == ElemFn::Ln && e == 1) {
        if (auto pq = affine_in_t(K->args[0]))
          cands.push_back(canonical(divide(make_elem(ElemFn::Exp, v) - pq->second, pq->first)));
      }
    }
  }

  Fraction fr = as_fraction(T_);
  if (fr.denominator.size() == 1 && fr.denominator[0].second == 1) {
    auto den = affine_in_t(fr.denominator[0].first->args[0]);
    auto num = affine_in_t(fr.numerator);
    if (den && num) {
      // s = (a t + b) / (c t + e)  =>  t = (e s - b) / (a - c s)
      const auto& [cc, ee] = *den;
      const auto& [aa, bb] = *num;
      cands.push_back(canonical(divide(ee * s - bb, aa - cc * s)));
    }
  }

  for (const Poly& c : cands)
    if (inverts(T_, c, a)) return c;
  return std::nullopt;
}

PointTransformation compose(const PointTransformation& b, const PointTransformation& a) {
  Assumptions as = a.assume;
  as.merge(b.assume);
  Poly x1 = canonical(a.X1 * X() + a.X0);
  Poly bU1 = sub_vars(b.U1, a.T, x1, {}, as);
  Poly bX1 = sub_vars(b.X1, a.T, {}, {}, as);
  return PointTransformation::make(sub_vars(b.T, a.T, {}, {}, as), bX1 * a.X1,
                                   bX1 * a.X0 + sub_vars(b.X0, a.T, {}, {}, as), bU1 * a.U1,
                                   bU1 * a.U0 + sub_vars(b.U0, a.T, x1, {}, as), as);
}

std::optional<PointTransformation> inverse(const PointTransformation& tr) {
  auto tinv = invert_time(tr.T, tr.assume);
  if (!tinv) return std::nullopt;
  const Assumptions& a = tr.assume;
  OldCoords c = old_coords(tr, *tinv);
  Poly X1 = sub_vars(tr.X1, *tinv, {}, {}, a), X0 = sub_vars(tr.X0, *tinv, {}, {}, a);
  Poly U1 = sub_vars(tr.U1, *tinv, c.x, {}, a), U0 = sub_vars(tr.U0, *tinv, c.x, {}, a);
  return PointTransformation::make(*tinv, reciprocal(X1), -divide(X0, X1), reciprocal(U1), -divide(U0, U1), a);
}

TildeDerivatives tilde_derivatives(const PointTransformation& tr, const PdeInstance& src) {
  Poly ut = canonical(tr.U1 * U() + tr.U0);
  Poly inv_x1 = reciprocal(tr.X1);
  Poly dx = total_derivative(ut, Direction::X);
  TildeDerivatives r;
  std::vector<Poly> xs{canonical(dx * inv_x1)};
  for (int k = 2; k <= 5; ++k) xs.push_back(canonical(total_derivative(xs.back(), Direction::X) * inv_x1));
  r.ux = xs[0];
  r.u3x = xs[2];
  r.u5x = xs[4];
  Poly shift = canonical((d(tr.X1, VarId::T) * X() + d(tr.X0, VarId::T)) * inv_x1);
  Poly dt = total_derivative(ut, Direction::T) - shift * dx;
  r.ut = on_shell_reduce(canonical(dt * reciprocal(d(tr.T, VarId::T))), src);
  return r;
}

TransformResult apply_point_transformation(const PointTransformation& tr, const PdeInstance& pde) {
  Assumptions as = pde.assumptions();
  as.merge(tr.assume);
  TildeDerivatives td = tilde_derivatives(tr, pde);
  TransformResult r;
  r.S = canonical(-divide(linear_coefficient(td.ut, 5), linear_coefficient(td.u5x, 5)));
  r.B = canonical(-divide(linear_coefficient(td.ut, 3) + r.S * linear_coefficient(td.u5x, 3),
                          linear_coefficient(td.u3x, 3)));
  r.G = canonical(-divide(linear_coefficient(td.ut, 1) + r.S * linear_coefficient(td.u5x, 1) +
                              r.B * linear_coefficient(td.u3x, 1),
                          linear_coefficient(td.ux, 1)));
  Poly residual = canonical(td.ut + r.G * td.ux + r.B * td.u3x + r.S * td.u5x);
  if (is_zero(residual, as) == ZeroVerdict::Nonzero)
    throw FormBroken("the image is not of the form u_t + G u_x + B u_3x + S u_5x = 0");
  if (!is_function_of(r.B, kDepT) || !is_function_of(r.S, kDepT))
    throw FormBroken("the new beta and sigma depend on x or u");

  Poly x_old = canonical(divide(X() - tr.X0, tr.X1));
  Poly U1 = sub_vars(tr.U1, {}, x_old, {}, as), U0 = sub_vars(tr.U0, {}, x_old, {}, as);
  r.G_hat = sub_vars(r.G, {}, x_old, canonical(divide(U() - U0, U1)), as);
  if (depends_on(r.G_hat, kDepX)) throw FormBroken("the new nonlinearity depends on x");

  const bool linear = is_linear_class(pde.cls());
  if (linear) {
    r.alpha_pull = d(r.G_hat, VarId::U);
    if (!is_function_of(r.alpha_pull, kDepT)) throw FormBroken("the image is not linear in u");
    r.b_new = canonical(divide(r.G_hat - r.alpha_pull * U(), r.alpha_pull));
    if (!is_function_of(r.b_new, 0)) throw FormBroken("the new b is not constant");
    r.f_new = U();
    r.linear_form = true;
  } else {
    // Group terms by their u-part; all coefficients must be proportional.
    std::vector<std::pair<Monomial, std::vector<Term>>> groups;
    for (const Term& term : r.G_hat.terms()) {
      std::vector<Factor> uf, tf;
      for (const Factor& f : term.mono.factors()) {
        bool du = f.kernel->deps & kDepU, dt = f.kernel->deps & kDepT;
        if (du && dt) throw FormBroken("the new alpha f does not separate");
        (du ? uf : tf).push_back(f);
      }
      Monomial key(uf);
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
      if (it == groups.end()) {
        groups.push_back({key, {}});
        it = groups.end() - 1;
      }
      it->second.push_back({Monomial(tf), term.coeff});
    }
    if (groups.empty()) throw FormBroken("the new f vanishes");
    Poly c0 = canonical(Poly::from_terms(groups[0].second));
    r.alpha_pull = t_free(c0) ? Poly(1) : c0;
    Poly f;
    for (auto& [m, ts] : groups) {
      Poly ratio = canonical(divide(Poly::from_terms(ts), r.alpha_pull));
      if (!is_function_of(ratio, 0)) throw FormBroken("the new alpha f does not separate");
      f += ratio * Poly::from_monomial(m);
    }
    r.f_new = canonical(f);
    r.b_new = Poly();
  }

  if (auto tinv = invert_time(tr.T, as)) {
    auto at = [&](const Poly& p) { return to_expr(sub_vars(p, *tinv, {}, {}, as)); };
    Expr alpha = at(r.alpha_pull), beta = at(r.B), sigma = at(r.S);
    PdeClass cls = pde.cls();
    bool alpha_one = r.alpha_pull.identical(Poly(1));
    if (cls == PdeClass::NonlinearGauged && !alpha_one) cls = PdeClass::Full;
    if (cls == PdeClass::LinearGauged && (!alpha_one || !r.b_new.is_zero())) cls = PdeClass::LinearB;
    try {
      r.image.emplace(cls, to_expr(r.f_new), alpha, beta, sigma, to_expr(r.b_new), as);
    } catch (const InputError& e) {
      throw FormBroken(std::string("image outside the class: ") + e.what());
    }
  }
  return r;
}

VectorField pushforward(const PointTransformation& tr, const VectorField& vf) {
  auto tinv = invert_time(tr.T, tr.assume);
  if (!tinv) throw DomainError("pushforward needs a closed-form inverse of T");
  Poly tau = canonical(d(tr.T, VarId::T) * vf.tau);
  Poly xi = canonical(vf.tau * (d(tr.X1, VarId::T) * X() + d(tr.X0, VarId::T)) + vf.xi * tr.X1);
  Poly eta = canonical(vf.tau * (d(tr.U1, VarId::T) * U() + d(tr.U0, VarId::T)) +
                       vf.xi * (d(tr.U1, VarId::X) * U() + d(tr.U0, VarId::X)) + vf.eta * tr.U1);
  OldCoords c = old_coords(tr, *tinv);
  return {to_new(tau, c, tr.assume), to_new(xi, c, tr.assume), to_new(eta, c, tr.assume)};
}

}  // namespace symkawa
