#pragma once

#include <string>

#include "symkawa/jet.hpp"

namespace symkawa {

// tau d_t + xi d_x + eta d_u with components in t, x, u.
struct VectorField {
  Poly tau, xi, eta;

  static VectorField from_exprs(const Expr& tau, const Expr& xi, const Expr& eta, const Assumptions& a = {});
  // "<tau>; <xi>; <eta>"
  static VectorField parse(const std::string& text, const Assumptions& a = {});
  // Opaque tau(t,x,u), xi(t,x,u), eta(t,x,u).
  static VectorField generic();

  VectorField operator+(const VectorField& o) const;
  VectorField scaled(const Poly& c) const;
  bool is_zero() const { return tau.is_zero() && xi.is_zero() && eta.is_zero(); }
  // Applies the field as a derivation to a function of t, x, u.
  Poly apply(const Poly& g) const;
  std::string str() const;
  Expr tau_expr() const { return to_expr(tau); }
  Expr xi_expr() const { return to_expr(xi); }
  Expr eta_expr() const { return to_expr(eta); }
};

// Coefficient of d/du_J in the prolonged field; J is (1,0) or (0,b), b <= 9.
Poly prolong_coefficient(const VectorField& vf, int t_order, int x_order);

// Q^(5) applied to the equation, restricted to its solutions.
Poly invariance_residual(const VectorField& vf, const PdeInstance& pde);

enum class Verdict { Yes, No, Probably };
const char* verdict_name(Verdict v);
Verdict verdict_of(const Poly& residual, const Assumptions& a, std::uint64_t seed = 0);

Verdict is_symmetry(const VectorField& vf, const PdeInstance& pde, std::uint64_t seed = 0);

VectorField commutator(const VectorField& a, const VectorField& b);

}  // namespace symkawa
