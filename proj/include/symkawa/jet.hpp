#pragma once

#include <map>
#include <string>
#include <vector>

#include "symkawa/expr.hpp"

namespace symkawa {

// Subclasses of u_t + alpha(t) (f(u) + b) u_x + beta(t) u_3x + sigma(t) u_5x = 0.
enum class PdeClass {
  Full,             // arbitrary f, b = 0
  NonlinearGauged,  // alpha = 1
  LinearB,          // f = u, constant b
  LinearGauged,     // f = u, alpha = 1, b = 0
};

const char* class_name(PdeClass c);
PdeClass parse_class(const std::string& name);
bool is_linear_class(PdeClass c);

class PdeInstance {
 public:
  // Validates the class constraints and f_u alpha beta sigma != 0.
  PdeInstance(PdeClass cls, Expr f, Expr alpha, Expr beta, Expr sigma, Expr b = Expr(0),
              Assumptions assume = {});
  // Arbitrary elements left as opaque function atoms (class level).
  static PdeInstance symbolic(PdeClass cls);

  PdeClass cls() const { return cls_; }
  const Expr& f() const { return f_; }
  const Expr& alpha() const { return alpha_; }
  const Expr& beta() const { return beta_; }
  const Expr& sigma() const { return sigma_; }
  const Expr& b() const { return b_; }
  const Assumptions& assumptions() const { return assume_; }

  // Canonical polynomials of the elements; F is f + b.
  const Poly& F() const { return pF_; }
  const Poly& alpha_poly() const { return pa_; }
  const Poly& beta_poly() const { return pb_; }
  const Poly& sigma_poly() const { return ps_; }

  // Left-hand side and the right-hand side of u_t = rhs.
  const Poly& lhs() const { return lhs_; }
  const Poly& rhs() const { return rhs_; }

  PdeInstance with_params(const std::map<std::string, Expr>& values) const;
  std::string str() const;

 private:
  PdeClass cls_;
  Expr f_, alpha_, beta_, sigma_, b_;
  Assumptions assume_;
  Poly pF_, pa_, pb_, ps_, lhs_, rhs_;
};

enum class Direction { T, X };

// Total derivative on the jet space; jets stay within t-order 1 and x-order 10.
Poly total_derivative(const Poly& p, Direction d);
Expr total_derivative(const Expr& e, Direction d);

// Replaces u_t, u_tx, ... by x-derivatives of the right-hand side.
Poly on_shell_reduce(const Poly& p, const PdeInstance& pde);
Expr on_shell_reduce(const Expr& e, const PdeInstance& pde);

// Jet monomial u_{J1}^{k1} u_{J2}^{k2} ..., keyed by (t-order, x-order).
using JetMonomial = std::vector<std::pair<std::pair<int, int>, int>>;
std::string jet_monomial_name(const JetMonomial& m);
Poly jet_monomial_poly(const JetMonomial& m);
// Graded lexicographic order on jet monomials.
bool jet_monomial_less(const JetMonomial& a, const JetMonomial& b);

// Splits a polynomial in the jet coordinates into its coefficients.  Throws
// when a jet coordinate occurs non-polynomially.
std::vector<std::pair<JetMonomial, Poly>> split_by_jets(const Poly& p);

}  // namespace symkawa
