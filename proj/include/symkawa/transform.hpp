#pragma once

#include <optional>
#include <string>

#include "symkawa/prolong.hpp"

namespace symkawa {

// t~ = T(t), x~ = X1(t) x + X0(t), u~ = U1(t,x) u + U0(t,x).
struct PointTransformation {
  Poly T, X1, X0, U1, U0;
  Assumptions assume;

  // Validates dependencies and T_t X1 U1 != 0.
  static PointTransformation make(const Poly& T, const Poly& X1, const Poly& X0, const Poly& U1, const Poly& U0,
                                  Assumptions assume = {});
  static PointTransformation from_exprs(const Expr& T, const Expr& X1, const Expr& X0, const Expr& U1,
                                        const Expr& U0, Assumptions assume = {});
  static PointTransformation identity();
  std::string str() const;
};

class FormBroken : public Error {
 public:
  using Error::Error;
};

// Closed-form inverse of s = T(t), returned as a polynomial in t standing for s.
std::optional<Poly> invert_time(const Poly& T, const Assumptions& assume);

// b after a: first a, then b.
PointTransformation compose(const PointTransformation& b, const PointTransformation& a);
std::optional<PointTransformation> inverse(const PointTransformation& tr);

// Derivatives of u~ with respect to t~ and x~ written in the old jet
// coordinates and reduced on the solutions of src.
struct TildeDerivatives {
  Poly ut, ux, u3x, u5x;
};
TildeDerivatives tilde_derivatives(const PointTransformation& tr, const PdeInstance& src);

struct TransformResult {
  // New arbitrary elements in the old variables: G = alpha~ f~ at (T(t), u~),
  // B = beta~(T(t)), S = sigma~(T(t)).
  Poly G, B, S;
  // G with x, u replaced by x~, u~ (t is still the old time).
  Poly G_hat;
  // Split G_hat = alpha~(t) (f~(u~) + b~); alpha~ in the old time.
  Poly alpha_pull, f_new, b_new;
  bool linear_form = false;
  std::optional<PdeInstance> image;  // in the new variables, when T is invertible in closed form
};

// Direct method; throws FormBroken when the image leaves the class template.
TransformResult apply_point_transformation(const PointTransformation& tr, const PdeInstance& pde);

// Generator in the new variables; requires a closed-form inverse.
VectorField pushforward(const PointTransformation& tr, const VectorField& vf);

}  // namespace symkawa
