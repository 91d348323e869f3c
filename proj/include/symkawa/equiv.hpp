#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symkawa/detsys.hpp"
#include "symkawa/transform.hpp"

namespace symkawa {

// Closed-form equivalence groups.
//   full:             x~ = d1 x + d2, u~ = d3 u + d4, f~ = d0 f
//   full-extended:    x~ = d1 (x + d2 A) + d3, u~ = d4 u + d5, f~ = d0 (f + d2), A~ = d1 A / d0 + e0
//   linear-b:         projective (d1, d2, dp1, dp2) acting on A and (e0, e1, e2, e3)
//   nonlinear-gauged: t~ = d1 t + d2, x~ = d3 x + d4 t + d5, u~ = d6 u + d7
//   linear-gauged:    projective (d1, d2, d3, d4) acting on t and (e0, e1, e2)
// The first three act on classes with alpha and carry a free function T(t); A
// is an antiderivative of alpha.
enum class EquivGroup { Full, FullExtended, LinearB, NonlinearGauged, LinearGauged };
const char* group_name(EquivGroup g);
EquivGroup parse_group(const std::string& name);
PdeClass group_class(EquivGroup g);
const std::vector<std::string>& group_parameters(EquivGroup g);

struct GroupElement {
  EquivGroup group = EquivGroup::Full;
  std::map<std::string, Rational> params;  // missing entries take their identity values
  Poly T = var_poly(VarId::T);             // full, full-extended, linear-b
  Assumptions assume;

  Rational param(const std::string& name) const;
  // Throws InputError on unknown parameters or a degenerate element.
  void validate() const;
  std::string str() const;
};

// Antiderivative of a concrete alpha from a fixed table (polynomials, powers
// t^k with k != -1, 1/t, exponentials of affine arguments, sums of these).
std::optional<Poly> antiderivative(const Poly& alpha);

// A for the element: the opaque atom A(t) when alpha is the atom alpha(t),
// otherwise the tabulated antiderivative.
Poly nonlocal_A(const PdeInstance& pde);

PointTransformation induced(const GroupElement& g, const PdeInstance& pde);

struct ElementImage {
  // Pullbacks to the old variables, as in TransformResult.
  Poly G, B, S;
  Poly alpha_pull, f_new, b_new;  // f_new in the new u; b_new for the linear groups
  std::optional<Poly> A_new;      // pullback of the new A (full-extended, linear-b)
  bool A_consistent = true;       // d(A_new)/dt~ = alpha~
  std::optional<PdeInstance> image;
};

ElementImage equiv_group_image(const GroupElement& g, const PdeInstance& pde);

struct Agreement {
  bool ok = false;
  std::vector<std::string> mismatches;
};
// Compares the closed form with the direct method.
Agreement compare_with_direct(const ElementImage& closed, const TransformResult& direct, const Assumptions& a);

// Parameters drawn from the halves in [-3, 3]; T from a small family
// including the opaque atom T(t).
GroupElement random_group_element(EquivGroup g, std::mt19937_64& rng);

// Admissible transformations between members of the class.
enum class AdmissibleBranch { Full, Nonlinear, Linear };
const char* branch_name(AdmissibleBranch b);
AdmissibleBranch parse_branch(const std::string& name);
// Unknowns T(t), X1(t), X0(t), U1, U0(t,x); new elements alpha_n(t), beta_n(t),
// sigma_n(t), f_n(.) and the parameter b_n.
DeterminingSystem derive_admissible_system(AdmissibleBranch branch);
// The system a group element must satisfy.
AdmissibleBranch admissible_branch(EquivGroup g);

struct AdmissibleCheck {
  bool ok = false;
  std::vector<std::string> failing;  // keys of equations that did not vanish
};
AdmissibleCheck check_admissible(const DeterminingSystem& sys, const GroupElement& g);

struct GaugeResult {
  PointTransformation tr;
  std::optional<PdeInstance> pde;  // absent when the time change has no closed-form inverse
  bool nonclosed = false;
  Poly beta_pull, sigma_pull;      // beta/alpha and sigma/alpha in the old time
};
// alpha -> 1 (and b -> 0 in the linear class).
GaugeResult gauge_alpha(const PdeInstance& pde);
GaugeResult gauge_alpha_and_b(const PdeInstance& pde);

struct ReducibilityCondition {
  std::string name;
  Expr value;
  ZeroVerdict verdict;
};

struct ReducibilityVerdict {
  bool reducible = false;
  bool inconclusive = false;  // some condition only probably vanishes
  bool nonlinear_branch = false;
  std::vector<ReducibilityCondition> conditions;
  std::optional<PointTransformation> witness;
  bool criterion_only = false;  // reducible but no witness could be built
  std::string note;
  Expr new_alpha, new_beta, new_sigma;  // pullbacks under the witness
};

ReducibilityVerdict check_reducibility(const PdeInstance& pde);

// Zero t-derivatives of the transformed alpha, beta, sigma.
bool witness_constant(const PointTransformation& tr, const PdeInstance& pde, TransformResult* out = nullptr);

}  // namespace symkawa
