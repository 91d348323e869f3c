#pragma once

#include <string>
#include <vector>

#include "symkawa/prolong.hpp"

namespace symkawa {

struct DetEquation {
  std::string key;  // jet monomial (or other splitting key) of the coefficient
  Poly lhs;         // lhs = 0
};

struct DeterminingSystem {
  std::string provenance;  // "symmetry" or "admissible"
  std::vector<DetEquation> equations;
  std::vector<std::string> unknowns;
  Poly residual;  // the split expression
};

// Splits the invariance residual of the generic field tau(t,x,u) d_t +
// xi(t,x,u) d_x + eta(t,x,u) d_u by jet monomials.
DeterminingSystem derive_determining(const PdeInstance& pde);

// Substitutes the components of vf for tau, xi, eta into every equation.
Verdict check_satisfies(const DeterminingSystem& sys, const VectorField& vf, const Assumptions& a = {},
                        std::uint64_t seed = 0);

// Function-atom substitution tau, xi, eta -> given bodies in t, x, u.
SubstitutionMap field_substitution(const VectorField& vf);

struct AnsatzMatch {
  std::string key;
  std::string matched;  // name of the reference equation, empty on mismatch
  Expr equation;
};

struct AnsatzReport {
  PdeClass cls;
  std::vector<AnsatzMatch> groups;  // surviving equations after the ansatz
  std::vector<std::string> missing;  // reference equations not produced
  // Refinement eta0 = c0, mu = -2 xi1 + c1 (nonlinear class only).
  bool refined = false;
  bool first_group_vanishes = false;
  Expr x_coefficient;  // of the refined second group; xi1_t = 0
  Expr reduced;        // refined second group without its x part
  bool reduced_matches = false;
  bool ok = false;
};

// corrupt replaces the 2 xi1 in the u-coefficient of eta by 3 xi1.
AnsatzReport verify_ansatz_reduction(PdeClass cls, bool corrupt = false);

}  // namespace symkawa
