#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symkawa/prolong.hpp"

namespace symkawa {

struct ParamConstraint {
  std::string name;
  Rational excluded;  // name != excluded
};

struct ClassificationCase {
  int table = 1;
  int number = 0;
  PdeClass cls = PdeClass::NonlinearGauged;
  Expr f, beta, sigma;
  std::vector<ParamConstraint> constraints;
  Assumptions assume;
  std::vector<std::string> notes;
  std::vector<std::string> basis_text;  // after parameter substitution
  std::vector<VectorField> basis;

  PdeInstance pde() const;
  std::string label() const;
};

// Row numbers present in a table (1 or 2).
std::vector<int> table_cases(int table);

// Parameters not given stay symbolic; throws InputError on an unknown case,
// an unknown parameter or a violated constraint.
ClassificationCase lookup_case(int table, int case_no, const std::map<std::string, Expr>& params = {});

struct FieldCheck {
  std::string field;
  Verdict verdict = Verdict::No;
  Expr residual;
};

struct CommutatorCheck {
  int i = 0, j = 0;
  std::string bracket;
  std::vector<Expr> coefficients;  // [e_i, e_j] = sum_k c_k e_k
  bool closed = false;
  bool constants_free = false;  // c_k free of t, x, u
};

struct CaseReport {
  int table = 1;
  int number = 0;
  std::vector<FieldCheck> fields;
  std::vector<CommutatorCheck> commutators;
  int dimension = 0;  // rank of the basis over the constants
  int basis_size = 0;
  bool pass = false;
};

CaseReport verify_case(const ClassificationCase& c, std::uint64_t seed = 0);

// Verifies every row of a table; jobs <= 0 uses the hardware concurrency.
std::vector<CaseReport> verify_table(int table, const std::map<std::string, Expr>& params = {}, int jobs = 0,
                                     std::uint64_t seed = 0);

// Coefficients c with sum_k c_k basis_k = target over the constants, if any.
std::optional<std::vector<Poly>> express_in_span(const std::vector<VectorField>& basis, const VectorField& target);
int span_rank(const std::vector<VectorField>& basis);

struct KernelSample {
  PdeInstance pde;
  std::vector<FieldCheck> expected_yes, expected_no;
  bool ok = false;
};

struct KernelReport {
  PdeClass cls = PdeClass::NonlinearGauged;
  std::vector<KernelSample> samples;
  int resampled = 0;  // instances rejected as possibly admitting an extension
  bool ok = false;
};

// Random instances off every table row: the kernel fields must be symmetries
// and the probe fields must not.
KernelReport verify_kernel(PdeClass cls, int sample_count, std::uint64_t seed = 0);

// False only when the classifying equations for beta and sigma can have a
// solution with tau != 0, i.e. the instance might extend the kernel.
bool certainly_off_table(const PdeInstance& pde);

}  // namespace symkawa
