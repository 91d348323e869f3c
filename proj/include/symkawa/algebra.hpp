#pragma once

// Canonical algebra used behind the expression API.
//
// A Poly is a finite sum of rational multiples of monomials; a monomial is a
// product of kernels raised to exponents that are rational-linear in the
// parameters.  Kernels are the irreducible building blocks: the variables
// t, x, u, named parameters, jet coordinates, positive integers (only as bases
// of fractional powers), opaque function atoms, elementary functions, sum
// bases (primitive polynomials appearing in denominators or under fractional
// powers) and opaque powers (fractional powers of bases of unknown sign).

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symkawa/assumptions.hpp"

namespace symkawa {

using Rational = mpq_class;

enum class VarId : std::uint8_t { T = 0, X = 1, U = 2 };
enum class ElemFn : std::uint8_t { Exp, Ln, Sin, Cos, Arctan };
enum class KernelKind : std::uint8_t { Number, Var, Param, Jet, Func, Elem, SumBase, OpaquePow };

const char* var_name(VarId v);
const char* elem_name(ElemFn f);

class KernelNode;
using Kernel = std::shared_ptr<const KernelNode>;
class Poly;

int compare_kernels(const Kernel& a, const Kernel& b);
struct KernelLess {
  bool operator()(const Kernel& a, const Kernel& b) const { return compare_kernels(a, b) < 0; }
};

std::size_t hash_rational(const Rational& q);

// c0 + sum_i c_i * p_i with p_i parameter kernels.
class LinExp {
 public:
  LinExp() = default;
  LinExp(Rational c) : constant_(std::move(c)) {}  // NOLINT(implicit)
  LinExp(long c) : constant_(c) {}                 // NOLINT(implicit)
  static LinExp parameter(const Kernel& p, const Rational& coeff = 1);
  static std::optional<LinExp> from_poly(const Poly& p);

  const Rational& constant() const { return constant_; }
  const std::vector<std::pair<Kernel, Rational>>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && sgn(constant_) == 0; }
  bool is_integer() const { return terms_.empty() && constant_.get_den() == 1; }
  std::optional<long> to_int() const;
  Rational coefficient_of(const Kernel& p) const;

  LinExp operator+(const LinExp& o) const;
  LinExp operator-(const LinExp& o) const;
  LinExp operator-() const;
  LinExp scaled(const Rational& c) const;
  // Product is linear only when one factor is constant.
  static std::optional<LinExp> multiply(const LinExp& a, const LinExp& b);

  // Exponents in the same class differ by an integer.
  LinExp class_key() const;
  Poly to_poly() const;

  int compare(const LinExp& o) const;
  bool operator==(const LinExp& o) const { return compare(o) == 0; }
  bool operator!=(const LinExp& o) const { return compare(o) != 0; }
  std::size_t hash() const;

 private:
  Rational constant_{0};
  std::vector<std::pair<Kernel, Rational>> terms_;
};

struct Factor {
  Kernel kernel;
  LinExp exponent;
};

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<Factor> sorted_factors);
  static Monomial of(const Kernel& k, const LinExp& e);

  const std::vector<Factor>& factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  std::size_t hash() const { return hash_; }
  int compare(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return compare(o) == 0; }
  const LinExp* exponent_of(const Kernel& k) const;

 private:
  std::vector<Factor> factors_;
  std::size_t hash_ = 0x9e3779b9;
};

// Product of two monomials; numeric kernels may release a rational factor.
std::pair<Rational, Monomial> multiply(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coeff;
};

class Poly {
 public:
  Poly() = default;
  Poly(Rational c);  // NOLINT(implicit)
  Poly(long c);      // NOLINT(implicit)
  static Poly from_kernel(const Kernel& k, const LinExp& e = LinExp(1));
  static Poly from_monomial(Monomial m, Rational c = 1);
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  std::optional<Rational> as_constant() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scaled(const Rational& c) const;

  int compare(const Poly& o) const;
  bool identical(const Poly& o) const { return compare(o) == 0; }
  std::size_t hash() const;

 private:
  std::vector<Term> terms_;
};

enum : std::uint32_t {
  kDepT = 1u,
  kDepX = 2u,
  kDepU = 4u,
  kDepJet = 8u,
  kDepParam = 16u,
  kDepFunc = 32u,
};

class KernelNode {
 public:
  KernelKind kind{};
  std::size_t hash = 0;
  std::uint32_t deps = 0;
  VarId var{};
  std::string name;
  int jet_t = 0;
  int jet_x = 0;
  mpz_class number;
  ElemFn fn{};
  std::vector<Poly> args;  // function args; elementary/sum-base/opaque base in args[0]
  std::vector<int> orders;
  LinExp exponent;  // opaque powers
};

// Kernel and poly construction.
Kernel var_kernel(VarId v);
Kernel param_kernel(const std::string& name);
Kernel jet_kernel(int t_order, int x_order);
Poly var_poly(VarId v);
Poly param_poly(const std::string& name);
Poly jet_poly(int t_order, int x_order);
Poly make_func(const std::string& name, std::vector<Poly> args, std::vector<int> orders);
Poly make_elem(ElemFn fn, const Poly& arg);

// Canonical N * prod B^-m form; zero iff the input is rationally zero in the
// kernel algebra.
Poly canonical(const Poly& p);

struct Fraction {
  Poly numerator;
  std::vector<std::pair<Kernel, long>> denominator;  // sum-base kernel, multiplicity
};
Fraction as_fraction(const Poly& canonical_poly);

std::optional<Poly> divide_exact(const Poly& n, const Poly& d);
Poly reciprocal(const Poly& p);
Poly divide(const Poly& a, const Poly& b);
Poly power(const Poly& base, const LinExp& e, const Assumptions& assume);
Poly power(const Poly& base, long k);

bool is_positive(const Poly& p, const Assumptions& assume);
bool is_positive(const Kernel& k, const Assumptions& assume);

// Differentiation driven by the derivative of each base symbol (variables,
// parameters, jets); everything else follows by the chain rule.
using SymbolDerivative = std::function<Poly(const KernelNode&)>;
// relevant: dependency bits of the symbols with nonzero derivative.
Poly differentiate(const Poly& p, const SymbolDerivative& d, std::uint32_t relevant = ~0u);
Poly partial(const Poly& p, const Kernel& symbol);

struct FunctionBinding {
  std::vector<Kernel> formals;
  Poly body;
};
struct SubstitutionMap {
  std::vector<std::pair<Kernel, Poly>> symbols;
  std::map<std::string, FunctionBinding> functions;
  void bind(const Kernel& k, Poly v) { symbols.emplace_back(k, std::move(v)); }
};
// Simultaneous substitution.
Poly substitute(const Poly& p, const SubstitutionMap& m, const Assumptions& assume);

// Structural queries.
bool contains_kernel_kind(const Poly& p, KernelKind kind);
bool depends_on(const Poly& p, std::uint32_t dep_mask);
bool kernel_depends_on(const Kernel& k, const Kernel& symbol);
bool poly_depends_on(const Poly& p, const Kernel& symbol);
void collect_kernels(const Poly& p, std::vector<Kernel>& out, bool recursive);
bool is_function_of(const Poly& p, std::uint32_t allowed_deps);

// Numeric evaluation.
using FunctionValue = std::function<double(const std::vector<double>& args, const std::vector<int>& orders)>;
struct NumericEnv {
  std::unordered_map<std::string, double> symbols;  // t, x, u, parameters, jet names
  std::unordered_map<std::string, FunctionValue> functions;
};
double evaluate(const Poly& p, const NumericEnv& env);
double evaluate_term(const Term& t, const NumericEnv& env);
double evaluate_linexp(const LinExp& e, const NumericEnv& env);

std::string jet_name(int t_order, int x_order);

}  // namespace symkawa
