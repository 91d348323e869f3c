#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "symkawa/algebra.hpp"

namespace symkawa {

enum class ExprKind : std::uint8_t { Number, Variable, Parameter, Jet, Function, Elementary, Pow, Mul, Add };

class ExprNode;

// Immutable expression tree.  Construction flattens sums and products, folds
// numbers and sorts operands, so structurally equal trees print identically.
class Expr {
 public:
  Expr();  // 0
  Expr(long v);                // NOLINT(implicit)
  Expr(const Rational& v);     // NOLINT(implicit)
  static Expr variable(VarId v);
  static Expr t() { return variable(VarId::T); }
  static Expr x() { return variable(VarId::X); }
  static Expr u() { return variable(VarId::U); }
  static Expr parameter(const std::string& name);
  static Expr jet(int t_order, int x_order);
  static Expr function(const std::string& name, std::vector<Expr> args, std::vector<int> orders = {});
  static Expr elementary(ElemFn fn, Expr arg);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, Expr exponent);

  ExprKind kind() const;
  const Rational& number() const;
  VarId variable_id() const;
  const std::string& name() const;
  int jet_t() const;
  int jet_x() const;
  ElemFn elementary_fn() const;
  const std::vector<Expr>& operands() const;
  const std::vector<int>& orders() const;

  bool is_number() const { return kind() == ExprKind::Number; }
  bool is_zero() const;
  bool is_one() const;
  std::string str() const;
  std::size_t hash() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
  friend class ExprBuilder;
};

int compare(const Expr& a, const Expr& b);
inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, const Expr& e);

Expr parse(std::string_view text);
std::string to_string(const Expr& e);

// Conversion between the tree and the canonical algebra.
Poly to_poly(const Expr& e, const Assumptions& assume = {});
Expr to_expr(const Poly& p);
LinExp to_linexp(const Expr& e);
Expr linexp_expr(const LinExp& e);

Expr normalize(const Expr& e, const Assumptions& assume = {});
// var is a variable, parameter or jet-coordinate expression.
Expr differentiate(const Expr& e, const Expr& var, int order = 1, const Assumptions& assume = {});

// pattern is a symbol, or a function atom whose arguments are distinct symbols
// (the formals), e.g. f(u) -> u^2.
struct Binding {
  Expr pattern;
  Expr value;
};
Expr substitute(const Expr& e, const std::vector<Binding>& bindings, const Assumptions& assume = {});
SubstitutionMap make_substitution(const std::vector<Binding>& bindings, const Assumptions& assume = {});

double eval_numeric(const Expr& e, const NumericEnv& env);

enum class ZeroVerdict { Zero, ProbablyZero, Nonzero };
const char* verdict_name(ZeroVerdict v);

// Exact when the canonical form vanishes; otherwise a seeded numeric probe.
ZeroVerdict is_zero(const Poly& p, const Assumptions& assume = {}, std::uint64_t seed = 0);
ZeroVerdict is_zero(const Expr& e, const Assumptions& assume = {}, std::uint64_t seed = 0);

// Deterministic random analytic stand-ins for opaque functions (A and alpha
// are kept consistent, A' = alpha).
FunctionValue random_function(const std::string& name, std::uint64_t seed);
NumericEnv random_env(const std::vector<Kernel>& kernels, std::uint64_t seed, const Assumptions& assume);

Kernel symbol_kernel(const Expr& symbol);

}  // namespace symkawa
