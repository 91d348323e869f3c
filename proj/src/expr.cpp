#include "symkawa/expr.hpp"

#include <algorithm>
#include <cmath>

#include "algebra_internal.hpp"

namespace symkawa {

class ExprNode {
 public:
  ExprKind kind{};
  Rational number;
  VarId var{};
  std::string name;
  int jt = 0, jx = 0;
  ElemFn fn{};
  std::vector<Expr> ops;
  std::vector<int> orders;
  std::size_t hash = 0;
};

class ExprBuilder {
 public:
  static Expr make(std::shared_ptr<ExprNode> n) {
    std::size_t h = static_cast<std::size_t>(n->kind) * 131;
    switch (n->kind) {
      case ExprKind::Number: h = detail::mix(h, hash_rational(n->number)); break;
      case ExprKind::Variable: h = detail::mix(h, static_cast<std::size_t>(n->var)); break;
      case ExprKind::Parameter: h = detail::mix(h, detail::fnv(n->name)); break;
      case ExprKind::Jet: h = detail::mix(h, static_cast<std::size_t>(n->jt * 64 + n->jx)); break;
      default:
        h = detail::mix(h, detail::fnv(n->name) + static_cast<std::size_t>(n->fn));
        for (int o : n->orders) h = detail::mix(h, static_cast<std::size_t>(o));
        for (const Expr& e : n->ops) h = detail::mix(h, e.hash());
    }
    n->hash = h;
    return Expr(std::move(n));
  }
  static std::shared_ptr<ExprNode> node(ExprKind k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    return n;
  }
};

namespace {

Expr number_expr(const Rational& q) {
  auto n = ExprBuilder::node(ExprKind::Number);
  n->number = q;
  return ExprBuilder::make(std::move(n));
}

bool is_linear_exponent(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Parameter: return true;
    case ExprKind::Add:
      return std::all_of(e.operands().begin(), e.operands().end(), is_linear_exponent);
    case ExprKind::Mul: {
      int symbolic = 0;
      for (const Expr& f : e.operands()) {
        if (f.is_number()) continue;
        if (!is_linear_exponent(f)) return false;
        ++symbolic;
      }
      return symbolic <= 1;
    }
    default: return false;
  }
}

bool is_integer_number(const Expr& e) { return e.is_number() && e.number().get_den() == 1; }

int kind_rank(ExprKind k) { return static_cast<int>(k); }

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& v) : node_(number_expr(v).node_) {}

Expr Expr::variable(VarId v) {
  auto n = ExprBuilder::node(ExprKind::Variable);
  n->var = v;
  return ExprBuilder::make(std::move(n));
}

Expr Expr::parameter(const std::string& name) {
  if (name == "t" || name == "x" || name == "u") return variable(name == "t" ? VarId::T : name == "x" ? VarId::X : VarId::U);
  auto n = ExprBuilder::node(ExprKind::Parameter);
  n->name = name;
  return ExprBuilder::make(std::move(n));
}

Expr Expr::jet(int a, int b) {
  if (a == 0 && b == 0) return u();
  jet_kernel(a, b);  // range check
  auto n = ExprBuilder::node(ExprKind::Jet);
  n->jt = a;
  n->jx = b;
  return ExprBuilder::make(std::move(n));
}

Expr Expr::function(const std::string& name, std::vector<Expr> args, std::vector<int> orders) {
  if (orders.empty()) orders.assign(args.size(), 0);
  if (orders.size() != args.size()) throw InputError("derivative orders do not match arity of " + name);
  if (name == "A" && args.size() == 1 && orders[0] >= 1) return function("alpha", std::move(args), {orders[0] - 1});
  auto n = ExprBuilder::node(ExprKind::Function);
  n->name = name;
  n->ops = std::move(args);
  n->orders = std::move(orders);
  return ExprBuilder::make(std::move(n));
}

Expr Expr::elementary(ElemFn fn, Expr arg) {
  auto n = ExprBuilder::node(ExprKind::Elementary);
  n->fn = fn;
  n->ops.push_back(std::move(arg));
  return ExprBuilder::make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Rational c = 0;
  for (auto& t : terms) {
    if (t.kind() == ExprKind::Add) {
      for (const Expr& s : t.operands()) {
        if (s.is_number()) c += s.number();
        else flat.push_back(s);
      }
    } else if (t.is_number()) {
      c += t.number();
    } else {
      flat.push_back(std::move(t));
    }
  }
  std::sort(flat.begin(), flat.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  if (sgn(c) != 0) flat.push_back(Expr(c));
  if (flat.empty()) return Expr(0);
  if (flat.size() == 1) return flat[0];
  auto n = ExprBuilder::node(ExprKind::Add);
  n->ops = std::move(flat);
  return ExprBuilder::make(std::move(n));
}

namespace {

const Expr& factor_base(const Expr& e) { return e.kind() == ExprKind::Pow ? e.operands()[0] : e; }

bool factor_less(const Expr& a, const Expr& b) {
  if (int c = compare(factor_base(a), factor_base(b))) return c < 0;
  return compare(a, b) < 0;
}

}  // namespace

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Rational c = 1;
  for (auto& f : factors) {
    if (f.kind() == ExprKind::Mul) {
      for (const Expr& s : f.operands()) {
        if (s.is_number()) c *= s.number();
        else flat.push_back(s);
      }
    } else if (f.is_number()) {
      c *= f.number();
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (sgn(c) == 0) return Expr(0);
  std::sort(flat.begin(), flat.end(), factor_less);
  if (flat.empty()) return Expr(c);
  if (flat.size() == 1 && c == 1) return flat[0];
  if (c != 1) flat.insert(flat.begin(), Expr(c));
  auto n = ExprBuilder::node(ExprKind::Mul);
  n->ops = std::move(flat);
  return ExprBuilder::make(std::move(n));
}

Expr Expr::power(Expr base, Expr exponent) {
  if (!is_linear_exponent(exponent))
    throw InputError("exponent is not rational-linear in the parameters: " + exponent.str());
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return base;
  if (is_integer_number(exponent)) {
    long k = exponent.number().get_num().get_si();
    if (base.is_number()) {
      if (sgn(base.number()) == 0) {
        if (k < 0) throw DomainError("division by zero");
        return Expr(0);
      }
      return Expr(detail::rational_int_power(base.number(), k));
    }
    if (base.kind() == ExprKind::Pow && is_integer_number(base.operands()[1]))
      return power(base.operands()[0], Expr(base.operands()[1].number() * exponent.number()));
    if (base.kind() == ExprKind::Mul) {
      std::vector<Expr> fs;
      for (const Expr& f : base.operands()) fs.push_back(power(f, exponent));
      return product(std::move(fs));
    }
  }
  if (base.is_zero() && exponent.is_number() && sgn(exponent.number()) > 0) return Expr(0);
  auto n = ExprBuilder::node(ExprKind::Pow);
  n->ops = {std::move(base), std::move(exponent)};
  return ExprBuilder::make(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::number() const { return node_->number; }
VarId Expr::variable_id() const { return node_->var; }
const std::string& Expr::name() const { return node_->name; }
int Expr::jet_t() const { return node_->jt; }
int Expr::jet_x() const { return node_->jx; }
ElemFn Expr::elementary_fn() const { return node_->fn; }
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
const std::vector<int>& Expr::orders() const { return node_->orders; }
bool Expr::is_zero() const { return is_number() && sgn(number()) == 0; }
bool Expr::is_one() const { return is_number() && number() == 1; }
std::size_t Expr::hash() const { return node_->hash; }
std::string Expr::str() const { return to_string(*this); }

int compare(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case ExprKind::Number: return cmp(a.number(), b.number()) < 0 ? -1 : (cmp(a.number(), b.number()) > 0 ? 1 : 0);
    case ExprKind::Variable: return cmp_int(static_cast<int>(a.variable_id()), static_cast<int>(b.variable_id()));
    case ExprKind::Parameter: return cmp_int(a.name().compare(b.name()), 0);
    case ExprKind::Jet:
      if (a.jet_t() != b.jet_t()) return cmp_int(a.jet_t(), b.jet_t());
      return cmp_int(a.jet_x(), b.jet_x());
    case ExprKind::Elementary:
      if (a.elementary_fn() != b.elementary_fn())
        return cmp_int(static_cast<int>(a.elementary_fn()), static_cast<int>(b.elementary_fn()));
      break;
    case ExprKind::Function:
      if (int c = a.name().compare(b.name())) return cmp_int(c, 0);
      if (a.operands().size() != b.operands().size())
        return cmp_int(static_cast<long>(a.operands().size()), static_cast<long>(b.operands().size()));
      for (std::size_t i = 0; i < a.orders().size(); ++i)
        if (a.orders()[i] != b.orders()[i]) return cmp_int(a.orders()[i], b.orders()[i]);
      break;
    default: break;
  }
  const auto& x = a.operands();
  const auto& y = b.operands();
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (int c = compare(x[i], y[i])) return c;
  return cmp_int(static_cast<long>(x.size()), static_cast<long>(y.size()));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::product({a, Expr::power(b, Expr(-1))}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr pow(const Expr& a, const Expr& e) { return Expr::power(a, e); }

// ---- printing ----

namespace {

std::string rational_str(const Rational& q) { return q.get_str(); }

bool negative_term(const Expr& e) {
  if (e.is_number()) return sgn(e.number()) < 0;
  if (e.kind() == ExprKind::Mul) return e.operands()[0].is_number() && sgn(e.operands()[0].number()) < 0;
  return false;
}

std::string print(const Expr& e, int prec);

std::string print_function(const Expr& e) {
  std::string call = e.name() + "(";
  for (std::size_t i = 0; i < e.operands().size(); ++i) {
    if (i) call += ", ";
    call += print(e.operands()[i], 0);
  }
  call += ")";
  const auto& ord = e.orders();
  if (std::all_of(ord.begin(), ord.end(), [](int o) { return o == 0; })) return call;
  bool plain = true;
  for (std::size_t i = 0; i < e.operands().size() && plain; ++i) {
    if (e.operands()[i].kind() != ExprKind::Variable) plain = false;
    for (std::size_t j = 0; j < i; ++j)
      if (e.operands()[j] == e.operands()[i]) plain = false;
  }
  std::string s = "diff(" + call;
  for (std::size_t i = 0; i < ord.size(); ++i) {
    if (plain) {
      if (ord[i] == 0) continue;
      s += ", " + print(e.operands()[i], 0) + ", " + std::to_string(ord[i]);
    } else {
      s += ", " + std::to_string(ord[i]);
    }
  }
  return s + ")";
}

std::string print_mul(const Expr& e) {
  Rational c = 1;
  std::vector<Expr> num, den;
  for (const Expr& f : e.operands()) {
    if (f.is_number()) {
      c = f.number();
    } else if (f.kind() == ExprKind::Pow && is_integer_number(f.operands()[1]) && sgn(f.operands()[1].number()) < 0) {
      den.push_back(Expr::power(f.operands()[0], Expr(-f.operands()[1].number())));
    } else {
      num.push_back(f);
    }
  }
  std::string s = sgn(c) < 0 ? "-" : "";
  Rational ac = abs(c);
  std::vector<std::string> parts;
  if (ac != 1 || num.empty()) parts.push_back(rational_str(ac));
  for (const Expr& f : num) parts.push_back(print(f, 3));
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "*" : "") + parts[i];
  if (!den.empty()) {
    if (den.size() == 1) {
      s += "/" + print(den[0], 3);
    } else {
      s += "/(";
      for (std::size_t i = 0; i < den.size(); ++i) s += (i ? "*" : "") + print(den[i], 3);
      s += ")";
    }
  }
  return s;
}

std::string print(const Expr& e, int prec) {
  switch (e.kind()) {
    case ExprKind::Number: {
      std::string s = rational_str(e.number());
      bool compound = sgn(e.number()) < 0 || e.number().get_den() != 1;
      if (compound && prec >= 3) return "(" + s + ")";
      return s;
    }
    case ExprKind::Variable: return var_name(e.variable_id());
    case ExprKind::Parameter: return e.name();
    case ExprKind::Jet: return jet_name(e.jet_t(), e.jet_x());
    case ExprKind::Function: return print_function(e);
    case ExprKind::Elementary: return std::string(elem_name(e.elementary_fn())) + "(" + print(e.operands()[0], 0) + ")";
    case ExprKind::Pow: {
      const Expr& b = e.operands()[0];
      const Expr& x = e.operands()[1];
      std::string bs = print(b, 4);
      if (b.kind() == ExprKind::Pow || b.kind() == ExprKind::Mul || b.kind() == ExprKind::Add) bs = "(" + print(b, 0) + ")";
      std::string xs;
      if ((x.is_number() && x.number().get_den() == 1 && sgn(x.number()) >= 0) || x.kind() == ExprKind::Parameter)
        xs = print(x, 0);
      else
        xs = "(" + print(x, 0) + ")";
      return bs + "^" + xs;
    }
    case ExprKind::Mul: {
      std::string s = print_mul(e);
      if (prec >= 3) return "(" + s + ")";
      return s;
    }
    case ExprKind::Add: {
      std::string s;
      for (std::size_t i = 0; i < e.operands().size(); ++i) {
        const Expr& term = e.operands()[i];
        if (i == 0) s += print(term, 1);
        else if (negative_term(term)) s += " - " + print(-term, 2);
        else s += " + " + print(term, 2);
      }
      if (prec >= 2) return "(" + s + ")";
      return s;
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, 0); }

// ---- numeric evaluation on the tree ----

double eval_numeric(const Expr& e, const NumericEnv& env) {
  auto sym = [&](const std::string& name) {
    auto it = env.symbols.find(name);
    if (it == env.symbols.end()) throw InputError("no numeric value for '" + name + "'");
    return it->second;
  };
  switch (e.kind()) {
    case ExprKind::Number: return e.number().get_d();
    case ExprKind::Variable: return sym(var_name(e.variable_id()));
    case ExprKind::Parameter: return sym(e.name());
    case ExprKind::Jet: return sym(jet_name(e.jet_t(), e.jet_x()));
    case ExprKind::Function: {
      auto it = env.functions.find(e.name());
      if (it == env.functions.end()) throw InputError("no numeric value for function '" + e.name() + "'");
      std::vector<double> args;
      for (const Expr& a : e.operands()) args.push_back(eval_numeric(a, env));
      return it->second(args, e.orders());
    }
    case ExprKind::Elementary: {
      double g = eval_numeric(e.operands()[0], env);
      switch (e.elementary_fn()) {
        case ElemFn::Exp: return std::exp(g);
        case ElemFn::Ln:
          if (!(g > 0)) throw DomainError("ln of a non-positive value");
          return std::log(g);
        case ElemFn::Sin: return std::sin(g);
        case ElemFn::Cos: return std::cos(g);
        case ElemFn::Arctan: return std::atan(g);
      }
      return 0;
    }
    case ExprKind::Pow: {
      double b = eval_numeric(e.operands()[0], env);
      double x = eval_numeric(e.operands()[1], env);
      if (b < 0 && x != std::floor(x)) throw DomainError("fractional power of a negative value");
      if (b == 0 && x < 0) throw DomainError("division by zero");
      return std::pow(b, x);
    }
    case ExprKind::Mul: {
      double p = 1;
      for (const Expr& f : e.operands()) p *= eval_numeric(f, env);
      return p;
    }
    case ExprKind::Add: {
      double s = 0;
      for (const Expr& f : e.operands()) s += eval_numeric(f, env);
      return s;
    }
  }
  return 0;
}

}  // namespace symkawa
