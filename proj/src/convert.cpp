#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "algebra_internal.hpp"
#include "symkawa/expr.hpp"

namespace symkawa {

Poly to_poly(const Expr& e, const Assumptions& assume) {
  switch (e.kind()) {
    case ExprKind::Number: return Poly(e.number());
    case ExprKind::Variable: return var_poly(e.variable_id());
    case ExprKind::Parameter: return param_poly(e.name());
    case ExprKind::Jet: return jet_poly(e.jet_t(), e.jet_x());
    case ExprKind::Function: {
      std::vector<Poly> args;
      for (const Expr& a : e.operands()) args.push_back(to_poly(a, assume));
      return make_func(e.name(), std::move(args), e.orders());
    }
    case ExprKind::Elementary: return make_elem(e.elementary_fn(), to_poly(e.operands()[0], assume));
    case ExprKind::Pow: return power(to_poly(e.operands()[0], assume), to_linexp(e.operands()[1]), assume);
    case ExprKind::Mul: {
      Poly p(1);
      for (const Expr& f : e.operands()) p = p * to_poly(f, assume);
      return p;
    }
    case ExprKind::Add: {
      Poly p;
      for (const Expr& f : e.operands()) p += to_poly(f, assume);
      return p;
    }
  }
  return Poly();
}

LinExp to_linexp(const Expr& e) {
  auto le = LinExp::from_poly(canonical(to_poly(e)));
  if (!le) throw InputError("exponent is not rational-linear in the parameters: " + e.str());
  return *le;
}

Expr linexp_expr(const LinExp& e) {
  std::vector<Expr> terms;
  for (const auto& [k, c] : e.terms()) terms.push_back(Expr(c) * Expr::parameter(k->name));
  terms.push_back(Expr(e.constant()));
  return Expr::sum(std::move(terms));
}

namespace {

Expr kernel_expr(const Kernel& k) {
  const KernelNode& n = *k;
  switch (n.kind) {
    case KernelKind::Number: return Expr(Rational(n.number));
    case KernelKind::Var: return Expr::variable(n.var);
    case KernelKind::Param: return Expr::parameter(n.name);
    case KernelKind::Jet: return Expr::jet(n.jet_t, n.jet_x);
    case KernelKind::Func: {
      std::vector<Expr> args;
      for (const Poly& a : n.args) args.push_back(to_expr(a));
      return Expr::function(n.name, std::move(args), n.orders);
    }
    case KernelKind::Elem: return Expr::elementary(n.fn, to_expr(n.args[0]));
    case KernelKind::SumBase: return to_expr(n.args[0]);
    case KernelKind::OpaquePow: return Expr::power(to_expr(n.args[0]), linexp_expr(n.exponent));
  }
  return Expr();
}

Expr term_expr(const Term& t) {
  std::vector<Expr> fs{Expr(t.coeff)};
  for (const Factor& f : t.mono.factors()) fs.push_back(Expr::power(kernel_expr(f.kernel), linexp_expr(f.exponent)));
  return Expr::product(std::move(fs));
}

}  // namespace

Expr to_expr(const Poly& p) {
  Fraction fr = as_fraction(p);
  std::vector<Expr> terms;
  for (const Term& t : fr.numerator.terms()) terms.push_back(term_expr(t));
  Expr num = Expr::sum(std::move(terms));
  if (fr.denominator.empty()) return num;
  std::vector<Expr> fs{num};
  for (const auto& [k, m] : fr.denominator) fs.push_back(Expr::power(kernel_expr(k), Expr(-m)));
  return Expr::product(std::move(fs));
}

Expr normalize(const Expr& e, const Assumptions& assume) { return to_expr(canonical(to_poly(e, assume))); }

Kernel symbol_kernel(const Expr& s) {
  switch (s.kind()) {
    case ExprKind::Variable: return var_kernel(s.variable_id());
    case ExprKind::Parameter: return param_kernel(s.name());
    case ExprKind::Jet: return jet_kernel(s.jet_t(), s.jet_x());
    default: throw InputError("expected a variable, parameter or jet coordinate, got " + s.str());
  }
}

Expr differentiate(const Expr& e, const Expr& var, int order, const Assumptions& assume) {
  Kernel k = symbol_kernel(var);
  Poly p = to_poly(e, assume);
  for (int i = 0; i < order; ++i) p = canonical(partial(p, k));
  return to_expr(canonical(p));
}

SubstitutionMap make_substitution(const std::vector<Binding>& bindings, const Assumptions& assume) {
  SubstitutionMap m;
  for (const Binding& b : bindings) {
    if (b.pattern.kind() == ExprKind::Function) {
      FunctionBinding fb;
      for (int o : b.pattern.orders())
        if (o != 0) throw InputError("cannot bind a derivative of " + b.pattern.name());
      for (const Expr& a : b.pattern.operands()) fb.formals.push_back(symbol_kernel(a));
      fb.body = to_poly(b.value, assume);
      if (m.functions.count(b.pattern.name())) throw InputError("duplicate binding for " + b.pattern.name());
      m.functions.emplace(b.pattern.name(), std::move(fb));
    } else {
      m.bind(symbol_kernel(b.pattern), to_poly(b.value, assume));
    }
  }
  return m;
}

namespace {

void collect_symbol_names(const Poly& p, std::set<std::string>& out) {
  std::vector<Kernel> ks;
  collect_kernels(p, ks, true);
  for (const Kernel& k : ks) {
    if (k->kind == KernelKind::Var) out.insert(var_name(k->var));
    else if (k->kind == KernelKind::Param || k->kind == KernelKind::Func) out.insert(k->name);
    else if (k->kind == KernelKind::Jet) out.insert(jet_name(k->jet_t, k->jet_x));
  }
}

std::string pattern_name(const Expr& p) {
  if (p.kind() == ExprKind::Function || p.kind() == ExprKind::Parameter) return p.name();
  if (p.kind() == ExprKind::Variable) return var_name(p.variable_id());
  if (p.kind() == ExprKind::Jet) return jet_name(p.jet_t(), p.jet_x());
  throw InputError("cannot bind " + p.str());
}

}  // namespace

Expr substitute(const Expr& e, const std::vector<Binding>& bindings, const Assumptions& assume) {
  std::map<std::string, std::set<std::string>> edges;
  for (const Binding& b : bindings) {
    std::set<std::string> refs;
    collect_symbol_names(to_poly(b.value, assume), refs);
    std::string name = pattern_name(b.pattern);
    refs.erase(name);
    edges[name] = refs;
  }
  // Cycles among distinct bound symbols are rejected.
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& s) {
    state[s] = 1;
    for (const auto& r : edges[s]) {
      if (!edges.count(r)) continue;
      if (state[r] == 1) throw InputError("cyclic binding involving '" + s + "' and '" + r + "'");
      if (state[r] == 0) visit(r);
    }
    state[s] = 2;
  };
  for (const auto& [s, r] : edges)
    if (state[s] == 0) visit(s);

  Poly p = to_poly(e, assume);
  std::vector<Kernel> ks;
  collect_kernels(p, ks, true);
  for (const Binding& b : bindings) {
    if (b.pattern.kind() != ExprKind::Jet) continue;
    int a = b.pattern.jet_t(), c = b.pattern.jet_x();
    for (const Kernel& k : ks) {
      if (k->kind != KernelKind::Jet || (k->jet_t == a && k->jet_x == c)) continue;
      if (k->jet_t >= a && k->jet_x >= c) {
        bool bound = std::any_of(bindings.begin(), bindings.end(), [&](const Binding& o) {
          return o.pattern.kind() == ExprKind::Jet && o.pattern.jet_t() == k->jet_t && o.pattern.jet_x() == k->jet_x;
        });
        if (!bound)
          throw InputError("jet coordinate " + jet_name(a, c) + " is also used at higher order (" +
                           jet_name(k->jet_t, k->jet_x) + ")");
      }
    }
  }
  return to_expr(canonical(substitute(p, make_substitution(bindings, assume), assume)));
}

// ---- zero testing ----

const char* verdict_name(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::Zero: return "ZERO";
    case ZeroVerdict::ProbablyZero: return "PROBABLY_ZERO";
    case ZeroVerdict::Nonzero: return "NONZERO";
  }
  return "?";
}

namespace {

double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0); }

struct ExpSum {
  std::vector<double> a;
  std::vector<std::vector<double>> b;
};

ExpSum exp_sum(const std::string& name, std::uint64_t seed) {
  std::mt19937_64 g(detail::fnv(name) ^ (seed * 0x9E3779B97F4A7C15ULL + 0x1234567));
  ExpSum s;
  for (int j = 0; j < 3; ++j) {
    s.a.push_back(0.5 + unit(g));
    std::vector<double> bj;
    for (int i = 0; i < 6; ++i) {
      double v = 0.2 + 0.6 * unit(g);
      bj.push_back(unit(g) < 0.5 ? -v : v);
    }
    s.b.push_back(bj);
  }
  return s;
}

}  // namespace

FunctionValue random_function(const std::string& name, std::uint64_t seed) {
  bool antiderivative = name == "A";
  ExpSum s = exp_sum(antiderivative ? "alpha" : name, seed);
  return [s, antiderivative](const std::vector<double>& args, const std::vector<int>& orders) {
    double v = 0;
    for (std::size_t j = 0; j < s.a.size(); ++j) {
      double term = s.a[j];
      double ex = 0;
      for (std::size_t i = 0; i < args.size() && i < s.b[j].size(); ++i) {
        ex += s.b[j][i] * args[i];
        int o = i < orders.size() ? orders[i] : 0;
        if (antiderivative && i == 0) o -= 1;
        term *= std::pow(s.b[j][i], o);
      }
      v += term * std::exp(ex);
    }
    return v;
  };
}

NumericEnv random_env(const std::vector<Kernel>& kernels, std::uint64_t seed, const Assumptions&) {
  NumericEnv env;
  std::mt19937_64 g(seed * 0xD1B54A32D192ED03ULL + 77);
  std::set<std::string> names, funcs;
  for (const Kernel& k : kernels) {
    if (k->kind == KernelKind::Var) names.insert(var_name(k->var));
    else if (k->kind == KernelKind::Param) names.insert(k->name);
    else if (k->kind == KernelKind::Jet) names.insert(jet_name(k->jet_t, k->jet_x));
    else if (k->kind == KernelKind::Func) funcs.insert(k->name);
  }
  for (const auto& n : names) {
    double r = unit(g);
    env.symbols[n] = n.rfind("u_", 0) == 0 ? 2 * r - 1 : 0.5 + r;
  }
  for (const auto& f : funcs) env.functions[f] = random_function(f, seed);
  return env;
}

ZeroVerdict is_zero(const Poly& p, const Assumptions& assume, std::uint64_t seed) {
  Poly c = canonical(p);
  if (c.is_zero()) return ZeroVerdict::Zero;
  Poly n = as_fraction(c).numerator;
  std::vector<Kernel> ks;
  collect_kernels(n, ks, true);
  bool any = false;
  for (std::uint64_t i = 0; i < 8; ++i) {
    NumericEnv env = random_env(ks, seed * 1000003 + i, assume);
    double s = 0, scale = 0;
    for (const Term& t : n.terms()) {
      double v = evaluate_term(t, env);
      s += v;
      scale += std::fabs(v);
    }
    if (!std::isfinite(s) || !std::isfinite(scale)) continue;
    any = true;
    if (std::fabs(s) > 1e-9 * scale) return ZeroVerdict::Nonzero;
  }
  return any ? ZeroVerdict::ProbablyZero : ZeroVerdict::Nonzero;
}

ZeroVerdict is_zero(const Expr& e, const Assumptions& assume, std::uint64_t seed) {
  return is_zero(to_poly(e, assume), assume, seed);
}

}  // namespace symkawa
