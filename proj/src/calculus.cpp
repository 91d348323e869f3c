#include <cmath>
#include <unordered_map>

#include "algebra_internal.hpp"
#include "symkawa/algebra.hpp"

namespace symkawa {

using namespace detail;

namespace {

class Differ {
 public:
  Differ(const SymbolDerivative& d, std::uint32_t relevant) : d_(d), relevant_(relevant) {}

  Poly run(const Poly& p) {
    std::vector<Term> acc;
    for (const Term& t : p.terms()) {
      const auto& fs = t.mono.factors();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const Factor& f = fs[i];
        Poly dk = kernel(f.kernel);
        Poly de = exponent(f.exponent);
        if (!dk.is_zero()) {
          std::vector<Factor> rest;
          rest.reserve(fs.size());
          for (std::size_t j = 0; j < fs.size(); ++j) {
            if (j != i) {
              rest.push_back(fs[j]);
            } else {
              LinExp e1 = f.exponent - LinExp(1);
              if (!e1.is_zero()) rest.push_back({f.kernel, e1});
            }
          }
          Poly contrib = Poly::from_monomial(Monomial(std::move(rest)), t.coeff) * dk;
          if (!(f.exponent == LinExp(1))) contrib = contrib * f.exponent.to_poly();
          append(acc, contrib);
        }
        if (!de.is_zero()) {
          Poly ln = make_elem(ElemFn::Ln, Poly::from_kernel(f.kernel));
          append(acc, Poly::from_monomial(t.mono, t.coeff) * de * ln);
        }
      }
    }
    return Poly::from_terms(std::move(acc));
  }

 private:
  static void append(std::vector<Term>& acc, const Poly& p) {
    acc.insert(acc.end(), p.terms().begin(), p.terms().end());
  }

  Poly exponent(const LinExp& e) {
    Poly r;
    if (!(relevant_ & kDepParam)) return r;
    for (const auto& [k, c] : e.terms()) {
      Poly dk = d_(*k);
      if (!dk.is_zero()) r += dk.scaled(c);
    }
    return r;
  }

  Poly kernel(const Kernel& k) {
    if ((k->deps & relevant_) == 0) return Poly();
    auto it = cache_.find(k.get());
    if (it != cache_.end()) return it->second;
    Poly r = compute(k);
    cache_.emplace(k.get(), r);
    keep_.push_back(k);
    return r;
  }

  Poly compute(const Kernel& k) {
    const KernelNode& n = *k;
    switch (n.kind) {
      case KernelKind::Number: return Poly();
      case KernelKind::Var:
      case KernelKind::Param:
      case KernelKind::Jet: return d_(n);
      case KernelKind::Func: {
        Poly r;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          Poly da = run(n.args[i]);
          if (da.is_zero()) continue;
          std::vector<int> ord = n.orders;
          ++ord[i];
          r += make_func(n.name, n.args, ord) * da;
        }
        return r;
      }
      case KernelKind::Elem: {
        const Poly& g = n.args[0];
        Poly dg = run(g);
        if (dg.is_zero()) return dg;
        switch (n.fn) {
          case ElemFn::Exp: return Poly::from_kernel(k) * dg;
          case ElemFn::Ln: return dg * reciprocal(g);
          case ElemFn::Sin: return make_elem(ElemFn::Cos, g) * dg;
          case ElemFn::Cos: return -(make_elem(ElemFn::Sin, g) * dg);
          case ElemFn::Arctan: return dg * reciprocal(Poly(1) + g * g);
        }
        return Poly();
      }
      case KernelKind::SumBase: return run(n.args[0]);
      case KernelKind::OpaquePow: {
        const Poly& b = n.args[0];
        Poly r;
        Poly db = run(b);
        if (!db.is_zero()) r += n.exponent.to_poly() * Poly::from_kernel(k) * reciprocal(b) * db;
        Poly de = exponent(n.exponent);
        if (!de.is_zero()) r += Poly::from_kernel(k) * make_elem(ElemFn::Ln, b) * de;
        return r;
      }
    }
    return Poly();
  }

  const SymbolDerivative& d_;
  std::uint32_t relevant_;
  std::unordered_map<const KernelNode*, Poly> cache_;
  std::vector<Kernel> keep_;
};

class Substituter {
 public:
  Substituter(const SubstitutionMap& m, const Assumptions& a) : m_(m), a_(a) {
    for (const auto& [k, v] : m.symbols) {
      if (k->kind == KernelKind::Var) mask_ |= k->deps;
      else if (k->kind == KernelKind::Param) mask_ |= kDepParam;
      else if (k->kind == KernelKind::Jet) mask_ |= kDepJet;
      else throw InputError("only variables, parameters and jet coordinates can be bound");
    }
    if (!m.functions.empty()) mask_ |= kDepFunc;
  }

  Poly run(const Poly& p) {
    std::vector<Term> acc;
    for (const Term& t : p.terms()) {
      std::vector<Factor> keep;
      Poly extra(1);
      bool changed = false;
      for (const Factor& f : t.mono.factors()) {
        auto nk = kernel(f.kernel);
        auto ne = exponent(f.exponent);
        if (!nk && !ne) {
          keep.push_back(f);
          continue;
        }
        Poly base = nk ? *nk : Poly::from_kernel(f.kernel);
        extra = extra * power(base, ne ? *ne : f.exponent, a_);
        changed = true;
      }
      if (!changed) {
        acc.push_back(t);
      } else {
        Poly r = Poly::from_monomial(Monomial(std::move(keep)), t.coeff) * extra;
        acc.insert(acc.end(), r.terms().begin(), r.terms().end());
      }
    }
    return Poly::from_terms(std::move(acc));
  }

 private:
  std::optional<LinExp> exponent(const LinExp& e) {
    if (e.is_constant() || !(mask_ & kDepParam)) return std::nullopt;
    bool changed = false;
    LinExp r(e.constant());
    for (const auto& [k, c] : e.terms()) {
      auto v = kernel(k);
      if (!v) {
        r = r + LinExp::parameter(k, c);
        continue;
      }
      auto le = LinExp::from_poly(canonical(*v));
      if (!le) throw InputError("substitution makes an exponent non-linear in the parameters");
      r = r + le->scaled(c);
      changed = true;
    }
    if (!changed) return std::nullopt;
    return r;
  }

  std::optional<Poly> kernel(const Kernel& k) {
    if ((k->deps & mask_) == 0) return std::nullopt;
    auto it = cache_.find(k.get());
    if (it != cache_.end()) return it->second;
    auto r = compute(k);
    cache_.emplace(k.get(), r);
    keep_.push_back(k);
    return r;
  }

  std::optional<Poly> compute(const Kernel& k) {
    const KernelNode& n = *k;
    switch (n.kind) {
      case KernelKind::Number: return std::nullopt;
      case KernelKind::Var:
      case KernelKind::Param:
      case KernelKind::Jet:
        for (const auto& [s, v] : m_.symbols)
          if (compare_kernels(s, k) == 0) return v;
        return std::nullopt;
      case KernelKind::Func: {
        bool changed = false;
        std::vector<Poly> args;
        for (const Poly& a : n.args) {
          Poly na = run(a);
          if (!na.identical(a)) changed = true;
          args.push_back(std::move(na));
        }
        auto fb = m_.functions.find(n.name);
        // Atoms of the same name but another arity are distinct functions.
        if (fb != m_.functions.end() && fb->second.formals.size() == args.size()) {
          const FunctionBinding& b = fb->second;
          Poly body = b.body;
          for (std::size_t i = 0; i < n.orders.size(); ++i)
            for (int j = 0; j < n.orders[i]; ++j) body = partial(body, b.formals[i]);
          SubstitutionMap inner;
          for (std::size_t i = 0; i < args.size(); ++i) inner.bind(b.formals[i], args[i]);
          return substitute(body, inner, a_);
        }
        if (!changed) return std::nullopt;
        return make_func(n.name, std::move(args), n.orders);
      }
      case KernelKind::Elem: {
        Poly na = run(n.args[0]);
        if (na.identical(n.args[0])) return std::nullopt;
        return make_elem(n.fn, na);
      }
      case KernelKind::SumBase: {
        Poly na = run(n.args[0]);
        if (na.identical(n.args[0])) return std::nullopt;
        return na;
      }
      case KernelKind::OpaquePow: {
        Poly na = run(n.args[0]);
        auto ne = exponent(n.exponent);
        if (na.identical(n.args[0]) && !ne) return std::nullopt;
        return power(na, ne ? *ne : n.exponent, a_);
      }
    }
    return std::nullopt;
  }

  const SubstitutionMap& m_;
  const Assumptions& a_;
  std::uint32_t mask_ = 0;
  std::unordered_map<const KernelNode*, std::optional<Poly>> cache_;
  std::vector<Kernel> keep_;
};

double kernel_value(const KernelNode& n, const NumericEnv& env) {
  auto sym = [&](const std::string& name) {
    auto it = env.symbols.find(name);
    if (it == env.symbols.end()) throw InputError("no numeric value for '" + name + "'");
    return it->second;
  };
  switch (n.kind) {
    case KernelKind::Number: return n.number.get_d();
    case KernelKind::Var: return sym(var_name(n.var));
    case KernelKind::Param: return sym(n.name);
    case KernelKind::Jet: return sym(jet_name(n.jet_t, n.jet_x));
    case KernelKind::Func: {
      auto it = env.functions.find(n.name);
      if (it == env.functions.end()) throw InputError("no numeric value for function '" + n.name + "'");
      std::vector<double> args;
      for (const Poly& a : n.args) args.push_back(evaluate(a, env));
      return it->second(args, n.orders);
    }
    case KernelKind::Elem: {
      double g = evaluate(n.args[0], env);
      switch (n.fn) {
        case ElemFn::Exp: return std::exp(g);
        case ElemFn::Ln: return std::log(g);
        case ElemFn::Sin: return std::sin(g);
        case ElemFn::Cos: return std::cos(g);
        case ElemFn::Arctan: return std::atan(g);
      }
      return 0;
    }
    case KernelKind::SumBase: return evaluate(n.args[0], env);
    case KernelKind::OpaquePow: return std::pow(evaluate(n.args[0], env), evaluate_linexp(n.exponent, env));
  }
  return 0;
}

}  // namespace

Poly differentiate(const Poly& p, const SymbolDerivative& d, std::uint32_t relevant) {
  Differ differ(d, relevant);
  return differ.run(p);
}

Poly partial(const Poly& p, const Kernel& symbol) {
  std::uint32_t mask = symbol->deps;
  if ((poly_deps(p) & mask) == 0) return Poly();
  return differentiate(
      p, [&](const KernelNode& n) { return compare_kernels(symbol, Kernel(Kernel(), &n)) == 0 ? Poly(1) : Poly(); },
      mask);
}

Poly substitute(const Poly& p, const SubstitutionMap& m, const Assumptions& assume) {
  if (m.symbols.empty() && m.functions.empty()) return p;
  Substituter s(m, assume);
  return s.run(p);
}

bool contains_kernel_kind(const Poly& p, KernelKind kind) {
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors()) {
      if (f.kernel->kind == kind) return true;
      for (const Poly& a : f.kernel->args)
        if (contains_kernel_kind(a, kind)) return true;
    }
  return false;
}

bool depends_on(const Poly& p, std::uint32_t mask) { return (poly_deps(p) & mask) != 0; }

bool kernel_depends_on(const Kernel& k, const Kernel& symbol) {
  if ((k->deps & symbol->deps) == 0) return false;
  if (compare_kernels(k, symbol) == 0) return true;
  for (const Poly& a : k->args)
    if (poly_depends_on(a, symbol)) return true;
  if (k->kind == KernelKind::OpaquePow)
    for (const auto& [p, c] : k->exponent.terms())
      if (compare_kernels(p, symbol) == 0) return true;
  return false;
}

bool poly_depends_on(const Poly& p, const Kernel& symbol) {
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors()) {
      if (kernel_depends_on(f.kernel, symbol)) return true;
      for (const auto& [q, c] : f.exponent.terms())
        if (compare_kernels(q, symbol) == 0) return true;
    }
  return false;
}

void collect_kernels(const Poly& p, std::vector<Kernel>& out, bool recursive) {
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors()) {
      out.push_back(f.kernel);
      for (const auto& [q, c] : f.exponent.terms()) out.push_back(q);
      if (recursive)
        for (const Poly& a : f.kernel->args) collect_kernels(a, out, true);
    }
}

bool is_function_of(const Poly& p, std::uint32_t allowed) {
  return (poly_deps(p) & ~allowed & (kDepT | kDepX | kDepU | kDepJet)) == 0;
}

double evaluate_linexp(const LinExp& e, const NumericEnv& env) {
  double v = e.constant().get_d();
  for (const auto& [k, c] : e.terms()) v += c.get_d() * kernel_value(*k, env);
  return v;
}

double evaluate_term(const Term& t, const NumericEnv& env) {
  double v = t.coeff.get_d();
  for (const Factor& f : t.mono.factors()) {
    double k = kernel_value(*f.kernel, env);
    if (auto n = f.exponent.to_int()) v *= std::pow(k, static_cast<double>(*n));
    else v *= std::pow(k, evaluate_linexp(f.exponent, env));
  }
  return v;
}

double evaluate(const Poly& p, const NumericEnv& env) {
  double s = 0;
  for (const Term& t : p.terms()) s += evaluate_term(t, env);
  return s;
}

}  // namespace symkawa
