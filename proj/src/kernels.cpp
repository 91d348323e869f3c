#include <algorithm>
#include <array>
#include <cassert>

#include "symkawa/algebra.hpp"
#include "algebra_internal.hpp"

namespace symkawa {

namespace detail {

std::size_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::size_t hash_mpz(const mpz_class& z) {
  std::size_t h = mpz_get_ui(z.get_mpz_t());
  return mix(h, static_cast<std::size_t>(mpz_size(z.get_mpz_t()) * 2 + (sgn(z) < 0)));
}

int sign_of(long v) { return v < 0 ? -1 : (v > 0 ? 1 : 0); }

std::shared_ptr<KernelNode> new_node(KernelKind k) {
  auto n = std::make_shared<KernelNode>();
  n->kind = k;
  return n;
}

std::uint32_t poly_deps(const Poly& p) {
  std::uint32_t d = 0;
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors()) {
      d |= f.kernel->deps;
      if (!f.exponent.is_constant()) d |= kDepParam;
    }
  return d;
}

Kernel finish(std::shared_ptr<KernelNode> n) {
  std::size_t h = static_cast<std::size_t>(n->kind) * 0x51ed27;
  std::uint32_t deps = 0;
  switch (n->kind) {
    case KernelKind::Number:
      h = mix(h, hash_mpz(n->number));
      break;
    case KernelKind::Var:
      h = mix(h, static_cast<std::size_t>(n->var) + 11);
      deps = n->var == VarId::T ? kDepT : (n->var == VarId::X ? kDepX : kDepU);
      break;
    case KernelKind::Param:
      h = mix(h, fnv(n->name));
      deps = kDepParam;
      break;
    case KernelKind::Jet:
      h = mix(h, static_cast<std::size_t>(n->jet_t * 64 + n->jet_x + 7));
      deps = kDepJet;
      break;
    case KernelKind::Func:
      h = mix(h, fnv(n->name));
      for (int o : n->orders) h = mix(h, static_cast<std::size_t>(o + 3));
      for (const Poly& a : n->args) {
        h = mix(h, a.hash());
        deps |= poly_deps(a);
      }
      deps |= kDepFunc;
      break;
    case KernelKind::Elem:
    case KernelKind::SumBase:
      h = mix(h, static_cast<std::size_t>(n->fn) + 5);
      h = mix(h, n->args[0].hash());
      deps = poly_deps(n->args[0]);
      break;
    case KernelKind::OpaquePow:
      h = mix(h, n->args[0].hash());
      h = mix(h, n->exponent.hash());
      deps = poly_deps(n->args[0]) | (n->exponent.is_constant() ? 0u : kDepParam);
      break;
  }
  n->hash = h;
  n->deps = deps;
  return n;
}

Kernel number_kernel(const mpz_class& r) {
  auto n = new_node(KernelKind::Number);
  n->number = r;
  return finish(std::move(n));
}

Kernel sum_base_kernel(const Poly& primitive) {
  auto n = new_node(KernelKind::SumBase);
  n->args.push_back(primitive);
  return finish(std::move(n));
}

Kernel opaque_pow_kernel(const Poly& base, const LinExp& e) {
  auto n = new_node(KernelKind::OpaquePow);
  n->args.push_back(base);
  n->exponent = e;
  return finish(std::move(n));
}

Kernel elem_kernel(ElemFn fn, const Poly& arg) {
  auto n = new_node(KernelKind::Elem);
  n->fn = fn;
  n->args.push_back(arg);
  return finish(std::move(n));
}

// r^k for integer k as a rational.
Rational int_power(const mpz_class& r, long k) {
  mpz_class p;
  mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k));
  if (k >= 0) return Rational(p);
  Rational q(1, 1);
  q /= Rational(p);
  return q;
}

Rational rational_int_power(const Rational& q, long k) {
  if (k == 0) return Rational(1);
  Rational num = int_power(q.get_num(), k < 0 ? -k : k);
  Rational den = int_power(q.get_den(), k < 0 ? -k : k);
  Rational res = num / den;
  if (k < 0) res = 1 / res;
  return res;
}

long floor_of(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

// Base r > 1 reduced to r = s^j with j maximal.
std::pair<mpz_class, long> perfect_power(const mpz_class& r) {
  if (r <= 3) return {r, 1};
  std::size_t bits = mpz_sizeinbase(r.get_mpz_t(), 2);
  for (long j = static_cast<long>(bits); j >= 2; --j) {
    mpz_class s;
    if (mpz_root(s.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(j)) != 0) return {s, j};
  }
  return {r, 1};
}

void push_number_factor(const mpz_class& r, const LinExp& e, Rational& coeff,
                        std::vector<Factor>& out) {
  if (r == 1 || e.is_zero()) return;
  long fl = floor_of(e.constant());
  coeff *= int_power(r, fl);
  LinExp rest = e - LinExp(Rational(fl));
  if (!rest.is_zero()) out.push_back({number_kernel(r), rest});
}

// Sorts, merges and folds a raw factor list.
void normalize_factors(std::vector<Factor>& fs, Rational& coeff) {
  std::sort(fs.begin(), fs.end(),
            [](const Factor& a, const Factor& b) { return compare_kernels(a.kernel, b.kernel) < 0; });
  std::vector<Factor> merged;
  merged.reserve(fs.size());
  for (auto& f : fs) {
    if (!merged.empty() && compare_kernels(merged.back().kernel, f.kernel) == 0)
      merged.back().exponent = merged.back().exponent + f.exponent;
    else
      merged.push_back(std::move(f));
  }
  std::vector<Factor> out;
  out.reserve(merged.size());
  std::optional<Poly> exp_arg;
  bool need_sort = false;
  for (auto& f : merged) {
    if (f.exponent.is_zero()) continue;
    const KernelNode& k = *f.kernel;
    if (k.kind == KernelKind::Number) {
      push_number_factor(k.number, f.exponent, coeff, out);
      need_sort = true;
      continue;
    }
    if (k.kind == KernelKind::Elem && k.fn == ElemFn::Exp) {
      Poly scaled = k.args[0] * f.exponent.to_poly();
      exp_arg = exp_arg ? *exp_arg + scaled : scaled;
      continue;
    }
    out.push_back(std::move(f));
  }
  if (exp_arg) {
    Poly g = canonical(*exp_arg);
    if (!g.is_zero()) {
      out.push_back({elem_kernel(ElemFn::Exp, g), LinExp(1)});
      need_sort = true;
    }
  }
  if (need_sort)
    std::sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) {
      return compare_kernels(a.kernel, b.kernel) < 0;
    });
  fs = std::move(out);
}

Poly monomial_inverse(const Term& t) {
  if (sgn(t.coeff) == 0) throw DomainError("division by zero");
  std::vector<Factor> fs;
  fs.reserve(t.mono.factors().size());
  for (const Factor& f : t.mono.factors()) fs.push_back({f.kernel, -f.exponent});
  Rational c = 1 / t.coeff;
  normalize_factors(fs, c);
  return Poly::from_monomial(Monomial(std::move(fs)), c);
}

Poly monomial_power(const Term& t, const LinExp& e) {
  std::vector<Factor> fs;
  for (const Factor& f : t.mono.factors()) {
    auto p = LinExp::multiply(f.exponent, e);
    if (!p) throw InputError("exponent is not rational-linear in the parameters");
    fs.push_back({f.kernel, *p});
  }
  Rational c = 1;
  normalize_factors(fs, c);
  Poly res = Poly::from_monomial(Monomial(std::move(fs)), c);
  if (auto k = e.to_int()) return res.scaled(rational_int_power(t.coeff, *k));
  return res * rational_power(t.coeff, e);
}

Poly rational_power(const Rational& q, const LinExp& e) {
  if (sgn(q) <= 0) throw DomainError("fractional power of a non-positive number");
  if (auto k = e.to_int()) return Poly(rational_int_power(q, *k));
  std::vector<Factor> fs;
  Rational c = 1;
  for (int side = 0; side < 2; ++side) {
    mpz_class r = side == 0 ? q.get_num() : q.get_den();
    if (r == 1) continue;
    auto [s, j] = perfect_power(r);
    LinExp ej = e.scaled(Rational(side == 0 ? j : -j));
    push_number_factor(s, ej, c, fs);
  }
  normalize_factors(fs, c);
  return Poly::from_monomial(Monomial(std::move(fs)), c);
}

}  // namespace detail

using namespace detail;

const char* var_name(VarId v) {
  switch (v) {
    case VarId::T: return "t";
    case VarId::X: return "x";
    case VarId::U: return "u";
  }
  return "?";
}

const char* elem_name(ElemFn f) {
  switch (f) {
    case ElemFn::Exp: return "exp";
    case ElemFn::Ln: return "ln";
    case ElemFn::Sin: return "sin";
    case ElemFn::Cos: return "cos";
    case ElemFn::Arctan: return "arctan";
  }
  return "?";
}

std::string jet_name(int a, int b) {
  std::string s = "u_";
  if (a == 1) s += "t";
  if (b == 1) s += "x";
  if (b > 1) s += std::to_string(b) + "x";
  return s;
}

std::size_t hash_rational(const Rational& q) {
  return mix(hash_mpz(q.get_num()), hash_mpz(q.get_den()));
}

namespace {

int deep_compare(const KernelNode& a, const KernelNode& b) {
  switch (a.kind) {
    case KernelKind::Number: return sign_of(cmp(a.number, b.number));
    case KernelKind::Var: return sign_of(static_cast<int>(a.var) - static_cast<int>(b.var));
    case KernelKind::Param: return sign_of(a.name.compare(b.name));
    case KernelKind::Jet:
      if (a.jet_t != b.jet_t) return sign_of(a.jet_t - b.jet_t);
      return sign_of(a.jet_x - b.jet_x);
    case KernelKind::Func: {
      if (int c = a.name.compare(b.name)) return sign_of(c);
      if (a.args.size() != b.args.size()) return sign_of(static_cast<long>(a.args.size()) - static_cast<long>(b.args.size()));
      for (std::size_t i = 0; i < a.orders.size(); ++i)
        if (a.orders[i] != b.orders[i]) return sign_of(a.orders[i] - b.orders[i]);
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (int c = a.args[i].compare(b.args[i])) return c;
      return 0;
    }
    case KernelKind::Elem:
    case KernelKind::SumBase:
      if (a.fn != b.fn) return sign_of(static_cast<int>(a.fn) - static_cast<int>(b.fn));
      return a.args[0].compare(b.args[0]);
    case KernelKind::OpaquePow:
      if (int c = a.args[0].compare(b.args[0])) return c;
      return a.exponent.compare(b.exponent);
  }
  return 0;
}

}  // namespace

int compare_kernels(const Kernel& a, const Kernel& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->hash != b->hash) return a->hash < b->hash ? -1 : 1;
  return deep_compare(*a, *b);
}

Kernel var_kernel(VarId v) {
  static const std::array<Kernel, 3> ks = [] {
    std::array<Kernel, 3> r;
    for (int i = 0; i < 3; ++i) {
      auto n = new_node(KernelKind::Var);
      n->var = static_cast<VarId>(i);
      r[i] = finish(std::move(n));
    }
    return r;
  }();
  return ks[static_cast<int>(v)];
}

Kernel param_kernel(const std::string& name) {
  auto n = new_node(KernelKind::Param);
  n->name = name;
  return finish(std::move(n));
}

Kernel jet_kernel(int t_order, int x_order) {
  if (t_order < 0 || t_order > 1 || x_order < 0 || x_order > 10 || t_order + x_order == 0)
    throw InputError("jet coordinate out of range: " + std::to_string(t_order) + "," +
                     std::to_string(x_order));
  auto n = new_node(KernelKind::Jet);
  n->jet_t = t_order;
  n->jet_x = x_order;
  return finish(std::move(n));
}

Poly var_poly(VarId v) { return Poly::from_kernel(var_kernel(v)); }
Poly param_poly(const std::string& name) { return Poly::from_kernel(param_kernel(name)); }
Poly jet_poly(int a, int b) {
  if (a == 0 && b == 0) return var_poly(VarId::U);
  return Poly::from_kernel(jet_kernel(a, b));
}

Poly make_func(const std::string& name, std::vector<Poly> args, std::vector<int> orders) {
  if (orders.empty()) orders.assign(args.size(), 0);
  if (orders.size() != args.size()) throw InputError("derivative orders do not match arity of " + name);
  // A is the antiderivative of alpha.
  if (name == "A" && args.size() == 1 && orders[0] >= 1)
    return make_func("alpha", std::move(args), {orders[0] - 1});
  auto n = new_node(KernelKind::Func);
  n->name = name;
  for (auto& a : args) a = canonical(a);
  n->args = std::move(args);
  n->orders = std::move(orders);
  return Poly::from_kernel(finish(std::move(n)));
}

Poly make_elem(ElemFn fn, const Poly& arg_in) {
  Poly arg = canonical(arg_in);
  switch (fn) {
    case ElemFn::Exp: {
      if (arg.is_zero()) return Poly(1);
      // exp(c ln g + rest) = g^c exp(rest)
      Poly out(1), rest;
      bool split = false;
      for (const Term& t : arg.terms()) {
        const auto& fs = t.mono.factors();
        if (fs.size() == 1 && fs[0].kernel->kind == KernelKind::Elem && fs[0].kernel->fn == ElemFn::Ln &&
            fs[0].exponent == LinExp(1)) {
          out = out * power(fs[0].kernel->args[0], LinExp(t.coeff), Assumptions());
          split = true;
        } else {
          rest += Poly::from_terms({t});
        }
      }
      if (split) return canonical(out * make_elem(ElemFn::Exp, rest));
      break;
    }
    case ElemFn::Ln: {
      if (arg.is_zero()) throw DomainError("ln(0)");
      if (auto c = arg.as_constant(); c && *c == 1) return Poly();
      if (arg.size() == 1 && arg.terms()[0].coeff == 1 && arg.terms()[0].mono.factors().size() == 1) {
        const Factor& f = arg.terms()[0].mono.factors()[0];
        if (f.kernel->kind == KernelKind::Elem && f.kernel->fn == ElemFn::Exp && f.exponent == LinExp(1))
          return f.kernel->args[0];
      }
      break;
    }
    case ElemFn::Sin:
    case ElemFn::Arctan:
      if (arg.is_zero()) return Poly();
      break;
    case ElemFn::Cos:
      if (arg.is_zero()) return Poly(1);
      break;
  }
  return Poly::from_kernel(elem_kernel(fn, arg));
}

// ---- LinExp ----

LinExp LinExp::parameter(const Kernel& p, const Rational& coeff) {
  LinExp e;
  if (sgn(coeff) != 0) e.terms_.emplace_back(p, coeff);
  return e;
}

std::optional<LinExp> LinExp::from_poly(const Poly& p) {
  LinExp e;
  for (const Term& t : p.terms()) {
    const auto& fs = t.mono.factors();
    if (fs.empty()) {
      e.constant_ += t.coeff;
    } else if (fs.size() == 1 && fs[0].kernel->kind == KernelKind::Param && fs[0].exponent == LinExp(1)) {
      e = e + LinExp::parameter(fs[0].kernel, t.coeff);
    } else {
      return std::nullopt;
    }
  }
  return e;
}

std::optional<long> LinExp::to_int() const {
  if (!is_integer()) return std::nullopt;
  if (!constant_.get_num().fits_slong_p()) return std::nullopt;
  return constant_.get_num().get_si();
}

Rational LinExp::coefficient_of(const Kernel& p) const {
  for (const auto& [k, c] : terms_)
    if (compare_kernels(k, p) == 0) return c;
  return 0;
}

LinExp LinExp::operator+(const LinExp& o) const {
  LinExp r;
  r.constant_ = constant_ + o.constant_;
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    int c = i == terms_.size() ? 1 : (j == o.terms_.size() ? -1 : compare_kernels(terms_[i].first, o.terms_[j].first));
    if (c < 0) {
      r.terms_.push_back(terms_[i++]);
    } else if (c > 0) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      Rational s = terms_[i].second + o.terms_[j].second;
      if (sgn(s) != 0) r.terms_.emplace_back(terms_[i].first, s);
      ++i;
      ++j;
    }
  }
  return r;
}

LinExp LinExp::operator-() const { return scaled(-1); }
LinExp LinExp::operator-(const LinExp& o) const { return *this + (-o); }

LinExp LinExp::scaled(const Rational& c) const {
  LinExp r;
  if (sgn(c) == 0) return r;
  r.constant_ = constant_ * c;
  for (const auto& [k, v] : terms_) r.terms_.emplace_back(k, v * c);
  return r;
}

std::optional<LinExp> LinExp::multiply(const LinExp& a, const LinExp& b) {
  if (a.is_constant()) return b.scaled(a.constant_);
  if (b.is_constant()) return a.scaled(b.constant_);
  return std::nullopt;
}

LinExp LinExp::class_key() const {
  LinExp r = *this;
  r.constant_ -= floor_of(constant_);
  return r;
}

Poly LinExp::to_poly() const {
  std::vector<Term> ts;
  if (sgn(constant_) != 0) ts.push_back({Monomial(), constant_});
  for (const auto& [k, c] : terms_) ts.push_back({Monomial::of(k, LinExp(1)), c});
  return Poly::from_terms(std::move(ts));
}

int LinExp::compare(const LinExp& o) const {
  if (int c = cmp(constant_, o.constant_)) return sign_of(c);
  if (terms_.size() != o.terms_.size()) return terms_.size() < o.terms_.size() ? -1 : 1;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (int c = compare_kernels(terms_[i].first, o.terms_[i].first)) return c;
    if (int c = cmp(terms_[i].second, o.terms_[i].second)) return sign_of(c);
  }
  return 0;
}

std::size_t LinExp::hash() const {
  std::size_t h = hash_rational(constant_);
  for (const auto& [k, c] : terms_) h = mix(mix(h, k->hash), hash_rational(c));
  return h;
}

// ---- Monomial ----

Monomial::Monomial(std::vector<Factor> sorted_factors) : factors_(std::move(sorted_factors)) {
  std::size_t h = 0x9e3779b9;
  for (const Factor& f : factors_) h = mix(mix(h, f.kernel->hash), f.exponent.hash());
  hash_ = h;
}

Monomial Monomial::of(const Kernel& k, const LinExp& e) {
  if (e.is_zero()) return Monomial();
  return Monomial({Factor{k, e}});
}

int Monomial::compare(const Monomial& o) const {
  if (hash_ != o.hash_) return hash_ < o.hash_ ? -1 : 1;
  if (factors_.size() != o.factors_.size()) return factors_.size() < o.factors_.size() ? -1 : 1;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (int c = compare_kernels(factors_[i].kernel, o.factors_[i].kernel)) return c;
    if (int c = factors_[i].exponent.compare(o.factors_[i].exponent)) return c;
  }
  return 0;
}

const LinExp* Monomial::exponent_of(const Kernel& k) const {
  for (const Factor& f : factors_)
    if (compare_kernels(f.kernel, k) == 0) return &f.exponent;
  return nullptr;
}

std::pair<Rational, Monomial> multiply(const Monomial& a, const Monomial& b) {
  if (a.empty()) return {Rational(1), b};
  if (b.empty()) return {Rational(1), a};
  bool simple = true;
  std::vector<Factor> fs;
  fs.reserve(a.factors().size() + b.factors().size());
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0, j = 0;
  int exp_count = 0;
  while (i < fa.size() || j < fb.size()) {
    int c = i == fa.size() ? 1 : (j == fb.size() ? -1 : compare_kernels(fa[i].kernel, fb[j].kernel));
    const Factor* pick;
    if (c < 0) {
      pick = &fa[i++];
      fs.push_back(*pick);
    } else if (c > 0) {
      pick = &fb[j++];
      fs.push_back(*pick);
    } else {
      pick = &fa[i];
      LinExp e = fa[i].exponent + fb[j].exponent;
      ++i;
      ++j;
      if (pick->kernel->kind == KernelKind::Number || pick->kernel->kind == KernelKind::Elem) simple = false;
      if (e.is_zero()) continue;
      fs.push_back({pick->kernel, e});
    }
    if (pick->kernel->kind == KernelKind::Elem && pick->kernel->fn == ElemFn::Exp && ++exp_count > 1) simple = false;
  }
  Rational coeff = 1;
  if (!simple) normalize_factors(fs, coeff);
  return {coeff, Monomial(std::move(fs))};
}

// ---- Poly ----

Poly::Poly(Rational c) {
  if (sgn(c) != 0) terms_.push_back({Monomial(), std::move(c)});
}
Poly::Poly(long c) : Poly(Rational(c)) {}

Poly Poly::from_kernel(const Kernel& k, const LinExp& e) {
  std::vector<Factor> fs{{k, e}};
  Rational c = 1;
  if (k->kind == KernelKind::Number || (k->kind == KernelKind::Elem && k->fn == ElemFn::Exp) || e.is_zero())
    normalize_factors(fs, c);
  return from_monomial(Monomial(std::move(fs)), c);
}

Poly Poly::from_monomial(Monomial m, Rational c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.push_back({std::move(m), std::move(c)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.mono.compare(b.mono) < 0; });
  Poly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono.compare(t.mono) == 0) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
  return p;
}

std::optional<Rational> Poly::as_constant() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_[0].mono.empty()) return terms_[0].coeff;
  return std::nullopt;
}

Poly Poly::operator+(const Poly& o) const {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return o;
  Poly r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    int c = i == terms_.size() ? 1 : (j == o.terms_.size() ? -1 : terms_[i].mono.compare(o.terms_[j].mono));
    if (c < 0) {
      r.terms_.push_back(terms_[i++]);
    } else if (c > 0) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      Rational s = terms_[i].coeff + o.terms_[j].coeff;
      if (sgn(s) != 0) r.terms_.push_back({terms_[i].mono, s});
      ++i;
      ++j;
    }
  }
  return r;
}

Poly Poly::operator-() const { return scaled(-1); }
Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::scaled(const Rational& c) const {
  Poly r;
  if (sgn(c) == 0) return r;
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  if (terms_.empty() || o.terms_.empty()) return Poly();
  if (o.terms_.size() == 1 && o.terms_[0].mono.empty()) return scaled(o.terms_[0].coeff);
  if (terms_.size() == 1 && terms_[0].mono.empty()) return o.scaled(terms_[0].coeff);
  std::vector<Term> acc;
  acc.reserve(terms_.size() * o.terms_.size());
  for (const Term& a : terms_)
    for (const Term& b : o.terms_) {
      auto [c, m] = multiply(a.mono, b.mono);
      acc.push_back({std::move(m), a.coeff * b.coeff * c});
    }
  return from_terms(std::move(acc));
}

int Poly::compare(const Poly& o) const {
  if (terms_.size() != o.terms_.size()) return terms_.size() < o.terms_.size() ? -1 : 1;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (int c = terms_[i].mono.compare(o.terms_[i].mono)) return c;
    if (int c = cmp(terms_[i].coeff, o.terms_[i].coeff)) return sign_of(c);
  }
  return 0;
}

std::size_t Poly::hash() const {
  std::size_t h = 0xabcdef;
  for (const Term& t : terms_) h = mix(mix(h, t.mono.hash()), hash_rational(t.coeff));
  return h;
}

}  // namespace symkawa
