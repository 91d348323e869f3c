#include <algorithm>
#include <map>

#include "algebra_internal.hpp"
#include "symkawa/algebra.hpp"

namespace symkawa {

using namespace detail;

namespace {

bool has_sum_base(const Poly& p) {
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors())
      if (f.kernel->kind == KernelKind::SumBase) return true;
  return false;
}

struct ClassKeyLess {
  bool operator()(const std::pair<Kernel, LinExp>& a, const std::pair<Kernel, LinExp>& b) const {
    if (int c = compare_kernels(a.first, b.first)) return c < 0;
    return a.second.compare(b.second) < 0;
  }
};

Poly kernel_power_poly(const Kernel& k, long m) {
  return Poly::from_monomial(Monomial::of(k, LinExp(m)));
}

long degree_in(const Poly& p, const Kernel& v) {
  long d = 0;
  for (const Term& t : p.terms())
    if (const LinExp* e = t.mono.exponent_of(v)) d = std::max(d, *e->to_int());
  return d;
}

// Coefficient of v^k, with v removed.
Poly coefficient_of_degree(const Poly& p, const Kernel& v, long k) {
  std::vector<Term> out;
  for (const Term& t : p.terms()) {
    const LinExp* e = t.mono.exponent_of(v);
    long d = e ? *e->to_int() : 0;
    if (d != k) continue;
    std::vector<Factor> fs;
    for (const Factor& f : t.mono.factors())
      if (compare_kernels(f.kernel, v) != 0) fs.push_back(f);
    out.push_back({Monomial(std::move(fs)), t.coeff});
  }
  return Poly::from_terms(std::move(out));
}

bool main_variable_candidate(const Kernel& k) {
  if (k->kind == KernelKind::Number) return false;
  if (k->kind == KernelKind::Elem && k->fn == ElemFn::Exp) return false;
  return true;
}


// Dense univariate polynomials over Q, lowest degree first.
using UPoly = std::vector<Rational>;

void trim(UPoly& a) {
  while (!a.empty() && sgn(a.back()) == 0) a.pop_back();
}

UPoly uderiv(const UPoly& a) {
  UPoly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * Rational(static_cast<long>(i)));
  trim(r);
  return r;
}

// Quotient and remainder.
std::pair<UPoly, UPoly> udivmod(UPoly a, const UPoly& b) {
  UPoly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rational(0));
  while (!a.empty() && a.size() >= b.size()) {
    std::size_t s = a.size() - b.size();
    Rational c = a.back() / b.back();
    q[s] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[s + i] -= c * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

UPoly umonic(UPoly a) {
  Rational l = a.back();
  for (Rational& c : a) c /= l;
  return a;
}

UPoly ugcd(UPoly a, UPoly b) {
  while (!b.empty()) {
    UPoly r = udivmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : umonic(a);
}

// p as a polynomial in a single kernel with rational coefficients.
std::optional<std::pair<Kernel, UPoly>> as_univariate(const Poly& p) {
  Kernel v;
  UPoly a;
  for (const Term& t : p.terms()) {
    const auto& fs = t.mono.factors();
    long d = 0;
    if (fs.size() > 1) return std::nullopt;
    if (fs.size() == 1) {
      if (!main_variable_candidate(fs[0].kernel) || !fs[0].exponent.is_integer()) return std::nullopt;
      d = *fs[0].exponent.to_int();
      if (d < 0) return std::nullopt;
      if (!v) v = fs[0].kernel;
      else if (compare_kernels(v, fs[0].kernel) != 0) return std::nullopt;
    }
    if (static_cast<long>(a.size()) <= d) a.resize(d + 1, Rational(0));
    a[d] += t.coeff;
  }
  if (!v) return std::nullopt;
  trim(a);
  return std::make_pair(v, a);
}

Poly from_univariate(const Kernel& v, const UPoly& a) {
  Poly r;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0) r += Poly::from_monomial(Monomial::of(v, LinExp(static_cast<long>(i))), a[i]);
  return r;
}

// Square-free decomposition (Yun) of a univariate primitive polynomial.
std::vector<std::pair<Poly, long>> square_free_factors(const Poly& p) {
  auto uv = as_univariate(p);
  if (!uv || uv->second.size() < 3) return {{p, 1}};
  const auto& [v, f] = *uv;
  UPoly fd = uderiv(f);
  UPoly a = ugcd(f, fd);
  if (a.size() <= 1) return {{p, 1}};
  std::vector<std::pair<Poly, long>> out;
  UPoly b = udivmod(f, a).first, c = udivmod(fd, a).first;
  UPoly dd = c;
  {
    UPoly bd = uderiv(b);
    dd.resize(std::max(dd.size(), bd.size()), Rational(0));
    for (std::size_t i = 0; i < bd.size(); ++i) dd[i] -= bd[i];
    trim(dd);
  }
  for (long i = 1; b.size() > 1; ++i) {
    UPoly g = ugcd(b, dd);
    if (g.empty()) g = UPoly{Rational(1)};
    if (g.size() > 1) out.emplace_back(from_univariate(v, g), i);
    b = udivmod(b, g).first;
    c = udivmod(dd, g).first;
    UPoly bd = uderiv(b);
    dd = c;
    dd.resize(std::max(dd.size(), bd.size()), Rational(0));
    for (std::size_t k = 0; k < bd.size(); ++k) dd[k] -= bd[k];
    trim(dd);
  }
  return out;
}

}  // namespace

namespace detail {

PrimitiveSplit primitive_split(const Poly& p) {
  std::vector<Kernel> kernels;
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors())
      if (main_variable_candidate(f.kernel)) kernels.push_back(f.kernel);
  std::sort(kernels.begin(), kernels.end(), KernelLess());
  kernels.erase(std::unique(kernels.begin(), kernels.end(),
                            [](const Kernel& a, const Kernel& b) { return compare_kernels(a, b) == 0; }),
                kernels.end());
  std::vector<Factor> content;
  for (const Kernel& k : kernels) {
    std::optional<LinExp> key, lowest;
    bool uniform = true;
    for (const Term& t : p.terms()) {
      const LinExp* e = t.mono.exponent_of(k);
      LinExp ex = e ? *e : LinExp(0);
      LinExp ck = ex.class_key();
      if (!key) key = ck;
      else if (*key != ck) {
        uniform = false;
        break;
      }
      if (!lowest || cmp(ex.constant(), lowest->constant()) < 0) lowest = ex;
    }
    if (uniform && lowest && !lowest->is_zero()) content.push_back({k, *lowest});
  }
  PrimitiveSplit out;
  out.monomial_content = {Monomial(content), Rational(1)};
  Poly reduced = p;
  if (!content.empty()) reduced = p * monomial_inverse(out.monomial_content);
  mpz_class g = 0, l = 1;
  for (const Term& t : reduced.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  }
  if (g == 0) g = 1;
  Rational c(g, l);
  c.canonicalize();
  Poly prim = reduced.scaled(1 / c);
  // Sign convention: the term of highest total degree is positive.
  const Term* lead = nullptr;
  Rational lead_deg;
  for (const Term& t : prim.terms()) {
    Rational deg = 0;
    for (const Factor& f : t.mono.factors()) deg += f.exponent.constant();
    if (!lead || cmp(deg, lead_deg) > 0) {
      lead = &t;
      lead_deg = deg;
    }
  }
  if (lead && sgn(lead->coeff) < 0) {
    c = -c;
    prim = -prim;
  }
  out.content = c;
  out.primitive = std::move(prim);
  return out;
}

}  // namespace detail

namespace {

// (b^(1/q))^k = b^(k div q) (b^(1/q))^(k mod q) and (b^r)^k = b^(rk) for
// integer rk, wherever the root is defined.
bool opaque_collapsible(const Factor& f) {
  if (f.kernel->kind != KernelKind::OpaquePow || !f.exponent.is_integer() || !f.kernel->exponent.is_constant())
    return false;
  const Rational& r = f.kernel->exponent.constant();
  long k = *f.exponent.to_int();
  mpz_class rk_den = Rational(r * k).get_den();
  if (rk_den == 1) return true;
  return r.get_num() == 1 && (k >= r.get_den() || k < 0);
}

Poly collapse_opaque(const Poly& p) {
  Poly out;
  for (const Term& t : p.terms()) {
    std::vector<Factor> keep;
    Poly extra(1);
    for (const Factor& f : t.mono.factors()) {
      if (!opaque_collapsible(f)) {
        keep.push_back(f);
        continue;
      }
      const Rational& r = f.kernel->exponent.constant();
      long k = *f.exponent.to_int();
      Rational rk = r * k;
      if (rk.get_den() == 1) {
        extra = extra * power(f.kernel->args[0], rk.get_num().get_si());
      } else {
        long q = r.get_den().get_si();
        long whole = floor_of(Rational(k, q));
        extra = extra * power(f.kernel->args[0], whole);
        keep.push_back({f.kernel, LinExp(k - whole * q)});
      }
    }
    out += Poly::from_monomial(Monomial(std::move(keep)), t.coeff) * extra;
  }
  return out;
}

bool has_collapsible(const Poly& p) {
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors())
      if (opaque_collapsible(f)) return true;
  return false;
}

}  // namespace

Poly canonical(const Poly& input) {
  if (has_collapsible(input)) return canonical(collapse_opaque(input));
  if (!has_sum_base(input)) return input;
  Poly cur = input;
  std::map<Kernel, long, KernelLess> den;
  for (int iter = 0;; ++iter) {
    if (iter > 64) throw Error("canonical form did not stabilize");
    std::map<Kernel, long, KernelLess> shift;
    for (const Term& t : cur.terms())
      for (const Factor& f : t.mono.factors())
        if (f.kernel->kind == KernelKind::SumBase && f.exponent.is_integer()) {
          long e = *f.exponent.to_int();
          if (e < 0) {
            long& s = shift[f.kernel];
            s = std::max(s, -e);
          }
        }
    if (!shift.empty()) {
      std::vector<Factor> fs;
      for (const auto& [k, s] : shift) {
        fs.push_back({k, LinExp(s)});
        den[k] += s;
      }
      cur = cur * Poly::from_monomial(Monomial(std::move(fs)));
    }
    std::map<std::pair<Kernel, LinExp>, Rational, ClassKeyLess> class_min;
    for (const Term& t : cur.terms())
      for (const Factor& f : t.mono.factors())
        if (f.kernel->kind == KernelKind::SumBase && !f.exponent.is_integer()) {
          auto key = std::make_pair(f.kernel, f.exponent.class_key());
          auto it = class_min.find(key);
          if (it == class_min.end()) class_min.emplace(key, f.exponent.constant());
          else if (cmp(f.exponent.constant(), it->second) < 0) it->second = f.exponent.constant();
        }
    bool changed = false;
    std::vector<Term> plain;
    Poly expanded;
    for (const Term& t : cur.terms()) {
      std::vector<Factor> keep;
      Poly extra(1);
      bool touched = false;
      for (const Factor& f : t.mono.factors()) {
        if (f.kernel->kind == KernelKind::SumBase) {
          const Poly& b = f.kernel->args[0];
          if (f.exponent.is_integer()) {
            extra = extra * power(b, *f.exponent.to_int());
            touched = true;
            continue;
          }
          const Rational& lo = class_min.at({f.kernel, f.exponent.class_key()});
          if (cmp(f.exponent.constant(), lo) != 0) {
            Rational diff = f.exponent.constant() - lo;
            keep.push_back({f.kernel, f.exponent - LinExp(diff)});
            extra = extra * power(b, diff.get_num().get_si());
            touched = true;
            continue;
          }
        }
        keep.push_back(f);
      }
      if (!touched) {
        plain.push_back(t);
      } else {
        changed = true;
        expanded += Poly::from_monomial(Monomial(std::move(keep)), t.coeff) * extra;
      }
    }
    if (!changed) break;
    cur = Poly::from_terms(std::move(plain)) + expanded;
  }
  for (auto& [k, m] : den) {
    const Poly& b = k->args[0];
    while (m > 0 && !cur.is_zero()) {
      auto q = divide_exact(cur, b);
      if (!q) break;
      cur = std::move(*q);
      --m;
    }
  }
  if (cur.is_zero()) return cur;
  std::vector<Factor> fs;
  for (const auto& [k, m] : den)
    if (m > 0) fs.push_back({k, LinExp(-m)});
  if (!fs.empty()) cur = cur * Poly::from_monomial(Monomial(std::move(fs)));
  return cur;
}

Fraction as_fraction(const Poly& p) {
  std::map<Kernel, long, KernelLess> shift;
  for (const Term& t : p.terms())
    for (const Factor& f : t.mono.factors())
      if (f.kernel->kind == KernelKind::SumBase && f.exponent.is_integer()) {
        long e = *f.exponent.to_int();
        if (e < 0) {
          long& s = shift[f.kernel];
          s = std::max(s, -e);
        }
      }
  Fraction fr;
  if (shift.empty()) {
    fr.numerator = p;
    return fr;
  }
  std::vector<Factor> fs;
  for (const auto& [k, s] : shift) {
    fs.push_back({k, LinExp(s)});
    fr.denominator.emplace_back(k, s);
  }
  fr.numerator = p * Poly::from_monomial(Monomial(std::move(fs)));
  return fr;
}

std::optional<Poly> divide_exact(const Poly& n, const Poly& d) {
  if (d.is_zero()) throw DomainError("division by zero");
  if (n.is_zero()) return Poly();
  if (d.size() == 1) return n * monomial_inverse(d.terms()[0]);
  std::vector<Kernel> cands;
  for (const Term& t : d.terms())
    for (const Factor& f : t.mono.factors())
      if (main_variable_candidate(f.kernel)) cands.push_back(f.kernel);
  std::sort(cands.begin(), cands.end(), KernelLess());
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](const Kernel& a, const Kernel& b) { return compare_kernels(a, b) == 0; }),
              cands.end());
  for (const Kernel& v : cands) {
    bool ok = true;
    for (const Term& t : d.terms()) {
      const LinExp* e = t.mono.exponent_of(v);
      if (e && (!e->is_integer() || *e->to_int() < 0)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    long nmin = 0;
    for (const Term& t : n.terms()) {
      const LinExp* e = t.mono.exponent_of(v);
      if (!e) continue;
      if (!e->is_integer()) {
        ok = false;
        break;
      }
      nmin = std::min(nmin, *e->to_int());
    }
    if (!ok) continue;
    long dv = degree_in(d, v);
    if (dv == 0) continue;
    Poly lc = coefficient_of_degree(d, v, dv);
    Poly r = nmin < 0 ? n * kernel_power_poly(v, -nmin) : n;
    Poly q;
    for (int guard = 0; !r.is_zero(); ++guard) {
      if (guard > 100000) return std::nullopt;
      long dr = degree_in(r, v);
      if (dr < dv) return std::nullopt;
      Poly lr = coefficient_of_degree(r, v, dr);
      auto qq = divide_exact(lr, lc);
      if (!qq) return std::nullopt;
      Poly tq = dr > dv ? *qq * kernel_power_poly(v, dr - dv) : *qq;
      q += tq;
      r -= tq * d;
    }
    if (nmin < 0) q = q * kernel_power_poly(v, nmin);
    return q;
  }
  return std::nullopt;
}

Poly reciprocal(const Poly& p) {
  Poly c = canonical(p);
  if (c.is_zero()) throw DomainError("division by zero");
  Fraction fr = as_fraction(c);
  Poly dpart(1);
  if (!fr.denominator.empty()) {
    std::vector<Factor> fs;
    for (const auto& [k, m] : fr.denominator) fs.push_back({k, LinExp(m)});
    dpart = Poly::from_monomial(Monomial(std::move(fs)));
  }
  if (fr.numerator.size() == 1) return monomial_inverse(fr.numerator.terms()[0]) * dpart;
  PrimitiveSplit ps = primitive_split(fr.numerator);
  Poly inv(1), prod(1);
  for (const auto& [q, m] : square_free_factors(ps.primitive)) {
    PrimitiveSplit qs = primitive_split(q);
    inv = inv * Poly::from_monomial(Monomial::of(sum_base_kernel(qs.primitive), LinExp(-m)));
    prod = prod * power(qs.primitive, m);
  }
  auto unit = prod.identical(ps.primitive) ? std::optional<Rational>(1) : divide_exact(ps.primitive, prod)->as_constant();
  Term mc = ps.monomial_content;
  mc.coeff = ps.content * *unit;
  return inv * monomial_inverse(mc) * dpart;
}

Poly divide(const Poly& a, const Poly& b) {
  Poly cb = canonical(b);
  if (cb.is_zero()) throw DomainError("division by zero");
  if (cb.size() == 1) return a * monomial_inverse(cb.terms()[0]);
  Poly ca = canonical(a);
  if (!has_sum_base(cb))
    if (auto q = divide_exact(ca, cb)) return *q;
  return ca * reciprocal(cb);
}

Poly power(const Poly& base, long k) {
  if (k == 0) return Poly(1);
  if (k < 0) return power(reciprocal(base), -k);
  if (base.size() == 1) return monomial_power(base.terms()[0], LinExp(k));
  Poly result(1), b = base;
  while (k > 0) {
    if (k & 1) result = result * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return result;
}

namespace {

bool monomial_admits_power(const Monomial& m, const Assumptions& assume) {
  for (const Factor& f : m.factors())
    if (!is_positive(f.kernel, assume)) return false;
  return true;
}

}  // namespace

Poly power(const Poly& base, const LinExp& e, const Assumptions& assume) {
  if (e.is_zero()) return Poly(1);
  if (auto k = e.to_int()) return power(base, *k);
  Poly c = canonical(base);
  if (c.is_zero()) {
    if (e.is_constant() && sgn(e.constant()) > 0) return Poly();
    throw DomainError("zero raised to a non-positive power");
  }
  Fraction fr = as_fraction(c);
  bool ok = std::all_of(fr.denominator.begin(), fr.denominator.end(),
                        [&](const auto& km) { return is_positive(km.first->args[0], assume); });
  if (ok) {
    Poly dpart(1);
    if (!fr.denominator.empty()) {
      std::vector<Factor> fs;
      for (const auto& [k, m] : fr.denominator) {
        auto pe = LinExp::multiply(LinExp(-m), e);
        fs.push_back({k, *pe});
      }
      dpart = Poly::from_monomial(Monomial(std::move(fs)));
    }
    if (fr.numerator.size() == 1) {
      const Term& t = fr.numerator.terms()[0];
      if (sgn(t.coeff) > 0 && monomial_admits_power(t.mono, assume)) return monomial_power(t, e) * dpart;
    } else {
      PrimitiveSplit ps = primitive_split(fr.numerator);
      if (sgn(ps.content) > 0 && monomial_admits_power(ps.monomial_content.mono, assume) &&
          is_positive(ps.primitive, assume)) {
        Term mc = ps.monomial_content;
        mc.coeff = ps.content;
        Poly sb = Poly::from_monomial(Monomial::of(sum_base_kernel(ps.primitive), e));
        return monomial_power(mc, e) * sb * dpart;
      }
    }
  }
  return Poly::from_kernel(opaque_pow_kernel(c, e));
}

bool is_positive(const Kernel& k, const Assumptions& assume) {
  switch (k->kind) {
    case KernelKind::Number: return true;
    case KernelKind::Var: return assume.positive(var_name(k->var));
    case KernelKind::Param: return assume.positive(k->name);
    case KernelKind::Elem: return k->fn == ElemFn::Exp;
    case KernelKind::SumBase: return is_positive(k->args[0], assume);
    case KernelKind::Func:
      return assume.positive(k->name) &&
             std::all_of(k->orders.begin(), k->orders.end(), [](int o) { return o == 0; });
    default: return false;
  }
}

bool is_positive(const Poly& p, const Assumptions& assume) {
  if (p.is_zero()) return false;
  bool strict = false;
  for (const Term& t : p.terms()) {
    if (sgn(t.coeff) <= 0) return false;
    bool term_strict = true;
    for (const Factor& f : t.mono.factors()) {
      if (is_positive(f.kernel, assume)) continue;
      auto k = f.exponent.to_int();
      bool real = f.kernel->kind != KernelKind::OpaquePow;
      if (real && k && *k % 2 == 0) {
        term_strict = false;
        continue;
      }
      return false;
    }
    strict = strict || term_strict;
  }
  return strict;
}

}  // namespace symkawa
