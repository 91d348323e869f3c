#pragma once

#include "symkawa/algebra.hpp"

namespace symkawa::detail {

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t fnv(const std::string& s);
std::size_t hash_mpz(const mpz_class& z);
int sign_of(long v);
std::uint32_t poly_deps(const Poly& p);

std::shared_ptr<KernelNode> new_node(KernelKind k);
Kernel finish(std::shared_ptr<KernelNode> n);
Kernel number_kernel(const mpz_class& r);
Kernel sum_base_kernel(const Poly& primitive);
Kernel opaque_pow_kernel(const Poly& base, const LinExp& e);
Kernel elem_kernel(ElemFn fn, const Poly& arg);

Rational int_power(const mpz_class& r, long k);
Rational rational_int_power(const Rational& q, long k);
long floor_of(const Rational& q);

void normalize_factors(std::vector<Factor>& fs, Rational& coeff);
Poly monomial_inverse(const Term& t);
Poly monomial_power(const Term& t, const LinExp& e);
Poly rational_power(const Rational& q, const LinExp& e);

struct PrimitiveSplit {
  Rational content;
  Term monomial_content;  // coefficient 1
  Poly primitive;
};
PrimitiveSplit primitive_split(const Poly& p);

}  // namespace symkawa::detail
