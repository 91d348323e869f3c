#pragma once

#include <random>
#include <string>

#include "symkawa/expr.hpp"

namespace test {

inline bool same(const symkawa::Expr& a, const symkawa::Expr& b, const symkawa::Assumptions& as = {}) {
  return symkawa::is_zero(a - b, as) == symkawa::ZeroVerdict::Zero;
}
inline bool same(const std::string& a, const std::string& b, const symkawa::Assumptions& as = {}) {
  return same(symkawa::parse(a), symkawa::parse(b), as);
}

// Random expression over t, x, u, a parameter and the elementary functions
// that stay real on t > 0.
inline symkawa::Expr random_expr(std::mt19937_64& rng, int depth) {
  using symkawa::Expr;
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 8 : 3);
  std::uniform_int_distribution<int> small(-3, 3);
  switch (pick(rng)) {
    case 0: return Expr::t();
    case 1: return Expr::x();
    case 2: return Expr::u();
    case 3: {
      int k = small(rng);
      return k == 0 ? Expr::parameter("k") : Expr(k);
    }
    case 4: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6: return symkawa::pow(random_expr(rng, depth - 1), Expr(std::uniform_int_distribution<int>(2, 3)(rng)));
    case 7: return symkawa::parse("exp(" + random_expr(rng, depth - 1).str() + ")");
    default: return symkawa::parse("sin(" + random_expr(rng, depth - 1).str() + ")");
  }
}

}  // namespace test
