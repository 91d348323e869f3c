#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "symkawa/numcheck.hpp"

using namespace symkawa;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PdeInstance linear_unit() { return PdeInstance(PdeClass::LinearGauged, Expr::u(), 1, 1, 1); }

double gaussian(double x) {
  double c = 10 * std::numbers::pi;
  return std::exp(-(x - c) * (x - c));
}

}  // namespace

TEST_CASE("zero data stays zero") {
  SolveConfig c;
  DiscreteSolution s = solve(linear_unit(), [](double) { return 0.0; }, c);
  for (double v : s.values.back()) CHECK(v == 0.0);
}

TEST_CASE("spectral convergence in space") {
  PdeInstance pde(PdeClass::NonlinearGauged, parse("u^2"), 1, 1, 1);
  SolveConfig c;
  c.t_end = 0.05;
  c.dt = 1e-4;
  auto ic = gaussian;
  auto at = [&](int n) {
    c.N = n;
    return solve(pde, ic, c).values.back();
  };
  std::vector<double> fine = at(256), mid = at(128), coarse = at(64);
  auto sub = [](const std::vector<double>& v, int k) {
    std::vector<double> o;
    for (std::size_t i = 0; i < v.size(); i += k) o.push_back(v[i]);
    return o;
  };
  double e64 = max_diff(coarse, sub(fine, 4)), e128 = max_diff(mid, sub(fine, 2));
  CHECK(e128 < 1e-4);
  CHECK(e128 < e64 * 1e-2);
}

TEST_CASE("fourth order in time on smooth data") {
  SolveConfig c;
  c.L = 2 * std::numbers::pi;
  c.N = 64;
  c.t_end = 0.2;
  PdeInstance pde(PdeClass::NonlinearGauged, parse("u^2"), 1, 1, 1);
  auto ic = [](double x) { return 0.2 * std::sin(x); };
  auto run = [&](double dt) {
    c.dt = dt;
    return solve(pde, ic, c).values.back();
  };
  std::vector<double> ref = run(2.5e-4), a = run(0.004), b = run(0.002);
  double ratio = max_diff(a, ref) / max_diff(b, ref);
  CHECK(ratio > 10);
}

TEST_CASE("mass is conserved") {
  SolveConfig c;
  DiscreteSolution s = solve(PdeInstance(PdeClass::NonlinearGauged, parse("u^3"), 1, 1, 1), gaussian, c);
  CHECK(std::abs(s.mass(s.values.size() - 1) - s.mass(0)) < 1e-10);
}

TEST_CASE("solution transformations") {
  SolveConfig c;
  c.N = 128;
  DiscreteSolution s = solve(linear_unit(), gaussian, c);
  DiscreteSolution same = transform_solution(s, PointTransformation::identity());
  CHECK(max_diff(same.values.back(), s.values.back()) < 1e-12);

  double eps = 0.3;
  DiscreteSolution g = transform_solution(s, orbit_transformation("galilean", eps));
  CHECK(g.times.back() == doctest::Approx(s.times.back()));
  // u~(t, x~) = u(t, x~ - eps t) + eps.
  std::vector<double> expect = resample(s.values.back(), s.L, 1, -eps * s.times.back());
  for (double& v : expect) v += eps;
  CHECK(max_diff(g.values.back(), expect) < 1e-10);

  DiscreteSolution sc = transform_solution(s, orbit_transformation("scaling", 0.1, 1));
  CHECK(sc.L == doctest::Approx(s.L * std::exp(0.2)));
  CHECK(sc.times.back() == doctest::Approx(s.times.back() * std::exp(0.3)));
}

TEST_CASE("orbit residuals") {
  SolveConfig c;
  OrbitReport zero = orbit_residual(linear_unit(), gaussian, orbit_transformation("galilean", 0.0), c);
  CHECK(zero.residual < 1e-13);
  OrbitReport gal = orbit_residual(linear_unit(), gaussian, orbit_transformation("galilean", 0.3), c);
  CHECK(gal.residual < 1e-6);
  CHECK(gal.mass_drift < 1e-10);
  PdeInstance off(PdeClass::LinearGauged, Expr::u(), 1, 1, parse("11/10"));
  OrbitReport bad = orbit_residual(linear_unit(), gaussian, orbit_transformation("galilean", 0.3), c, &off);
  CHECK(bad.residual > 1e-3);
}

TEST_CASE("binary export round trip") {
  SolveConfig c;
  c.N = 32;
  c.record_every = 100;
  DiscreteSolution s = solve(linear_unit(), gaussian, c);
  std::stringstream buf;
  write_binary(s, buf);
  DiscreteSolution r = read_binary(buf);
  CHECK(r.N == s.N);
  CHECK(r.L == s.L);
  REQUIRE(r.values.size() == s.values.size());
  CHECK(r.times == s.times);
  CHECK(r.values == s.values);
  std::stringstream text;
  write_text(s, text);
  CHECK(text.str().rfind("# t x u", 0) == 0);
}

TEST_CASE("input validation") {
  SolveConfig c;
  c.t_end = 1.0;
  c.dt = 1.0;
  CHECK_THROWS_AS(solve(PdeInstance(PdeClass::NonlinearGauged, parse("u^2"), 1, 1, 1), gaussian, c), InputError);
  CHECK_THROWS_AS(solve(PdeInstance::symbolic(PdeClass::LinearGauged), gaussian, SolveConfig{}), InputError);
  CHECK_THROWS_AS(orbit_transformation("rotation", 0.1), InputError);
}
