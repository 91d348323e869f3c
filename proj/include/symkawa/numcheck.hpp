#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symkawa/transform.hpp"

namespace symkawa {

// Periodic grid x_j = j L / N on [0, L).
struct DiscreteSolution {
  double L = 0;
  int N = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // one row per time
  std::optional<PdeInstance> pde;

  double dx() const { return L / N; }
  double mass(std::size_t row) const;
};

struct SolveConfig {
  double L = 2 * 3.14159265358979323846 * 10;
  int N = 256;
  double t0 = 0;
  double t_end = 0.1;
  double dt = 0;           // 0 picks the default step
  int record_every = 0;    // 0 keeps only the initial and final states
  double blowup_factor = 1e6;
};

// The step used when config.dt is 0: min(1e-4, half the explicit transport
// limit of the initial state), shortened to divide the interval evenly.
double default_step(const PdeInstance& pde, const std::vector<double>& u0, const SolveConfig& c);

// Fourier pseudo-spectral discretisation in x and exponential time differencing
// (ETDRK4): beta u_3x + sigma u_5x is integrated exactly with coefficients
// frozen at the step midpoint; the transport term alpha (F(u))_x with F' = f is
// explicit.  Throws DomainError on blow-up and InputError on an unstable step
// or non-numeric coefficients.
DiscreteSolution solve(const PdeInstance& pde, const std::function<double(double)>& ic, const SolveConfig& c);
DiscreteSolution solve_from(const PdeInstance& pde, std::vector<double> u0, const SolveConfig& c);

// Push-forward of the solution graph; x~ must be affine in x with a constant
// X1 and u~ must not depend on x.  The result lives on the grid of length |X1| L.
DiscreteSolution transform_solution(const DiscreteSolution& sol, const PointTransformation& tr);

// Trigonometric interpolation of one periodic row at the points a x_j + s, a = +-1.
std::vector<double> resample(const std::vector<double>& row, double L, int a, double s);

// Named one-parameter families used for orbit checks:
//   galilean      t~ = t, x~ = x + eps t, u~ = u + eps
//   x-translation x~ = x + eps
//   t-translation t~ = t + eps
//   scaling       t~ = e^(3 eps) t, x~ = e^((rho+1) eps) x, u~ = e^((rho-2) eps) u
PointTransformation orbit_transformation(const std::string& family, double epsilon, double rho = 1);

struct OrbitReport {
  double residual = 0;      // relative max-norm discrepancy of the two legs
  double mass_drift = 0;    // worst |mass(t_end) - mass(t0)| over both legs
  double t_end_image = 0;
};

// Leg 1 solves and then transforms; leg 2 transforms the initial state and
// solves (with second_leg when given, for negative controls).  Both legs run
// concurrently.
OrbitReport orbit_residual(const PdeInstance& pde, const std::function<double(double)>& ic,
                           const PointTransformation& tr, const SolveConfig& c,
                           const PdeInstance* second_leg = nullptr);

// Columnar "t x u" text and a binary layout: L (double), N and M (int64),
// then M rows of 1 + N doubles (t followed by the values).
void write_text(const DiscreteSolution& sol, std::ostream& out);
void write_binary(const DiscreteSolution& sol, std::ostream& out);
DiscreteSolution read_binary(std::istream& in);

}  // namespace symkawa
