#include "symkawa/numcheck.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>

namespace symkawa {

namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex transforms of length N; planning is serialised because the
// FFTW planner is not thread-safe, execution on new arrays is.
class Spectral {
 public:
  explicit Spectral(int n) : n_(n) {
    std::vector<double> r(n);
    std::vector<cplx> c(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, r.data(), reinterpret_cast<fftw_complex*>(c.data()), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(c.data()), r.data(), FFTW_ESTIMATE);
  }
  ~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  std::vector<cplx> forward(std::vector<double> r) const {
    std::vector<cplx> c(n_ / 2 + 1);
    fftw_execute_dft_r2c(fwd_, r.data(), reinterpret_cast<fftw_complex*>(c.data()));
    return c;
  }
  // Normalised inverse; the input is consumed.
  std::vector<double> backward(std::vector<cplx> c) const {
    std::vector<double> r(n_);
    fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(c.data()), r.data());
    for (double& v : r) v /= n_;
    return r;
  }

 private:
  int n_;
  fftw_plan fwd_, bwd_;
};

void require_numeric(const Poly& p, const char* what) {
  if (depends_on(p, kDepParam | kDepFunc))
    throw InputError(std::string("numerical solving needs a concrete ") + what + " (no parameters or arbitrary functions)");
}

double eval_at(const Poly& p, const char* var, double v) {
  NumericEnv env;
  env.symbols[var] = v;
  return evaluate(p, env);
}

// Antiderivative in u of a sum of c u^k and c exp(a u + b) terms.
std::optional<Poly> u_antiderivative(const Poly& f) {
  Kernel u = var_kernel(VarId::U);
  Poly out;
  for (const Term& t : f.terms()) {
    const Factor* dep = nullptr;
    int count = 0;
    for (const Factor& fa : t.mono.factors())
      if (fa.kernel->deps & kDepU) {
        dep = &fa;
        ++count;
      }
    Poly term = Poly::from_monomial(t.mono, t.coeff);
    if (count == 0) {
      out += term * var_poly(VarId::U);
      continue;
    }
    if (count > 1 || !dep->exponent.is_constant()) return std::nullopt;
    const Rational& k = dep->exponent.constant();
    if (dep->kernel->kind == KernelKind::Var && k != -1) {
      out += term * var_poly(VarId::U) * Poly(Rational(1) / (k + 1));
    } else if (dep->kernel->kind == KernelKind::Elem && dep->kernel->fn == ElemFn::Exp) {
      auto a = canonical(partial(dep->kernel->args[0], u)).as_constant();
      if (!a || *a == 0) return std::nullopt;
      out += term * Poly(Rational(1) / (*a * k));
    } else {
      return std::nullopt;
    }
  }
  return canonical(out);
}

// Fast evaluation of a function of u.
class UFunction {
 public:
  explicit UFunction(const Poly& p) : p_(p) {
    for (const Term& t : p.terms()) {
      if (t.mono.empty()) {
        powers_.push_back({t.coeff.get_d(), 0});
        continue;
      }
      const auto& fs = t.mono.factors();
      if (fs.size() != 1 || fs[0].kernel->kind != KernelKind::Var || !fs[0].exponent.to_int() ||
          *fs[0].exponent.to_int() < 0) {
        general_ = true;
        return;
      }
      powers_.push_back({t.coeff.get_d(), static_cast<int>(*fs[0].exponent.to_int())});
    }
  }
  double operator()(double u) const {
    if (general_) return eval_at(p_, "u", u);
    double s = 0;
    for (const auto& [c, k] : powers_) {
      double v = c;
      for (int i = 0; i < k; ++i) v *= u;
      s += v;
    }
    return s;
  }

 private:
  Poly p_;
  bool general_ = false;
  std::vector<std::pair<double, int>> powers_;
};

// F with F' = f: symbolic when possible, otherwise Gauss-Legendre from 0.
std::function<double(double)> flux_function(const Poly& f) {
  if (auto F = u_antiderivative(f)) {
    auto fn = std::make_shared<UFunction>(*F);
    return [fn](double u) { return (*fn)(u); };
  }
  auto fn = std::make_shared<UFunction>(f);
  return [fn](double u) {
    return boost::math::quadrature::gauss<double, 20>::integrate([&](double s) { return (*fn)(s); }, 0.0, u);
  };
}

std::vector<double> wavenumbers(int n, double L) {
  std::vector<double> k(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j) k[j] = 2 * std::numbers::pi * j / L;
  return k;
}

// ETDRK4 weights for the diagonal linear operator h*lin, by contour averaging.
struct EtdWeights {
  std::vector<cplx> E, E2, Q, f1, f2, f3;
};

EtdWeights etd_weights(const std::vector<cplx>& lin, double h) {
  constexpr int M = 32;
  EtdWeights w;
  std::size_t n = lin.size();
  for (auto* v : {&w.E, &w.E2, &w.Q, &w.f1, &w.f2, &w.f3}) v->assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cplx L = h * lin[j];
    w.E[j] = std::exp(L);
    w.E2[j] = std::exp(L / 2.0);
    cplx q = 0, a = 0, b = 0, c = 0;
    for (int m = 0; m < M; ++m) {
      cplx z = L + std::polar(1.0, 2 * std::numbers::pi * (m + 0.5) / M);
      cplx ez = std::exp(z), z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    w.Q[j] = h * q / double(M);
    w.f1[j] = h * a / double(M);
    w.f2[j] = h * b / double(M);
    w.f3[j] = h * c / double(M);
  }
  return w;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct NumericPde {
  Poly alpha, beta, sigma;
  std::function<double(double)> F;
  std::shared_ptr<UFunction> f;
};

NumericPde numeric_pde(const PdeInstance& pde) {
  require_numeric(pde.F(), "f");
  require_numeric(pde.alpha_poly(), "alpha");
  require_numeric(pde.beta_poly(), "beta");
  require_numeric(pde.sigma_poly(), "sigma");
  return {pde.alpha_poly(), pde.beta_poly(), pde.sigma_poly(), flux_function(pde.F()),
          std::make_shared<UFunction>(pde.F())};
}

double transport_speed(const NumericPde& np, const std::vector<double>& u, double t) {
  double m = 0;
  for (double v : u) m = std::max(m, std::abs((*np.f)(v)));
  return std::abs(eval_at(np.alpha, "t", t)) * m;
}

}  // namespace

double DiscreteSolution::mass(std::size_t row) const {
  double s = 0;
  for (double v : values.at(row)) s += v;
  return s * dx();
}

double default_step(const PdeInstance& pde, const std::vector<double>& u0, const SolveConfig& c) {
  NumericPde np = numeric_pde(pde);
  double kmax = std::numbers::pi * c.N / c.L;
  double speed = transport_speed(np, u0, c.t0);
  double h = 1e-4;
  if (speed > 0) h = std::min(h, 0.5 / (speed * kmax));
  double span = c.t_end - c.t0;
  if (span <= 0) return h;
  long steps = static_cast<long>(std::ceil(span / h - 1e-12));
  return span / std::max(1L, steps);
}

DiscreteSolution solve(const PdeInstance& pde, const std::function<double(double)>& ic, const SolveConfig& c) {
  if (c.N < 32 || (c.N & (c.N - 1)) != 0) throw InputError("N must be a power of two and at least 32");
  if (!(c.L > 0)) throw InputError("L must be positive");
  std::vector<double> u0(c.N);
  for (int j = 0; j < c.N; ++j) u0[j] = ic(c.L * j / c.N);
  return solve_from(pde, std::move(u0), c);
}

DiscreteSolution solve_from(const PdeInstance& pde, std::vector<double> u0, const SolveConfig& c) {
  if (c.N < 32 || (c.N & (c.N - 1)) != 0) throw InputError("N must be a power of two and at least 32");
  if (static_cast<int>(u0.size()) != c.N) throw InputError("initial state does not match N");
  if (!(c.t_end >= c.t0)) throw InputError("t_end must not precede t0");
  for (double v : u0)
    if (!std::isfinite(v)) throw InputError("initial state is not finite");
  NumericPde np = numeric_pde(pde);

  double span = c.t_end - c.t0;
  double h = c.dt > 0 ? c.dt : default_step(pde, u0, c);
  long steps = span > 0 ? static_cast<long>(std::ceil(span / h - 1e-9)) : 0;
  if (steps > 0) h = span / steps;
  double kmax = std::numbers::pi * c.N / c.L;
  if (h * transport_speed(np, u0, c.t0) * kmax > 2.5) throw InputError("unstable dt for the transport term");

  DiscreteSolution sol;
  sol.L = c.L;
  sol.N = c.N;
  sol.pde = pde;
  sol.times.push_back(c.t0);
  sol.values.push_back(u0);
  if (steps == 0) return sol;

  Spectral fft(c.N);
  std::vector<double> k = wavenumbers(c.N, c.L);
  std::vector<cplx> ik(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) ik[j] = cplx(0, k[j]);
  ik.back() = 0;  // odd derivatives drop the Nyquist mode

  auto nonlinear = [&](const std::vector<cplx>& vh, double t) {
    std::vector<double> v = fft.backward(vh);
    for (double& x : v) x = np.F(x);
    std::vector<cplx> Fh = fft.forward(std::move(v));
    double a = eval_at(np.alpha, "t", t);
    for (std::size_t j = 0; j < Fh.size(); ++j) Fh[j] *= -a * ik[j];
    return Fh;
  };

  double limit = c.blowup_factor * (max_abs(u0) + 1);
  std::vector<cplx> vh = fft.forward(u0);
  EtdWeights w;
  double last_beta = NAN, last_sigma = NAN;
  std::size_t n = vh.size();
  for (long s = 0; s < steps; ++s) {
    double t = c.t0 + s * h;
    double beta = eval_at(np.beta, "t", t + h / 2), sigma = eval_at(np.sigma, "t", t + h / 2);
    if (beta != last_beta || sigma != last_sigma) {
      // u_t = -beta u_3x - sigma u_5x  =>  lin(k) = i beta k^3 - i sigma k^5
      std::vector<cplx> lin(n);
      for (std::size_t j = 0; j + 1 < n; ++j) lin[j] = cplx(0, beta * std::pow(k[j], 3) - sigma * std::pow(k[j], 5));
      w = etd_weights(lin, h);
      last_beta = beta;
      last_sigma = sigma;
    }
    std::vector<cplx> Nv = nonlinear(vh, t), a(n), b(n), cc(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = w.E2[j] * vh[j] + w.Q[j] * Nv[j];
    std::vector<cplx> Na = nonlinear(a, t + h / 2);
    for (std::size_t j = 0; j < n; ++j) b[j] = w.E2[j] * vh[j] + w.Q[j] * Na[j];
    std::vector<cplx> Nb = nonlinear(b, t + h / 2);
    for (std::size_t j = 0; j < n; ++j) cc[j] = w.E2[j] * a[j] + w.Q[j] * (2.0 * Nb[j] - Nv[j]);
    std::vector<cplx> Nc = nonlinear(cc, t + h);
    for (std::size_t j = 0; j < n; ++j)
      vh[j] = w.E[j] * vh[j] + Nv[j] * w.f1[j] + 2.0 * (Na[j] + Nb[j]) * w.f2[j] + Nc[j] * w.f3[j];

    bool last = s + 1 == steps;
    bool record = last || (c.record_every > 0 && (s + 1) % c.record_every == 0);
    bool probe = record || (s + 1) % 64 == 0;
    if (!probe) continue;
    std::vector<double> u = fft.backward(vh);
    for (double v : u)
      if (!std::isfinite(v) || std::abs(v) > limit)
        throw DomainError("blow-up detected at t = " + std::to_string(t + h));
    if (record) {
      sol.times.push_back(last ? c.t_end : t + h);
      sol.values.push_back(std::move(u));
    }
  }
  return sol;
}

std::vector<double> resample(const std::vector<double>& row, double L, int a, double s) {
  int n = static_cast<int>(row.size());
  Spectral fft(n);
  std::vector<cplx> c = fft.forward(row);
  std::vector<double> k = wavenumbers(n, L);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (static_cast<int>(j) == n / 2) c[j] *= std::cos(k[j] * s);
    else c[j] *= std::polar(1.0, k[j] * s);
  }
  std::vector<double> shifted = fft.backward(std::move(c));
  if (a == 1) return shifted;
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = shifted[(n - j) % n];
  return out;
}

DiscreteSolution transform_solution(const DiscreteSolution& sol, const PointTransformation& tr) {
  Kernel x = var_kernel(VarId::X);
  if (poly_depends_on(tr.U1, x) || poly_depends_on(tr.U0, x))
    throw InputError("the transformation leaves the periodic domain structure (u~ depends on x)");
  if (poly_depends_on(tr.X1, var_kernel(VarId::T)))
    throw InputError("the transformation leaves the periodic domain structure (time-dependent X1)");
  for (const Poly* p : {&tr.T, &tr.X1, &tr.X0, &tr.U1, &tr.U0}) require_numeric(*p, "transformation");
  double X1 = eval_at(tr.X1, "t", 0);
  int a = X1 > 0 ? 1 : -1;

  DiscreteSolution out;
  out.L = std::abs(X1) * sol.L;
  out.N = sol.N;
  if (sol.pde) {
    try {
      if (auto r = apply_point_transformation(tr, *sol.pde).image) out.pde = *r;
    } catch (const Error&) {
    }
  }
  std::vector<std::size_t> order(sol.times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> tt(sol.times.size());
  for (std::size_t i = 0; i < tt.size(); ++i) tt[i] = eval_at(tr.T, "t", sol.times[i]);
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return tt[p] < tt[q]; });
  for (std::size_t i : order) {
    double t = sol.times[i];
    double X0 = eval_at(tr.X0, "t", t), U1 = eval_at(tr.U1, "t", t), U0 = eval_at(tr.U0, "t", t);
    // u~(x~_j) = U1 u(x) + U0 with x = (x~_j - X0) / X1 = a x_j - X0 / X1.
    std::vector<double> row = resample(sol.values[i], sol.L, a, -X0 / X1);
    for (double& v : row) v = U1 * v + U0;
    out.times.push_back(tt[i]);
    out.values.push_back(std::move(row));
  }
  return out;
}

PointTransformation orbit_transformation(const std::string& family, double epsilon, double rho) {
  auto num = [](double v) {
    Rational r(v);
    return Poly(r);
  };
  Poly t = var_poly(VarId::T);
  if (family == "galilean") return PointTransformation::make(t, Poly(1), num(epsilon) * t, Poly(1), num(epsilon));
  if (family == "x-translation") return PointTransformation::make(t, Poly(1), num(epsilon), Poly(1), Poly());
  if (family == "t-translation") return PointTransformation::make(t + num(epsilon), Poly(1), Poly(), Poly(1), Poly());
  if (family == "scaling")
    return PointTransformation::make(num(std::exp(3 * epsilon)) * t, num(std::exp((rho + 1) * epsilon)), Poly(),
                                     num(std::exp((rho - 2) * epsilon)), Poly());
  throw InputError("unknown transformation family '" + family +
                   "' (expected galilean, x-translation, t-translation or scaling)");
}

OrbitReport orbit_residual(const PdeInstance& pde, const std::function<double(double)>& ic,
                           const PointTransformation& tr, const SolveConfig& c, const PdeInstance* second_leg) {
  std::vector<double> u0(c.N);
  for (int j = 0; j < c.N; ++j) u0[j] = ic(c.L * j / c.N);

  DiscreteSolution start;
  start.L = c.L;
  start.N = c.N;
  start.times = {c.t0};
  start.values = {u0};
  DiscreteSolution image0 = transform_solution(start, tr);
  double t_end_image = eval_at(tr.T, "t", c.t_end);

  const PdeInstance& other = second_leg ? *second_leg : pde;
  auto leg1 = std::async(std::launch::async, [&] { return solve_from(pde, u0, c); });
  SolveConfig c2 = c;
  c2.L = image0.L;
  c2.t0 = image0.times.front();
  c2.t_end = t_end_image;
  if (c.dt > 0) c2.dt = c.dt * std::abs(t_end_image - c2.t0) / std::max(c.t_end - c.t0, 1e-300);
  DiscreteSolution b = solve_from(other, image0.values.front(), c2);
  DiscreteSolution raw = leg1.get();
  DiscreteSolution a = transform_solution(raw, tr);

  const std::vector<double>& ua = a.values.back();
  const std::vector<double>& ub = b.values.back();
  double diff = 0;
  for (int j = 0; j < c.N; ++j) diff = std::max(diff, std::abs(ua[j] - ub[j]));
  OrbitReport rep;
  rep.residual = diff / std::max(max_abs(ub), 1e-300);
  rep.t_end_image = t_end_image;
  std::size_t last = raw.values.size() - 1;
  rep.mass_drift = std::max(std::abs(raw.mass(last) - raw.mass(0)), std::abs(b.mass(b.values.size() - 1) - b.mass(0)));
  return rep;
}

void write_text(const DiscreteSolution& sol, std::ostream& out) {
  out.precision(17);
  out << "# t x u\n";
  for (std::size_t i = 0; i < sol.times.size(); ++i)
    for (int j = 0; j < sol.N; ++j) out << sol.times[i] << ' ' << sol.L * j / sol.N << ' ' << sol.values[i][j] << '\n';
}

void write_binary(const DiscreteSolution& sol, std::ostream& out) {
  std::int64_t n = sol.N, m = static_cast<std::int64_t>(sol.times.size());
  out.write(reinterpret_cast<const char*>(&sol.L), sizeof(double));
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    out.write(reinterpret_cast<const char*>(&sol.times[i]), sizeof(double));
    out.write(reinterpret_cast<const char*>(sol.values[i].data()), static_cast<std::streamsize>(sizeof(double) * n));
  }
}

DiscreteSolution read_binary(std::istream& in) {
  DiscreteSolution sol;
  std::int64_t n = 0, m = 0;
  in.read(reinterpret_cast<char*>(&sol.L), sizeof(double));
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || n <= 0 || m < 0) throw InputError("malformed solution file");
  sol.N = static_cast<int>(n);
  for (std::int64_t i = 0; i < m; ++i) {
    double t = 0;
    std::vector<double> row(n);
    in.read(reinterpret_cast<char*>(&t), sizeof t);
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) throw InputError("truncated solution file");
    sol.times.push_back(t);
    sol.values.push_back(std::move(row));
  }
  return sol;
}

}  // namespace symkawa
