#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "symkawa/classify.hpp"
#include "symkawa/cli.hpp"
#include "symkawa/io.hpp"
#include "symkawa/numcheck.hpp"

namespace py = pybind11;
using namespace symkawa;

namespace {

PdeInstance pde_arg(const std::string& text) { return pde_from_json(json::parse(text)); }

Assumptions assume_arg(const std::vector<std::string>& facts) { return Assumptions::parse(facts); }

py::array_t<double> as_array(const std::vector<std::vector<double>>& rows) {
  std::size_t m = rows.size(), n = m ? rows[0].size() : 0;
  py::array_t<double> out({m, n});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = rows[i][j];
  return out;
}

// The solvers run with the GIL released; the initial condition is sampled on
// the calling thread.
std::function<double(double)> with_gil(const std::function<double(double)>& ic) {
  return [&ic](double x) {
    py::gil_scoped_acquire acquire;
    return ic(x);
  };
}

SolveConfig config(double L, int N, double t0, double t_end, double dt, int record_every) {
  SolveConfig c;
  c.L = L;
  c.N = N;
  c.t0 = t0;
  c.t_end = t_end;
  c.dt = dt;
  c.record_every = record_every;
  return c;
}

}  // namespace

PYBIND11_MODULE(_symkawa, m) {
  // Translators run newest first, so the base class goes first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<FormBroken>(m, "FormBroken", base.ptr());
  m.attr("__version__") = engine_version();

  m.def("normalize", [](const std::string& e, const std::vector<std::string>& assume) {
    return normalize(parse(e), assume_arg(assume)).str();
  }, py::arg("expr"), py::arg("assume") = std::vector<std::string>{});
  m.def("diff", [](const std::string& e, const std::string& var, int order, const std::vector<std::string>& assume) {
    return differentiate(parse(e), parse(var), order, assume_arg(assume)).str();
  }, py::arg("expr"), py::arg("var"), py::arg("order") = 1, py::arg("assume") = std::vector<std::string>{});
  m.def("is_zero", [](const std::string& e, const std::vector<std::string>& assume, std::uint64_t seed) {
    return std::string(verdict_name(is_zero(parse(e), assume_arg(assume), seed)));
  }, py::arg("expr"), py::arg("assume") = std::vector<std::string>{}, py::arg("seed") = 0);
  m.def("evaluate", [](const std::string& e, const std::map<std::string, double>& values) {
    NumericEnv env;
    for (const auto& [k, v] : values) env.symbols[k] = v;
    return eval_numeric(parse(e), env);
  });

  m.def("is_symmetry", [](const std::string& pde, const std::string& vf, std::uint64_t seed) {
    PdeInstance p = pde_arg(pde);
    return std::string(verdict_name(is_symmetry(VectorField::parse(vf, p.assumptions()), p, seed)));
  }, py::arg("pde"), py::arg("vf"), py::arg("seed") = 0);
  m.def("invariance_residual", [](const std::string& pde, const std::string& vf) {
    PdeInstance p = pde_arg(pde);
    return to_expr(invariance_residual(VectorField::parse(vf, p.assumptions()), p)).str();
  });
  m.def("commutator", [](const std::string& a, const std::string& b) {
    return commutator(VectorField::parse(a), VectorField::parse(b)).str();
  });

  m.def("table_cases", &table_cases);
  m.def("verify_case", [](int table, int case_no, const std::map<std::string, std::string>& params) {
    std::map<std::string, Expr> values;
    for (const auto& [k, v] : params) values[k] = parse(v);
    CaseReport r = verify_case(lookup_case(table, case_no, values));
    py::dict d;
    d["table"] = r.table;
    d["case"] = r.number;
    d["pass"] = r.pass;
    d["dimension"] = r.dimension;
    py::list fields;
    for (const FieldCheck& f : r.fields) fields.append(py::make_tuple(f.field, verdict_name(f.verdict)));
    d["fields"] = fields;
    return d;
  }, py::arg("table"), py::arg("case"), py::arg("params") = std::map<std::string, std::string>{});

  m.def("reducible", [](const std::string& pde) {
    ReducibilityVerdict v = check_reducibility(pde_arg(pde));
    py::dict d;
    d["reducible"] = v.reducible;
    d["inconclusive"] = v.inconclusive;
    py::list conds;
    for (const ReducibilityCondition& c : v.conditions)
      conds.append(py::make_tuple(c.name, c.value.str(), verdict_name(c.verdict)));
    d["conditions"] = conds;
    d["witness"] = v.witness ? py::object(py::str(v.witness->str())) : py::object(py::none());
    return d;
  });

  m.def("solve", [](const std::string& pde, const std::function<double(double)>& ic, double L, int N, double t0,
                    double t_end, double dt, int record_every) {
    DiscreteSolution s = [&] {
      py::gil_scoped_release release;
      return solve(pde_arg(pde), with_gil(ic), config(L, N, t0, t_end, dt, record_every));
    }();
    return py::make_tuple(s.times, as_array(s.values), s.L);
  }, py::arg("pde"), py::arg("ic"), py::arg("L") = SolveConfig{}.L, py::arg("N") = 256, py::arg("t0") = 0.0,
     py::arg("t_end") = 0.1, py::arg("dt") = 0.0, py::arg("record_every") = 0);

  m.def("orbit_residual", [](const std::string& pde, const std::function<double(double)>& ic,
                             const std::string& family, double epsilon, double rho, double L, int N, double t_end,
                             const std::string& second_leg) {
    PdeInstance p = pde_arg(pde);
    std::optional<PdeInstance> second;
    if (!second_leg.empty()) second = pde_arg(second_leg);
    PointTransformation tr = orbit_transformation(family, epsilon, rho);
    OrbitReport r;
    {
      py::gil_scoped_release release;
      r = orbit_residual(p, with_gil(ic), tr, config(L, N, 0, t_end, 0, 0), second ? &*second : nullptr);
    }
    return py::make_tuple(r.residual, r.mass_drift);
  }, py::arg("pde"), py::arg("ic"), py::arg("family") = "galilean", py::arg("epsilon") = 0.3, py::arg("rho") = 1.0,
     py::arg("L") = SolveConfig{}.L, py::arg("N") = 256, py::arg("t_end") = 0.1, py::arg("second_leg") = "");

  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
