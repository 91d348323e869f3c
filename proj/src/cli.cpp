#include "symkawa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "symkawa/classify.hpp"
#include "symkawa/io.hpp"
#include "symkawa/numcheck.hpp"

#ifndef SYMKAWA_VERSION
#define SYMKAWA_VERSION "0.0.0"
#endif

namespace symkawa {

const char* engine_version() { return SYMKAWA_VERSION; }

namespace {

constexpr const char* kSchema = "symkawa.report/1";

// Accumulates the report and the outcome of a run.
class Run {
 public:
  json result = json::object();
  std::vector<std::string> text;
  bool accept_probable = false;

  // Records a three-valued outcome; expected is the verdict that counts as
  // verified.
  void verdict(Verdict v, Verdict expected = Verdict::Yes) {
    count(v);
    if (v == Verdict::Probably) {
      if (!accept_probable) probable_ = true;
      else if (expected != Verdict::Yes) failed_ = true;
      return;
    }
    if (v != expected) failed_ = true;
  }
  void zero(ZeroVerdict z) {
    switch (z) {
      case ZeroVerdict::Zero: ++zero_; break;
      case ZeroVerdict::ProbablyZero: ++probably_; break;
      case ZeroVerdict::Nonzero: ++nonzero_; break;
    }
  }
  void fail() { failed_ = true; }
  void inconclusive() { probable_ = true; }
  void line(std::string s) { text.push_back(std::move(s)); }

  int exit_code() const {
    if (failed_) return kFalsified;
    if (probable_) return kInconclusive;
    return kVerified;
  }
  json zero_policy() const { return {{"ZERO", zero_}, {"PROBABLY_ZERO", probably_}, {"NONZERO", nonzero_}}; }

 private:
  void count(Verdict v) {
    zero(v == Verdict::Yes ? ZeroVerdict::Zero : v == Verdict::No ? ZeroVerdict::Nonzero : ZeroVerdict::ProbablyZero);
  }
  bool failed_ = false, probable_ = false;
  int zero_ = 0, probably_ = 0, nonzero_ = 0;
};

std::map<std::string, Expr> parse_assignments(const std::string& text) {
  std::map<std::string, Expr> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw InputError("expected name=value in '" + item + "'");
    std::string name = item.substr(0, eq);
    name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
    Expr v = parse(item.substr(eq + 1));
    out[name] = v;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double numeric_value(const Expr& e, const NumericEnv& env = {}) { return eval_numeric(e, env); }

std::function<double(double)> initial_condition(const std::string& text, double L) {
  Expr e = parse(text);
  return [e, L](double x) {
    NumericEnv env;
    env.symbols["x"] = x;
    env.symbols["L"] = L;
    return eval_numeric(e, env);
  };
}

std::string verdict_str(Verdict v) { return verdict_name(v); }

json field_json(const FieldCheck& f) {
  return {{"field", f.field}, {"verdict", verdict_str(f.verdict)}, {"residual", f.residual.str()}};
}

json case_json(const CaseReport& r) {
  json fields = json::array(), comms = json::array();
  for (const FieldCheck& f : r.fields) fields.push_back(field_json(f));
  for (const CommutatorCheck& c : r.commutators) {
    json coeffs = json::array();
    for (const Expr& k : c.coefficients) coeffs.push_back(k.str());
    comms.push_back({{"i", c.i},
                     {"j", c.j},
                     {"bracket", c.bracket},
                     {"closed", c.closed},
                     {"constants_free", c.constants_free},
                     {"coefficients", coeffs}});
  }
  return {{"table", r.table},   {"case", r.number},       {"pass", r.pass},    {"dimension", r.dimension},
          {"basis_size", r.basis_size}, {"fields", fields}, {"commutators", comms}};
}

json system_json(const DeterminingSystem& sys) {
  json eqs = json::array();
  for (const DetEquation& e : sys.equations) eqs.push_back({{"key", e.key}, {"equation", to_expr(e.lhs).str()}});
  return {{"provenance", sys.provenance}, {"unknowns", sys.unknowns}, {"equations", eqs}};
}

json result_json(const TransformResult& r) {
  json j = {{"G", to_expr(r.G).str()},
            {"B", to_expr(r.B).str()},
            {"S", to_expr(r.S).str()},
            {"G_hat", to_expr(r.G_hat).str()},
            {"alpha_new", to_expr(r.alpha_pull).str()},
            {"f_new", to_expr(r.f_new).str()},
            {"b_new", to_expr(r.b_new).str()}};
  j["image"] = r.image ? pde_to_json(*r.image) : json(nullptr);
  return j;
}

PdeInstance pde_option(const std::string& pde_text, const std::string& cls_text) {
  if (!pde_text.empty()) return pde_from_json(load_json_argument(pde_text));
  if (!cls_text.empty()) return PdeInstance::symbolic(parse_class(cls_text));
  throw InputError("a --pde (or --class for the symbolic class) is required");
}

int env_jobs(int jobs) {
  if (const char* v = std::getenv("SYMKAWA_JOBS")) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw InputError(std::string("SYMKAWA_JOBS must be an integer, got '") + v + "'");
    }
  }
  return jobs;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group analysis of variable-coefficient generalized Kawahara equations", "symkawa"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  std::uint64_t seed = 0;
  bool accept_probable = false;
  int jobs = 0;
  app.add_flag("--json", as_json, "Write the report as JSON");
  app.add_option("--seed", seed, "Seed for numeric zero tests and sampling");
  app.add_flag("--accept-probable", accept_probable, "Treat numerically-zero residuals as zero");
  app.add_option("--jobs", jobs, "Parallel workers for verify-table (SYMKAWA_JOBS overrides)");
  app.set_version_flag("--version", std::string("symkawa ") + engine_version());

  std::string expr_text, var_text = "x", at_text, vf_text, pde_text, cls_text, tr_text, element_text, group_text,
                         branch_text, params_text, ansatz_text, ic_text = "exp(-(x-L/2)^2)", out_path,
                         format = "text", family = "galilean", perturb_text;
  std::vector<std::string> assume;
  int order = 1, samples = 20, table = 0, case_no = -1, N = 256, record_every = 0;
  bool corrupt = false, with_b = false;
  double L = 20 * std::numbers::pi, t0 = 0, t_end = 0.1, dt = 0, epsilon = 0.3, rho = 1, tolerance = 1e-6,
         mass_tolerance = 1e-10;

  auto* c_parse = app.add_subcommand("parse", "Parse and normalize an expression");
  c_parse->add_option("expr", expr_text, "Expression")->required();
  c_parse->add_option("--assume", assume, "Domain facts such as t>0");
  c_parse->add_option("--at", at_text, "Evaluate numerically at name=value,...");

  auto* c_diff = app.add_subcommand("diff", "Differentiate an expression");
  c_diff->add_option("expr", expr_text, "Expression")->required();
  c_diff->add_option("--var", var_text, "Variable, parameter or jet coordinate");
  c_diff->add_option("--order", order, "Derivative order")->check(CLI::NonNegativeNumber);
  c_diff->add_option("--assume", assume, "Domain facts such as t>0");

  auto* c_sym = app.add_subcommand("symmetry", "Decide whether a vector field is a Lie symmetry");
  c_sym->add_option("--pde", pde_text, "PDE instance (JSON text or file)")->required();
  c_sym->add_option("--vf", vf_text, "Vector field \"tau; xi; eta\"")->required();

  auto* c_det = app.add_subcommand("determining", "Derive the determining system");
  c_det->add_option("--pde", pde_text, "PDE instance (JSON text or file)");
  c_det->add_option("--class", cls_text, "Symbolic class instead of an instance");
  c_det->add_option("--vf", vf_text, "Check a vector field against the system");
  c_det->add_option("--ansatz", ansatz_text, "Verify the ansatz reduction for nonlinear-gauged or linear-gauged");
  c_det->add_flag("--corrupt", corrupt, "Use the corrupted ansatz (negative control)");

  auto* c_tr = app.add_subcommand("transform", "Apply a point transformation");
  c_tr->add_option("--pde", pde_text, "PDE instance (JSON text or file)")->required();
  c_tr->add_option("--tr", tr_text, "Transformation (JSON text or file)")->required();

  auto* c_eq = app.add_subcommand("equiv", "Equivalence groups and admissible transformations");
  c_eq->add_option("--element", element_text, "Group element (JSON text or file)");
  c_eq->add_option("--pde", pde_text, "PDE instance (JSON text or file)");
  c_eq->add_option("--group", group_text, "Group name: check random elements");
  c_eq->add_option("--samples", samples, "Random elements per group")->check(CLI::PositiveNumber);
  c_eq->add_option("--admissible", branch_text, "Print the admissible system: full, nonlinear or linear");

  auto* c_gauge = app.add_subcommand("gauge", "Gauge alpha to 1 (and b to 0 in the linear class)");
  c_gauge->add_option("--pde", pde_text, "PDE instance (JSON text or file)")->required();
  c_gauge->add_flag("--with-b", with_b, "Also remove b in the linear class");

  auto* c_red = app.add_subcommand("reducible", "Reducibility to constant coefficients");
  c_red->add_option("--pde", pde_text, "PDE instance (JSON text or file)")->required();

  auto* c_table = app.add_subcommand("verify-table", "Verify classification table rows");
  c_table->add_option("--table", table, "Table 1 or 2 (default both)");
  c_table->add_option("--case", case_no, "Single case number");
  c_table->add_option("--params", params_text, "Parameter values name=value,...");

  auto* c_kernel = app.add_subcommand("verify-kernel", "Check the kernel algebra on random instances");
  c_kernel->add_option("--class", cls_text, "full, nonlinear-gauged or linear-gauged")->required();
  c_kernel->add_option("--samples", samples, "Number of instances")->check(CLI::PositiveNumber);

  auto* c_num = app.add_subcommand("numcheck", "Numerical cross-checks");
  c_num->require_subcommand(1);
  auto add_grid = [&](CLI::App* c) {
    c->add_option("--pde", pde_text, "PDE instance with numeric coefficients")->required();
    c->add_option("--ic", ic_text, "Initial condition in x (L is the domain length)");
    c->add_option("--L", L, "Domain length");
    c->add_option("--N", N, "Grid points (power of two, >= 32)");
    c->add_option("--t0", t0, "Initial time");
    c->add_option("--t-end", t_end, "Final time");
    c->add_option("--dt", dt, "Time step (default from the stability bound)");
  };
  auto* c_solve = c_num->add_subcommand("solve", "Solve on a periodic domain");
  add_grid(c_solve);
  c_solve->add_option("--record-every", record_every, "Store every k-th step");
  c_solve->add_option("--out", out_path, "Write the solution to a file");
  c_solve->add_option("--format", format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  auto* c_orbit = c_num->add_subcommand("orbit", "Transport a solution along a symmetry orbit");
  add_grid(c_orbit);
  c_orbit->add_option("--family", family, "galilean, x-translation, t-translation or scaling");
  c_orbit->add_option("--epsilon", epsilon, "Group parameter");
  c_orbit->add_option("--rho", rho, "Exponent of the scaling family");
  c_orbit->add_option("--perturb", perturb_text, "Element changes for the second leg, e.g. sigma=11/10");
  c_orbit->add_option("--tolerance", tolerance, "Residual bound");
  c_orbit->add_option("--mass-tolerance", mass_tolerance, "Mass drift bound");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }

  Run run;
  run.accept_probable = accept_probable;
  auto started = std::chrono::steady_clock::now();
  std::string command;
  for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();

  try {
    Assumptions a = Assumptions::parse(assume);
    if (*c_parse) {
      Expr e = parse(expr_text);
      Expr n = normalize(e, a);
      run.result = {{"input", expr_text}, {"parsed", e.str()}, {"normalized", n.str()}};
      run.line("normalized: " + n.str());
      if (!at_text.empty()) {
        NumericEnv env;
        for (const auto& [k, v] : parse_assignments(at_text)) env.symbols[k] = numeric_value(v);
        double value = eval_numeric(n, env);
        run.result["value"] = value;
        std::ostringstream s;
        s.precision(17);
        s << value;
        run.line("value: " + s.str());
      }
    } else if (*c_diff) {
      Expr d = differentiate(parse(expr_text), parse(var_text), order, a);
      run.result = {{"input", expr_text}, {"var", var_text}, {"order", order}, {"derivative", d.str()}};
      run.line(d.str());
    } else if (*c_sym) {
      PdeInstance pde = pde_option(pde_text, "");
      VectorField vf = VectorField::parse(vf_text, pde.assumptions());
      Poly r = invariance_residual(vf, pde);
      Verdict v = verdict_of(r, pde.assumptions(), seed);
      run.verdict(v);
      run.result = {{"pde", pde_to_json(pde)}, {"vf", vf.str()}, {"verdict", verdict_str(v)},
                    {"residual", to_expr(r).str()}};
      run.line(pde.str());
      run.line("field " + vf.str() + ": " + verdict_str(v));
      if (v != Verdict::Yes) run.line("residual: " + to_expr(r).str());
    } else if (*c_det) {
      if (!ansatz_text.empty()) {
        AnsatzReport rep = verify_ansatz_reduction(parse_class(ansatz_text), corrupt);
        json groups = json::array();
        for (const AnsatzMatch& m : rep.groups)
          groups.push_back({{"key", m.key}, {"matched", m.matched}, {"equation", m.equation.str()}});
        run.result = {{"class", class_name(rep.cls)}, {"corrupt", corrupt}, {"groups", groups},
                      {"missing", rep.missing}, {"ok", rep.ok}};
        for (const AnsatzMatch& m : rep.groups)
          run.line("[" + m.key + "] " + (m.matched.empty() ? "UNMATCHED " + m.equation.str() : m.matched));
        for (const std::string& m : rep.missing) run.line("missing: " + m);
        if (rep.refined) {
          run.result["refined"] = {{"first_group_vanishes", rep.first_group_vanishes},
                                   {"x_coefficient", rep.x_coefficient.str()},
                                   {"reduced", rep.reduced.str()},
                                   {"reduced_matches", rep.reduced_matches}};
          run.line("x coefficient: " + rep.x_coefficient.str());
          run.line("reduced: " + rep.reduced.str() + (rep.reduced_matches ? " (matches)" : " (MISMATCH)"));
        }
        run.line(rep.ok ? "ansatz reduction verified" : "ansatz reduction FAILED");
        if (!rep.ok) run.fail();
      } else {
        PdeInstance pde = pde_option(pde_text, cls_text);
        DeterminingSystem sys = derive_determining(pde);
        run.result = system_json(sys);
        run.result["pde"] = pde_to_json(pde);
        for (const DetEquation& e : sys.equations) run.line("[" + e.key + "] " + to_expr(e.lhs).str() + " = 0");
        if (!vf_text.empty()) {
          VectorField vf = VectorField::parse(vf_text, pde.assumptions());
          Verdict v = check_satisfies(sys, vf, pde.assumptions(), seed);
          run.verdict(v);
          run.result["vf"] = vf.str();
          run.result["verdict"] = verdict_str(v);
          run.line("field " + vf.str() + ": " + verdict_str(v));
        }
      }
    } else if (*c_tr) {
      PdeInstance pde = pde_option(pde_text, "");
      PointTransformation tr = transformation_from_json(load_json_argument(tr_text));
      run.result = {{"pde", pde_to_json(pde)}, {"transformation", transformation_to_json(tr)}};
      try {
        TransformResult r = apply_point_transformation(tr, pde);
        run.result["result"] = result_json(r);
        run.result["status"] = "OK";
        run.line(tr.str());
        run.line(r.image ? r.image->str()
                         : "G = " + to_expr(r.G).str() + ", B = " + to_expr(r.B).str() + ", S = " + to_expr(r.S).str() +
                               " (no closed-form inverse of T)");
      } catch (const FormBroken& e) {
        run.result["status"] = "FORM_BROKEN";
        run.result["reason"] = e.what();
        run.line(std::string("FORM_BROKEN: ") + e.what());
        run.fail();
      }
    } else if (*c_eq) {
      if (!branch_text.empty()) {
        DeterminingSystem sys = derive_admissible_system(parse_branch(branch_text));
        run.result = system_json(sys);
        for (const DetEquation& e : sys.equations) run.line("[" + e.key + "] " + to_expr(e.lhs).str() + " = 0");
        if (!group_text.empty()) {
          EquivGroup g = parse_group(group_text);
          if (admissible_branch(g) != parse_branch(branch_text))
            throw InputError(std::string(group_name(g)) + " belongs to the " + branch_name(admissible_branch(g)) +
                             " system");
          std::mt19937_64 rng(seed);
          int good = 0;
          json failures = json::array();
          for (int i = 0; i < samples; ++i) {
            GroupElement e = random_group_element(g, rng);
            AdmissibleCheck c = check_admissible(sys, e);
            if (c.ok) ++good;
            else failures.push_back({{"element", group_element_to_json(e)}, {"failing", c.failing}});
          }
          run.result["samples"] = samples;
          run.result["satisfied"] = good;
          run.result["failures"] = failures;
          run.line(std::to_string(good) + "/" + std::to_string(samples) + " elements of " + group_name(g) +
                   " satisfy the system");
          if (good != samples) run.fail();
        }
      } else if (!element_text.empty()) {
        GroupElement g = group_element_from_json(load_json_argument(element_text));
        PdeInstance pde = pde_text.empty() ? PdeInstance::symbolic(group_class(g.group)) : pde_option(pde_text, "");
        ElementImage img = equiv_group_image(g, pde);
        TransformResult direct = apply_point_transformation(induced(g, pde), pde);
        Agreement ag = compare_with_direct(img, direct, pde.assumptions());
        run.result = {{"element", group_element_to_json(g)},
                      {"pde", pde_to_json(pde)},
                      {"transformation", transformation_to_json(induced(g, pde))},
                      {"closed_form",
                       {{"G", to_expr(img.G).str()},
                        {"B", to_expr(img.B).str()},
                        {"S", to_expr(img.S).str()},
                        {"alpha_new", to_expr(img.alpha_pull).str()},
                        {"f_new", to_expr(img.f_new).str()},
                        {"b_new", to_expr(img.b_new).str()}}},
                      {"direct", result_json(direct)},
                      {"agree", ag.ok},
                      {"mismatches", ag.mismatches}};
        if (img.A_new) run.result["closed_form"]["A_new"] = to_expr(*img.A_new).str();
        run.result["image"] = img.image ? pde_to_json(*img.image) : json(nullptr);
        run.line(g.str());
        run.line("closed form: B = " + to_expr(img.B).str() + ", S = " + to_expr(img.S).str() +
                 ", G = " + to_expr(img.G).str());
        if (img.image) run.line("image: " + img.image->str());
        run.line(ag.ok ? "closed form agrees with the direct method" : "MISMATCH in: " + [&] {
          std::string s;
          for (const std::string& m : ag.mismatches) s += (s.empty() ? "" : ", ") + m;
          return s;
        }());
        if (!ag.ok) run.fail();
      } else if (!group_text.empty()) {
        EquivGroup g = parse_group(group_text);
        PdeInstance pde = pde_text.empty() ? PdeInstance::symbolic(group_class(g)) : pde_option(pde_text, "");
        std::mt19937_64 rng(seed);
        int good = 0;
        json failures = json::array();
        for (int i = 0; i < samples; ++i) {
          GroupElement e = random_group_element(g, rng);
          ElementImage img = equiv_group_image(e, pde);
          TransformResult direct = apply_point_transformation(induced(e, pde), pde);
          Agreement ag = compare_with_direct(img, direct, pde.assumptions());
          if (ag.ok) ++good;
          else failures.push_back({{"element", group_element_to_json(e)}, {"mismatches", ag.mismatches}});
        }
        run.result = {{"group", group_name(g)}, {"pde", pde_to_json(pde)}, {"samples", samples},
                      {"agree", good}, {"failures", failures}};
        run.line(std::to_string(good) + "/" + std::to_string(samples) + " elements of " + group_name(g) +
                 " agree with the direct method");
        if (good != samples) run.fail();
      } else {
        throw InputError("equiv needs --element, --group or --admissible");
      }
    } else if (*c_gauge) {
      PdeInstance pde = pde_option(pde_text, "");
      GaugeResult g = with_b ? gauge_alpha_and_b(pde) : gauge_alpha(pde);
      run.result = {{"pde", pde_to_json(pde)},
                    {"transformation", transformation_to_json(g.tr)},
                    {"nonclosed", g.nonclosed},
                    {"beta_over_alpha", to_expr(g.beta_pull).str()},
                    {"sigma_over_alpha", to_expr(g.sigma_pull).str()}};
      run.result["image"] = g.pde ? pde_to_json(*g.pde) : json(nullptr);
      run.line(g.tr.str());
      if (g.pde) run.line("image: " + g.pde->str());
      if (g.nonclosed)
        run.line("NONCLOSED: beta/alpha = " + to_expr(g.beta_pull).str() + ", sigma/alpha = " +
                 to_expr(g.sigma_pull).str() + " in the old time");
    } else if (*c_red) {
      PdeInstance pde = pde_option(pde_text, "");
      ReducibilityVerdict v = check_reducibility(pde);
      json conds = json::array();
      for (const ReducibilityCondition& c : v.conditions) {
        run.zero(c.verdict);
        conds.push_back({{"name", c.name}, {"value", c.value.str()}, {"verdict", verdict_name(c.verdict)}});
        run.line(c.name + " = " + c.value.str() + "  [" + verdict_name(c.verdict) + "]");
      }
      run.result = {{"pde", pde_to_json(pde)},
                    {"branch", v.nonlinear_branch ? "f_uu!=0" : "f_uu=0"},
                    {"reducible", v.reducible},
                    {"inconclusive", v.inconclusive},
                    {"conditions", conds},
                    {"criterion_only", v.criterion_only},
                    {"note", v.note}};
      if (v.witness) {
        run.result["witness"] = transformation_to_json(*v.witness);
        run.result["new_elements"] = {
            {"alpha", v.new_alpha.str()}, {"beta", v.new_beta.str()}, {"sigma", v.new_sigma.str()}};
        run.line("witness: " + v.witness->str());
        run.line("alpha~ = " + v.new_alpha.str() + ", beta~ = " + v.new_beta.str() + ", sigma~ = " +
                 v.new_sigma.str());
      } else {
        run.result["witness"] = nullptr;
      }
      if (!v.note.empty()) run.line("note: " + v.note);
      run.line(v.reducible ? "reducible" : v.inconclusive ? "inconclusive" : "not reducible");
      if (v.inconclusive && !accept_probable) run.inconclusive();
      else if (!v.reducible && !(v.inconclusive && accept_probable)) run.fail();
    } else if (*c_table) {
      std::map<std::string, Expr> params = parse_assignments(params_text);
      std::vector<CaseReport> reports;
      std::vector<int> tables = table == 0 ? std::vector<int>{1, 2} : std::vector<int>{table};
      if (case_no >= 0) {
        if (table == 0) throw InputError("--case needs --table");
        reports.push_back(verify_case(lookup_case(table, case_no, params), seed));
      } else {
        for (int t : tables) {
          auto r = verify_table(t, params, env_jobs(jobs), seed);
          reports.insert(reports.end(), r.begin(), r.end());
        }
      }
      json cases = json::array();
      int passed = 0;
      for (const CaseReport& r : reports) {
        for (const FieldCheck& f : r.fields) run.verdict(f.verdict);
        if (!r.pass && std::none_of(r.fields.begin(), r.fields.end(),
                                    [](const FieldCheck& f) { return f.verdict == Verdict::Probably; }))
          run.fail();
        else if (!r.pass && accept_probable)
          run.fail();
        passed += r.pass;
        cases.push_back(case_json(r));
        std::string s = "table " + std::to_string(r.table) + " case " + std::to_string(r.number) + ": " +
                        (r.pass ? "PASS" : "FAIL") + " (dimension " + std::to_string(r.dimension) + "/" +
                        std::to_string(r.basis_size) + ")";
        run.line(s);
        for (const FieldCheck& f : r.fields)
          if (f.verdict != Verdict::Yes) run.line("  " + f.field + ": " + verdict_str(f.verdict) + " " + f.residual.str());
        for (const CommutatorCheck& c : r.commutators)
          if (!c.closed || !c.constants_free) run.line("  bracket " + c.bracket + " not in the span");
      }
      run.result = {{"cases", cases}, {"passed", passed}, {"total", reports.size()}};
      run.line(std::to_string(passed) + "/" + std::to_string(reports.size()) + " cases pass");
    } else if (*c_kernel) {
      KernelReport rep = verify_kernel(parse_class(cls_text), samples, seed);
      json items = json::array();
      int good = 0;
      for (const KernelSample& s : rep.samples) {
        json yes = json::array(), no = json::array();
        for (const FieldCheck& f : s.expected_yes) {
          run.verdict(f.verdict, Verdict::Yes);
          yes.push_back(field_json(f));
        }
        for (const FieldCheck& f : s.expected_no) {
          run.verdict(f.verdict, Verdict::No);
          no.push_back(field_json(f));
        }
        good += s.ok;
        items.push_back({{"pde", pde_to_json(s.pde)}, {"kernel", yes}, {"probes", no}, {"ok", s.ok}});
        if (!s.ok) run.line("FAIL " + s.pde.str());
      }
      run.result = {{"class", class_name(rep.cls)}, {"samples", items}, {"resampled", rep.resampled},
                    {"ok", rep.ok}};
      run.line(std::to_string(good) + "/" + std::to_string(rep.samples.size()) +
               " random instances have exactly the kernel fields among the probes (" + std::to_string(rep.resampled) +
               " resampled)");
    } else if (*c_num) {
      PdeInstance pde = pde_option(pde_text, "");
      SolveConfig cfg;
      cfg.L = L;
      cfg.N = N;
      cfg.t0 = t0;
      cfg.t_end = t_end;
      cfg.dt = dt;
      auto ic = initial_condition(ic_text, L);
      if (*c_solve) {
        cfg.record_every = record_every;
        DiscreteSolution sol = solve(pde, ic, cfg);
        double drift = std::abs(sol.mass(sol.values.size() - 1) - sol.mass(0));
        double peak = 0;
        for (double v : sol.values.back()) peak = std::max(peak, std::abs(v));
        run.result = {{"pde", pde_to_json(pde)}, {"L", L}, {"N", N}, {"t0", t0}, {"t_end", t_end},
                      {"samples", sol.times.size()}, {"mass_drift", drift}, {"max_abs_final", peak}};
        run.line("mass drift " + std::to_string(drift) + ", max |u(t_end)| = " + std::to_string(peak));
        if (!out_path.empty()) {
          std::ofstream f(out_path, format == "binary" ? std::ios::binary : std::ios::out);
          if (!f) throw InputError("cannot write '" + out_path + "'");
          if (format == "binary") write_binary(sol, f);
          else write_text(sol, f);
          run.result["out"] = out_path;
          run.line("wrote " + out_path);
        }
        if (drift > mass_tolerance) run.fail();
      } else {
        PointTransformation tr = orbit_transformation(family, epsilon, rho);
        std::optional<PdeInstance> second;
        if (!perturb_text.empty()) {
          json j = pde_to_json(pde);
          for (const auto& [k, v] : parse_assignments(perturb_text)) {
            if (k != "f" && k != "alpha" && k != "beta" && k != "sigma" && k != "b")
              throw InputError("--perturb changes f, alpha, beta, sigma or b");
            j[k] = v.str();
          }
          second = pde_from_json(j);
        }
        OrbitReport rep = orbit_residual(pde, ic, tr, cfg, second ? &*second : nullptr);
        bool ok = rep.residual < tolerance && rep.mass_drift < mass_tolerance;
        run.result = {{"pde", pde_to_json(pde)},  {"family", family},          {"epsilon", epsilon},
                      {"transformation", transformation_to_json(tr)},           {"L", L},
                      {"N", N},                   {"t_end", t_end},            {"residual", rep.residual},
                      {"mass_drift", rep.mass_drift}, {"tolerance", tolerance}, {"within_tolerance", ok}};
        if (second) run.result["second_leg"] = pde_to_json(*second);
        std::ostringstream s;
        s << "orbit residual " << rep.residual << ", mass drift " << rep.mass_drift;
        run.line(s.str());
        if (!ok) run.fail();
      }
    }
  } catch (const InputError& e) {
    json j = {{"schema", kSchema}, {"engine", engine_version()}, {"command", args}, {"exit_code", kInputError},
              {"error", e.what()}};
    if (e.offset() >= 0) j["offset"] = e.offset();
    if (as_json) out << j.dump(2) << "\n";
    err << "error: " << e.what();
    if (e.offset() >= 0) err << " (at byte " << e.offset() << ")";
    err << "\n";
    return kInputError;
  } catch (const Error& e) {
    json j = {{"schema", kSchema}, {"engine", engine_version()}, {"command", args}, {"exit_code", kInputError},
              {"error", e.what()}};
    if (as_json) out << j.dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  int code = run.exit_code();
  if (as_json) {
    json j = {{"schema", kSchema},
              {"engine", engine_version()},
              {"command", args},
              {"subcommand", command},
              {"seed", seed},
              {"exit_code", code},
              {"zero_policy", run.zero_policy()},
              {"result", run.result}};
    out << j.dump(2) << "\n";
  } else {
    for (const std::string& l : run.text) out << l << "\n";
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ostringstream s;
    s.precision(3);
    s << std::fixed << secs;
    out << "[" << command << ": exit " << code << ", " << s.str() << " s]\n";
  }
  return code;
}

}  // namespace symkawa
