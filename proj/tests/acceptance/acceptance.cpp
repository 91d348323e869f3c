// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "symkawa/classify.hpp"
#include "symkawa/equiv.hpp"
#include "symkawa/numcheck.hpp"

using namespace symkawa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Outcome table_criterion(int table, const std::vector<int>& dims, double budget) {
  auto start = std::chrono::steady_clock::now();
  std::vector<CaseReport> reports = verify_table(table);
  double secs = seconds_since(start);
  std::ostringstream s;
  bool ok = reports.size() == dims.size() && secs < budget;
  s << "dimensions";
  for (const CaseReport& r : reports) {
    bool exact = r.pass;
    for (const FieldCheck& f : r.fields) exact = exact && f.verdict == Verdict::Yes;
    for (const CommutatorCheck& c : r.commutators) exact = exact && c.closed && c.constants_free;
    exact = exact && r.dimension == dims[r.number] && r.basis_size == dims[r.number];
    ok = ok && exact;
    s << " " << r.dimension << (exact ? "" : "!");
  }
  s << "; " << reports.size() << " cases, verification " << secs << " s < " << budget << " s";
  return {ok, s.str()};
}

const EquivGroup kGroups[] = {EquivGroup::Full, EquivGroup::FullExtended, EquivGroup::LinearB, EquivGroup::NonlinearGauged, EquivGroup::LinearGauged};

std::vector<GroupElement> sampled_elements(EquivGroup g, int n) {
  std::mt19937_64 rng(1000 + static_cast<int>(g));
  std::vector<GroupElement> out;
  for (int i = 0; i < n; ++i) out.push_back(random_group_element(g, rng));
  return out;
}

bool contains_equation(const DeterminingSystem& sys, const std::string& text) {
  Poly ref = canonical(to_poly(parse(text)));
  for (const DetEquation& e : sys.equations)
    if (canonical(e.lhs - ref).is_zero() || canonical(e.lhs + ref).is_zero()) return true;
  return false;
}

double gaussian(double x) {
  double c = 10 * std::numbers::pi;
  return std::exp(-(x - c) * (x - c));
}

}  // namespace

int main() {
  report(1, "Table 1 rows verify exactly with symbolic n, rho, lambda, delta", [] {
    return table_criterion(1, {1, 2, 2, 2, 3, 3, 2, 2, 2, 2}, 120);
  });

  report(2, "Table 2 rows verify exactly, including symbolic nu", [] {
    return table_criterion(2, {2, 3, 3, 3, 3}, 60);
  });

  report(3, "closed-form equivalence groups agree with the direct method", [] {
    int agree = 0, total = 0;
    std::string first_failure;
    for (EquivGroup g : kGroups) {
      PdeInstance pde = PdeInstance::symbolic(group_class(g));
      for (const GroupElement& e : sampled_elements(g, 20)) {
        ++total;
        Agreement a = compare_with_direct(equiv_group_image(e, pde), apply_point_transformation(induced(e, pde), pde),
                                          pde.assumptions());
        if (a.ok) ++agree;
        else if (first_failure.empty()) first_failure = "; first mismatch " + e.str();
      }
    }
    return Outcome{agree == total && total == 100,
                   std::to_string(agree) + "/" + std::to_string(total) + " pairs agree" + first_failure};
  });

  report(4, "admissible systems contain the reference relations and admit every group element", [] {
    DeterminingSystem full = derive_admissible_system(AdmissibleBranch::Full);
    DeterminingSystem nl = derive_admissible_system(AdmissibleBranch::Nonlinear);
    DeterminingSystem lin = derive_admissible_system(AdmissibleBranch::Linear);
    int found = 0;
    for (const char* r : {"diff(U1(t,x),x,1)", "beta_n(t)*diff(T(t),t,1) - beta(t)*X1(t)^3",
                          "sigma_n(t)*diff(T(t),t,1) - sigma(t)*X1(t)^5"})
      found += contains_equation(full, r);
    for (const char* r : {"diff(X1(t),t,1)", "diff(U1(t),t,1)", "diff(U0(t,x),x,1)", "diff(U0(t),t,1)"})
      found += contains_equation(nl, r);
    found += contains_equation(lin, "alpha_n(t)*U1(t)*diff(T(t),t,1) - alpha(t)*X1(t)");
    int ok = 0, total = 0;
    for (EquivGroup g : kGroups) {
      DeterminingSystem sys = derive_admissible_system(admissible_branch(g));
      for (const GroupElement& e : sampled_elements(g, 20)) {
        ++total;
        ok += check_admissible(sys, e).ok;
      }
    }
    return Outcome{found == 8 && ok == total, std::to_string(found) + "/8 reference relations, " + std::to_string(ok) +
                                                  "/" + std::to_string(total) + " elements satisfy their system"};
  });

  report(5, "ansatz reduction of the gauged class and its refinement", [] {
    AnsatzReport r = verify_ansatz_reduction(PdeClass::NonlinearGauged);
    AnsatzReport bad = verify_ansatz_reduction(PdeClass::NonlinearGauged, true);
    int matched = 0;
    for (const AnsatzMatch& m : r.groups) matched += !m.matched.empty();
    bool ok = r.ok && r.missing.empty() && r.refined && r.reduced_matches && !bad.ok;
    return Outcome{ok, std::to_string(matched) + " groups matched, refinement " +
                           (r.reduced_matches ? "matches" : "differs") + ", corrupted ansatz " +
                           (bad.ok ? "NOT detected" : "detected")};
  });

  report(6, "reducibility criterion with verified witnesses and named violations", [] {
    Assumptions pos = Assumptions::parse({"t>0"});
    auto make = [&](const char* f, const char* a, const char* b, const char* s) {
      return PdeInstance(PdeClass::Full, parse(f), parse(a), parse(b), parse(s), 0, pos);
    };
    std::vector<PdeInstance> yes = {make("u^2", "t", "t", "t"), make("u^3+u^2", "t^2", "2*t^2", "t^2"),
                                    make("u", "1", "t", "t^3")};
    std::vector<PdeInstance> no = {make("u^2", "1", "1", "t"), make("u^2", "1", "t", "1"),
                                   make("u", "1", "t^2", "1")};
    int good = 0;
    bool branches[2] = {false, false};
    for (const PdeInstance& p : yes) {
      ReducibilityVerdict v = check_reducibility(p);
      if (v.reducible && v.witness && witness_constant(*v.witness, p)) {
        ++good;
        branches[v.nonlinear_branch] = true;
      }
    }
    for (const PdeInstance& p : no) {
      ReducibilityVerdict v = check_reducibility(p);
      bool named = false;
      for (const ReducibilityCondition& c : v.conditions) named = named || (c.verdict == ZeroVerdict::Nonzero && !c.name.empty());
      good += !v.reducible && !v.inconclusive && named;
    }
    return Outcome{good == 6 && branches[0] && branches[1], std::to_string(good) + "/6 instances decided correctly"};
  });

  report(7, "kernel algebras on random off-table instances", [] {
    std::ostringstream s;
    bool ok = true;
    for (PdeClass c : {PdeClass::Full, PdeClass::NonlinearGauged, PdeClass::LinearGauged}) {
      KernelReport r = verify_kernel(c, 20, 0);
      int wrong = 0, checks = 0;
      for (const KernelSample& k : r.samples) {
        for (const FieldCheck& f : k.expected_yes) wrong += f.verdict != Verdict::Yes, ++checks;
        for (const FieldCheck& f : k.expected_no) wrong += f.verdict != Verdict::No, ++checks;
      }
      ok = ok && r.ok && wrong == 0 && r.samples.size() >= 20;
      s << class_name(c) << " " << r.samples.size() << " instances, " << wrong << "/" << checks << " false; ";
    }
    return Outcome{ok, s.str().substr(0, s.str().size() - 2)};
  });

  report(8, "determining systems agree with the direct invariance test", [] {
    std::mt19937_64 rng(8);
    const char* fs[] = {"u^2", "u^3+u", "exp(u)", "u^2+u^5"};
    const char* coeffs[] = {"1", "t", "t^2+1", "exp(t)", "2"};
    const char* fields[] = {"0;1;0", "1;0;0", "t;x;0", "0;t;1", "3*t;x;-2*u", "0;0;u", "3*t;3*x;-6*u", "3;x;2"};
    int agree = 0, yes = 0;
    for (int i = 0; i < 50; ++i) {
      PdeClass cls = rng() % 2 ? PdeClass::NonlinearGauged : PdeClass::LinearGauged;
      Expr f = cls == PdeClass::LinearGauged ? Expr::u() : parse(fs[rng() % 4]);
      PdeInstance pde(cls, f, 1, parse(coeffs[rng() % 5]), parse(coeffs[rng() % 5]));
      VectorField vf = VectorField::parse(fields[rng() % 8]);
      Verdict direct = is_symmetry(vf, pde);
      Verdict split = check_satisfies(derive_determining(pde), vf);
      agree += direct == split;
      yes += direct == Verdict::Yes;
    }
    return Outcome{agree == 50, std::to_string(agree) + "/50 pairs agree (" + std::to_string(yes) + " symmetries)"};
  });

  report(9, "Galilean orbit transport on the gauged linear class", [] {
    auto start = std::chrono::steady_clock::now();
    PdeInstance pde(PdeClass::LinearGauged, Expr::u(), 1, 1, 1);
    PdeInstance perturbed(PdeClass::LinearGauged, Expr::u(), 1, 1, parse("11/10"));
    SolveConfig c;
    c.N = 256;
    c.L = 2 * std::numbers::pi * 10;
    c.t_end = 0.1;
    PointTransformation tr = orbit_transformation("galilean", 0.3);
    OrbitReport r = orbit_residual(pde, gaussian, tr, c);
    OrbitReport bad = orbit_residual(pde, gaussian, tr, c, &perturbed);
    double secs = seconds_since(start);
    std::ostringstream s;
    s << "residual " << r.residual << ", mass drift " << r.mass_drift << ", perturbed residual " << bad.residual;
    return Outcome{r.residual < 1e-6 && r.mass_drift < 1e-10 && bad.residual > 1e-3 && secs < 30, s.str()};
  });

  return failures == 0 ? 0 : 1;
}
