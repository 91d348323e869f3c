#include "symkawa/classify.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>

namespace symkawa {

namespace detail {
extern const std::string_view kTablesText;
}

namespace {

struct RawCase {
  int table = 0, number = 0;
  std::string cls, f, beta, sigma;
  std::vector<std::string> constraints, assume, notes, basis;
};

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<RawCase> parse_tables() {
  std::vector<RawCase> rows;
  std::istringstream in{std::string(detail::kTablesText)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      RawCase r;
      if (std::sscanf(s.c_str(), "[table %d case %d]", &r.table, &r.number) != 2)
        throw Error("tables: bad header on line " + std::to_string(lineno));
      rows.push_back(std::move(r));
      continue;
    }
    std::size_t colon = s.find(':');
    if (colon == std::string::npos || rows.empty()) throw Error("tables: bad line " + std::to_string(lineno));
    std::string key = trim(std::string_view(s).substr(0, colon));
    std::string value = trim(std::string_view(s).substr(colon + 1));
    RawCase& r = rows.back();
    if (key == "class") r.cls = value;
    else if (key == "f") r.f = value;
    else if (key == "beta") r.beta = value;
    else if (key == "sigma") r.sigma = value;
    else if (key == "constraint") r.constraints.push_back(value);
    else if (key == "assume") r.assume.push_back(value);
    else if (key == "note") r.notes.push_back(value);
    else if (key == "basis") r.basis.push_back(value);
    else throw Error("tables: unknown key '" + key + "' on line " + std::to_string(lineno));
  }
  return rows;
}

const std::vector<RawCase>& tables() {
  static const std::vector<RawCase> rows = parse_tables();
  return rows;
}

void collect_parameters(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::Parameter: out.insert(e.name()); break;
    case ExprKind::Function:
    case ExprKind::Elementary:
    case ExprKind::Pow:
    case ExprKind::Mul:
    case ExprKind::Add:
      for (const Expr& o : e.operands()) collect_parameters(o, out);
      break;
    default: break;
  }
}

ParamConstraint parse_constraint(const std::string& text) {
  std::size_t ne = text.find("!=");
  if (ne == std::string::npos) throw Error("tables: bad constraint '" + text + "'");
  Expr v = parse(text.substr(ne + 2));
  if (!v.is_number()) throw Error("tables: constraint value must be a number in '" + text + "'");
  return {trim(std::string_view(text).substr(0, ne)), v.number()};
}

std::vector<std::string> split_components(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == ';') {
      parts.push_back(trim(std::string_view(text).substr(start, i - start)));
      start = i + 1;
    }
  return parts;
}

// Rows of the coefficient matrix: the parameter-only coefficients of each
// (component, t/x/u monomial) pair.
struct MonoLess {
  bool operator()(const std::pair<int, Monomial>& a, const std::pair<int, Monomial>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return a.second.compare(b.second) < 0;
  }
};

using Row = std::vector<Poly>;

std::vector<Row> coefficient_rows(const std::vector<VectorField>& cols) {
  std::map<std::pair<int, Monomial>, Row, MonoLess> rows;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Poly* comps[3] = {&cols[c].tau, &cols[c].xi, &cols[c].eta};
    for (int k = 0; k < 3; ++k) {
      for (const Term& t : comps[k]->terms()) {
        std::vector<Factor> dep, rest;
        for (const Factor& f : t.mono.factors())
          ((f.kernel->deps & (kDepT | kDepX | kDepU)) ? dep : rest).push_back(f);
        auto key = std::make_pair(k, Monomial(std::move(dep)));
        Row& r = rows[key];
        if (r.empty()) r.assign(cols.size(), Poly());
        r[c] += Poly::from_monomial(Monomial(std::move(rest)), t.coeff);
      }
    }
  }
  std::vector<Row> out;
  for (auto& [k, r] : rows) {
    for (Poly& p : r) p = canonical(p);
    out.push_back(std::move(r));
  }
  return out;
}

// Gaussian elimination over rational functions of the parameters.  Returns
// the pivot column of each reduced row.
std::vector<int> eliminate(std::vector<Row>& m, int ncols) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t best = m.size();
    for (std::size_t i = r; i < m.size(); ++i) {
      if (m[i][c].is_zero()) continue;
      if (best == m.size() || (m[i][c].as_constant() && !m[best][c].as_constant())) best = i;
    }
    if (best == m.size()) continue;
    std::swap(m[r], m[best]);
    Poly inv = reciprocal(m[r][c]);
    for (Poly& p : m[r]) p = canonical(p * inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      Poly factor = m[i][c];
      for (std::size_t k = 0; k < m[i].size(); ++k) m[i][k] = canonical(m[i][k] - factor * m[r][k]);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

Expr component_expr(const std::string& text, const std::vector<Binding>& bindings) {
  Expr e = parse(text);
  return bindings.empty() ? e : substitute(e, bindings);
}

std::string join_field(const Expr& a, const Expr& b, const Expr& c) {
  return a.str() + "; " + b.str() + "; " + c.str();
}

}  // namespace

PdeInstance ClassificationCase::pde() const { return PdeInstance(cls, f, Expr(1), beta, sigma, Expr(0), assume); }

std::string ClassificationCase::label() const {
  return "table " + std::to_string(table) + " case " + std::to_string(number);
}

std::vector<int> table_cases(int table) {
  std::vector<int> out;
  for (const RawCase& r : tables())
    if (r.table == table) out.push_back(r.number);
  if (out.empty()) throw InputError("unknown table " + std::to_string(table) + " (expected 1 or 2)");
  return out;
}

ClassificationCase lookup_case(int table, int case_no, const std::map<std::string, Expr>& params) {
  const RawCase* raw = nullptr;
  for (const RawCase& r : tables())
    if (r.table == table && r.number == case_no) raw = &r;
  if (!raw) throw InputError("unknown case " + std::to_string(case_no) + " of table " + std::to_string(table));

  ClassificationCase c;
  c.table = table;
  c.number = case_no;
  c.cls = parse_class(raw->cls);
  c.notes = raw->notes;
  for (const std::string& s : raw->constraints) c.constraints.push_back(parse_constraint(s));

  std::set<std::string> known;
  Expr f0 = parse(raw->f), b0 = parse(raw->beta), s0 = parse(raw->sigma);
  for (const Expr* e : {&f0, &b0, &s0}) collect_parameters(*e, known);
  std::vector<std::vector<std::string>> comps;
  for (const std::string& b : raw->basis) {
    comps.push_back(split_components(b));
    for (const std::string& p : comps.back()) collect_parameters(parse(p), known);
  }
  for (const ParamConstraint& k : c.constraints) known.insert(k.name);

  std::vector<Binding> bindings;
  for (const auto& [name, value] : params) {
    if (!known.count(name)) throw InputError(c.label() + " has no parameter '" + name + "'");
    std::set<std::string> inner;
    collect_parameters(value, inner);
    if (!inner.empty()) throw InputError("parameter values must be constants");
    for (const ParamConstraint& k : c.constraints)
      if (k.name == name && value.is_number() && value.number() == k.excluded)
        throw InputError(c.label() + " requires " + name + " != " + k.excluded.get_str());
    bindings.push_back({Expr::parameter(name), value});
  }

  c.assume = Assumptions::parse(raw->assume);
  for (const ParamConstraint& k : c.constraints)
    if (k.excluded == 0 && !params.count(k.name)) c.assume.assume_nonzero(k.name);

  auto sub = [&](const Expr& e) { return bindings.empty() ? e : substitute(e, bindings, c.assume); };
  c.f = sub(f0);
  c.beta = sub(b0);
  c.sigma = sub(s0);
  for (const auto& parts : comps) {
    if (parts.size() != 3) throw Error("tables: basis field needs three components in " + c.label());
    Expr tau = component_expr(parts[0], bindings), xi = component_expr(parts[1], bindings),
         eta = component_expr(parts[2], bindings);
    c.basis_text.push_back(join_field(tau, xi, eta));
    c.basis.push_back(VectorField::from_exprs(tau, xi, eta, c.assume));
  }
  return c;
}

std::optional<std::vector<Poly>> express_in_span(const std::vector<VectorField>& basis, const VectorField& target) {
  std::vector<VectorField> cols = basis;
  cols.push_back(target);
  std::vector<Row> m = coefficient_rows(cols);
  int n = static_cast<int>(basis.size());
  std::vector<int> pivots = eliminate(m, n);
  for (std::size_t i = pivots.size(); i < m.size(); ++i)
    if (!m[i][n].is_zero()) return std::nullopt;
  std::vector<Poly> coeffs(n);
  for (std::size_t i = 0; i < pivots.size(); ++i) coeffs[pivots[i]] = m[i][n];

  VectorField sum{Poly(), Poly(), Poly()};
  for (int k = 0; k < n; ++k) sum = sum + basis[k].scaled(coeffs[k]);
  VectorField diff = sum + target.scaled(Poly(-1));
  if (!diff.is_zero()) return std::nullopt;
  return coeffs;
}

int span_rank(const std::vector<VectorField>& basis) {
  std::vector<Row> m = coefficient_rows(basis);
  return static_cast<int>(eliminate(m, static_cast<int>(basis.size())).size());
}

CaseReport verify_case(const ClassificationCase& c, std::uint64_t seed) {
  CaseReport rep;
  rep.table = c.table;
  rep.number = c.number;
  rep.basis_size = static_cast<int>(c.basis.size());
  PdeInstance pde = c.pde();
  bool ok = true;
  for (std::size_t i = 0; i < c.basis.size(); ++i) {
    Poly r = invariance_residual(c.basis[i], pde);
    FieldCheck fc{c.basis_text[i], verdict_of(r, c.assume, seed), to_expr(r)};
    ok = ok && fc.verdict == Verdict::Yes;
    rep.fields.push_back(std::move(fc));
  }
  for (std::size_t i = 0; i < c.basis.size(); ++i) {
    for (std::size_t j = i + 1; j < c.basis.size(); ++j) {
      CommutatorCheck cc;
      cc.i = static_cast<int>(i);
      cc.j = static_cast<int>(j);
      VectorField br = commutator(c.basis[i], c.basis[j]);
      cc.bracket = br.str();
      if (auto coeffs = express_in_span(c.basis, br)) {
        cc.closed = true;
        cc.constants_free = true;
        for (const Poly& k : *coeffs) {
          cc.coefficients.push_back(to_expr(k));
          if (!is_function_of(k, kDepParam)) cc.constants_free = false;
        }
      }
      ok = ok && cc.closed && cc.constants_free;
      rep.commutators.push_back(std::move(cc));
    }
  }
  rep.dimension = span_rank(c.basis);
  rep.pass = ok && rep.dimension == rep.basis_size;
  return rep;
}

std::vector<CaseReport> verify_table(int table, const std::map<std::string, Expr>& params, int jobs,
                                     std::uint64_t seed) {
  std::vector<int> cases = table_cases(table);
  std::vector<ClassificationCase> rows;
  for (int n : cases) {
    std::map<std::string, Expr> own;
    ClassificationCase probe = lookup_case(table, n);
    std::set<std::string> names;
    for (const ParamConstraint& k : probe.constraints) names.insert(k.name);
    for (const Expr* e : {&probe.f, &probe.beta, &probe.sigma}) collect_parameters(*e, names);
    for (const std::string& b : probe.basis_text)
      for (const std::string& p : split_components(b)) collect_parameters(parse(p), names);
    for (const auto& [k, v] : params)
      if (names.count(k)) own[k] = v;
    rows.push_back(own.empty() ? std::move(probe) : lookup_case(table, n, own));
  }

  std::vector<CaseReport> out(rows.size());
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(rows.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rows.size());
  auto worker = [&] {
    for (std::size_t i; (i = next++) < rows.size();) {
      try {
        out[i] = verify_case(rows[i], seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

bool certainly_off_table(const PdeInstance& pde) {
  // With D = (1/alpha) d/dt, the classifying equations
  //   tau D(sigma) = (5 xi1 - D(tau)) sigma,  tau D(beta) = (3 xi1 - D(tau)) beta
  // force tau = c (sigma^3 / beta^5)^(1/2) and xi1 = (tau D(beta) / beta + D(tau)) / 3.
  // An extension needs D(xi1) = 0 when f_uu != 0, and D^2(xi1) = D^3(tau) = 0
  // in the linear class.
  const Assumptions& a = pde.assumptions();
  Kernel t = var_kernel(VarId::T);
  Poly inv_alpha = reciprocal(pde.alpha_poly());
  auto D = [&](const Poly& p) { return canonical(partial(p, t) * inv_alpha); };
  const Poly& beta = pde.beta_poly();
  const Poly& sigma = pde.sigma_poly();
  Poly ratio = canonical(power(sigma, 3) * reciprocal(power(beta, 5)));
  Poly tau = canonical(power(ratio, LinExp(Rational(1, 2)), a));
  Poly xi1 = canonical((tau * D(beta) * reciprocal(beta) + D(tau)) * Poly(Rational(1, 3)));
  Poly d1 = D(xi1);
  if (!is_linear_class(pde.cls())) return is_zero(d1, a) == ZeroVerdict::Nonzero;
  return is_zero(D(d1), a) == ZeroVerdict::Nonzero || is_zero(D(D(D(tau))), a) == ZeroVerdict::Nonzero;
}

namespace {

Rational random_half(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  int k = 0;
  while (k == 0) k = d(rng);
  Rational r(k, 2);
  r.canonicalize();
  return r;
}

// 1 + sum c_k t^k with positive c_k and the given degree.
Expr random_positive_poly(std::mt19937_64& rng, int degree) {
  Expr p(1);
  std::bernoulli_distribution keep(0.6);
  for (int k = 1; k <= degree; ++k)
    if (k == degree || keep(rng)) p = p + Expr(random_half(rng, 1, 6)) * pow(Expr::t(), Expr(k));
  return p;
}

Expr random_nonlinearity(std::mt19937_64& rng) {
  Expr u = Expr::u();
  Expr f = pow(u, Expr(2)) + Expr(random_half(rng, -6, 6)) * pow(u, Expr(3));
  if (std::bernoulli_distribution(0.5)(rng)) f = f + Expr(random_half(rng, -6, 6)) * pow(u, Expr(5));
  return f;
}

VectorField field(const char* text) { return VectorField::parse(text); }

}  // namespace

KernelReport verify_kernel(PdeClass cls, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw InputError("sample count must be at least 1");
  if (cls == PdeClass::LinearB)
    throw InputError("kernel checks cover the full, nonlinear-gauged and linear-gauged classes");
  bool linear = is_linear_class(cls);
  std::vector<std::pair<std::string, VectorField>> yes = {{"0; 1; 0", field("0; 1; 0")}};
  if (linear) yes.push_back({"0; t; 1", field("0; t; 1")});
  std::vector<std::pair<std::string, VectorField>> no;
  for (const char* s : {"1; 0; 0", "t; 0; 0", "0; 0; u"}) no.push_back({s, field(s)});
  no.push_back(linear ? std::make_pair(std::string("t; x; 0"), field("t; x; 0"))
                      : std::make_pair(std::string("0; x; 0"), field("0; x; 0")));

  KernelReport rep;
  rep.cls = cls;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> deg_beta(1, 3), deg_sigma(1, 5), deg_alpha(1, 2);
  Assumptions assume = Assumptions::parse({"t>0"});
  bool all = true;
  while (static_cast<int>(rep.samples.size()) < sample_count) {
    Expr f = linear ? Expr::u() : random_nonlinearity(rng);
    Expr alpha = cls == PdeClass::Full ? random_positive_poly(rng, deg_alpha(rng)) : Expr(1);
    Expr beta = random_positive_poly(rng, deg_beta(rng));
    Expr sigma = random_positive_poly(rng, deg_sigma(rng));
    PdeInstance pde(cls, f, alpha, beta, sigma, Expr(0), assume);
    if (!certainly_off_table(pde)) {
      ++rep.resampled;
      continue;
    }
    std::uint64_t probe_seed = seed + rep.samples.size();
    KernelSample s{pde, {}, {}, true};
    for (const auto& [name, vf] : yes) {
      Poly r = invariance_residual(vf, pde);
      FieldCheck fc{name, verdict_of(r, assume, probe_seed), to_expr(r)};
      s.ok = s.ok && fc.verdict == Verdict::Yes;
      s.expected_yes.push_back(std::move(fc));
    }
    for (const auto& [name, vf] : no) {
      Poly r = invariance_residual(vf, pde);
      FieldCheck fc{name, verdict_of(r, assume, probe_seed), to_expr(r)};
      s.ok = s.ok && fc.verdict == Verdict::No;
      s.expected_no.push_back(std::move(fc));
    }
    all = all && s.ok;
    rep.samples.push_back(std::move(s));
  }
  rep.ok = all;
  return rep;
}

}  // namespace symkawa
