#include "symkawa/io.hpp"

#include <fstream>
#include <sstream>

namespace symkawa {

namespace {

std::string expr_field(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  const json& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw InputError(std::string("field '") + key + "' must be an expression string");
}

Expr parse_field(const std::string& text, const char* key) {
  try {
    return parse(text);
  } catch (const InputError& e) {
    throw InputError(std::string("in field '") + key + "': " + e.what(), e.offset());
  }
}

// Decimal or p/q text to an exact rational.
Rational rational_from_text(const std::string& s) {
  std::string t = s;
  Rational sign = 1;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    if (t[0] == '-') sign = -1;
    t = t.substr(1);
  }
  try {
    if (auto e = t.find_first_of("eE"); e != std::string::npos) {
      Rational m = rational_from_text(t.substr(0, e));
      long ex = std::stol(t.substr(e + 1));
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(ex)));
      Rational r = ex >= 0 ? Rational(m * p) : Rational(m / p);
      r.canonicalize();
      return sign * r;
    }
    if (auto dot = t.find('.'); dot != std::string::npos) {
      std::string digits = t.substr(0, dot) + t.substr(dot + 1);
      mpz_class num(digits.empty() ? "0" : digits), den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, t.size() - dot - 1);
      Rational r(num, den);
      r.canonicalize();
      return sign * r;
    }
    Rational r(t);
    r.canonicalize();
    return sign * r;
  } catch (const std::invalid_argument&) {
    throw InputError("not a rational number: '" + s + "'");
  }
}

Rational rational_field(const json& v, const std::string& key) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) return rational_from_text(v.dump());
  if (v.is_string()) {
    Expr e = parse(v.get<std::string>());
    if (!e.is_number()) throw InputError("parameter '" + key + "' must be a rational number");
    return e.number();
  }
  throw InputError("parameter '" + key + "' must be a number");
}

Assumptions assumptions_field(const json& j) {
  if (!j.contains("assumptions")) return {};
  const json& a = j["assumptions"];
  if (!a.is_array()) throw InputError("'assumptions' must be an array of strings");
  std::vector<std::string> facts;
  for (const json& f : a) {
    if (!f.is_string()) throw InputError("'assumptions' must be an array of strings");
    facts.push_back(f.get<std::string>());
  }
  return Assumptions::parse(facts);
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
}

}  // namespace

PdeInstance pde_from_json(const json& j) {
  require_object(j, "pde");
  for (const auto& [k, v] : j.items())
    if (k != "class" && k != "f" && k != "alpha" && k != "beta" && k != "sigma" && k != "b" && k != "params" &&
        k != "assumptions")
      throw InputError("unknown pde field '" + k + "'");
  bool has_b = j.contains("b") && !j["b"].is_null();
  PdeClass cls = j.contains("class") ? parse_class(j["class"].get<std::string>())
                                     : (has_b ? PdeClass::LinearB : PdeClass::Full);
  Expr f = parse_field(expr_field(j, "f", "u"), "f");
  Expr alpha = parse_field(expr_field(j, "alpha", "1"), "alpha");
  Expr beta = parse_field(expr_field(j, "beta", "1"), "beta");
  Expr sigma = parse_field(expr_field(j, "sigma", "1"), "sigma");
  Expr b = parse_field(expr_field(j, "b", "0"), "b");
  PdeInstance pde(cls, f, alpha, beta, sigma, b, assumptions_field(j));
  if (j.contains("params")) {
    require_object(j["params"], "'params'");
    std::map<std::string, Expr> values;
    for (const auto& [k, v] : j["params"].items()) {
      if (v.is_null()) continue;
      values[k] = v.is_string() ? parse_field(v.get<std::string>(), "params") : Expr(rational_field(v, k));
    }
    pde = pde.with_params(values);
  }
  return pde;
}

json pde_to_json(const PdeInstance& pde) {
  json j = {{"class", class_name(pde.cls())},
            {"f", pde.f().str()},
            {"alpha", pde.alpha().str()},
            {"beta", pde.beta().str()},
            {"sigma", pde.sigma().str()}};
  if (pde.cls() == PdeClass::LinearB) j["b"] = pde.b().str();
  j["assumptions"] = pde.assumptions().facts();
  return j;
}

PointTransformation transformation_from_json(const json& j) {
  require_object(j, "transformation");
  for (const auto& [k, v] : j.items())
    if (k != "T" && k != "X1" && k != "X0" && k != "U1" && k != "U0" && k != "assumptions")
      throw InputError("unknown transformation field '" + k + "'");
  return PointTransformation::from_exprs(
      parse_field(expr_field(j, "T", "t"), "T"), parse_field(expr_field(j, "X1", "1"), "X1"),
      parse_field(expr_field(j, "X0", "0"), "X0"), parse_field(expr_field(j, "U1", "1"), "U1"),
      parse_field(expr_field(j, "U0", "0"), "U0"), assumptions_field(j));
}

json transformation_to_json(const PointTransformation& tr) {
  json j = {{"T", to_expr(tr.T).str()},
            {"X1", to_expr(tr.X1).str()},
            {"X0", to_expr(tr.X0).str()},
            {"U1", to_expr(tr.U1).str()},
            {"U0", to_expr(tr.U0).str()}};
  if (auto f = tr.assume.facts(); !f.empty()) j["assumptions"] = f;
  return j;
}

GroupElement group_element_from_json(const json& j) {
  require_object(j, "group element");
  for (const auto& [k, v] : j.items())
    if (k != "group" && k != "params" && k != "Tfun" && k != "assumptions")
      throw InputError("unknown group element field '" + k + "'");
  if (!j.contains("group") || !j["group"].is_string()) throw InputError("group element needs a 'group' string");
  GroupElement g;
  g.group = parse_group(j["group"].get<std::string>());
  g.assume = assumptions_field(j);
  if (j.contains("params")) {
    require_object(j["params"], "'params'");
    for (const auto& [k, v] : j["params"].items()) g.params[k] = rational_field(v, k);
  }
  if (j.contains("Tfun") && !j["Tfun"].is_null()) {
    Poly T = canonical(to_poly(parse_field(expr_field(j, "Tfun", "t"), "Tfun"), g.assume));
    if (!is_function_of(T, kDepT)) throw InputError("Tfun must depend on t only");
    g.T = T;
  }
  g.validate();
  return g;
}

json group_element_to_json(const GroupElement& g) {
  json params = json::object();
  for (const std::string& k : group_parameters(g.group)) params[k] = g.param(k).get_str();
  json j = {{"group", group_name(g.group)}, {"params", params}, {"Tfun", to_expr(g.T).str()}};
  if (auto f = g.assume.facts(); !f.empty()) j["assumptions"] = f;
  return j;
}

json load_json_argument(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') return json::parse(text);
    std::ifstream in(text);
    if (!in) throw InputError("cannot open '" + text + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what(), static_cast<long>(e.byte) - 1);
  }
}

}  // namespace symkawa
