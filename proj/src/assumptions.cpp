#include "symkawa/assumptions.hpp"

#include <cctype>

namespace symkawa {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Assumptions Assumptions::parse(const std::vector<std::string>& facts) {
  Assumptions a;
  for (const auto& raw : facts) {
    std::string f = trim(raw);
    if (f.empty()) continue;
    if (auto p = f.find("!="); p != std::string::npos && trim(f.substr(p + 2)) == "0") {
      a.assume_nonzero(trim(f.substr(0, p)));
    } else if (auto q = f.find('>'); q != std::string::npos && trim(f.substr(q + 1)) == "0") {
      a.assume_positive(trim(f.substr(0, q)));
    } else if (auto r = f.find('='); r != std::string::npos && trim(f.substr(r + 1)) == "0") {
      a.assume_zero(trim(f.substr(0, r)));
    } else {
      throw InputError("unsupported assumption '" + raw + "' (expected name>0, name!=0 or name=0)");
    }
  }
  return a;
}

void Assumptions::check(const std::string& name) const {
  if (zero_.count(name) && (positive_.count(name) || nonzero_.count(name)))
    throw InputError("inconsistent assumptions on '" + name + "'");
}

void Assumptions::assume_positive(const std::string& name) {
  positive_.insert(name);
  check(name);
}
void Assumptions::assume_nonzero(const std::string& name) {
  nonzero_.insert(name);
  check(name);
}
void Assumptions::assume_zero(const std::string& name) {
  zero_.insert(name);
  check(name);
}

void Assumptions::merge(const Assumptions& o) {
  for (const auto& n : o.positive_) assume_positive(n);
  for (const auto& n : o.nonzero_) assume_nonzero(n);
  for (const auto& n : o.zero_) assume_zero(n);
}

std::vector<std::string> Assumptions::facts() const {
  std::vector<std::string> out;
  for (const auto& n : positive_) out.push_back(n + ">0");
  for (const auto& n : nonzero_)
    if (!positive_.count(n)) out.push_back(n + "!=0");
  for (const auto& n : zero_) out.push_back(n + "=0");
  return out;
}

}  // namespace symkawa
