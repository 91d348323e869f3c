#include <cctype>

#include "symkawa/expr.hpp"

namespace symkawa {

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  long offset;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    long off = static_cast<long>(i);
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      out.push_back({Tok::Number, std::string(s.substr(i, j - i)), off});
      i = j;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), off});
      i = j;
    } else if (std::string_view("+-*/^(),").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, static_cast<char>(c)), off});
      ++i;
    } else {
      throw InputError(std::string("unexpected character '") + static_cast<char>(c) + "'", off);
    }
  }
  out.push_back({Tok::End, "", static_cast<long>(s.size())});
  return out;
}

Rational parse_decimal(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(mpz_class(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  if (digits.empty()) digits = "0";
  mpz_class den = 1;
  for (std::size_t k = dot + 1; k < s.size(); ++k) den *= 10;
  Rational q(mpz_class(digits), den);
  q.canonicalize();
  return q;
}

bool parse_jet_suffix(const std::string& rest, int& a, int& b) {
  std::size_t i = 0;
  a = 0;
  b = 0;
  if (i < rest.size() && rest[i] == 't') {
    a = 1;
    ++i;
  }
  if (i == rest.size()) return a == 1;
  std::size_t j = i;
  while (j < rest.size() && std::isdigit(static_cast<unsigned char>(rest[j]))) ++j;
  if (j + 1 != rest.size() || rest[j] != 'x') return false;
  if (j == i) {
    b = 1;
    return true;
  }
  if (rest[i] == '0') return false;
  b = std::stoi(rest.substr(i, j - i));
  return b >= 2 && b <= 10;
}

bool elementary_name(const std::string& s, ElemFn& fn) {
  if (s == "exp") fn = ElemFn::Exp;
  else if (s == "ln") fn = ElemFn::Ln;
  else if (s == "sin") fn = ElemFn::Sin;
  else if (s == "cos") fn = ElemFn::Cos;
  else if (s == "arctan") fn = ElemFn::Arctan;
  else return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : toks_(tokenize(s)) {}

  Expr parse_all() {
    Expr e = sum();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  [[noreturn]] void fail(const std::string& msg) const { throw InputError(msg, peek().offset); }
  void expect(const char* op) {
    if (!is_op(op)) fail(std::string("expected '") + op + "'");
    ++pos_;
  }

  template <class F>
  Expr guarded(long offset, F&& f) {
    try {
      return f();
    } catch (const InputError& e) {
      if (e.offset() >= 0) throw;
      throw InputError(e.what(), offset);
    } catch (const DomainError& e) {
      throw InputError(e.what(), offset);
    }
  }

  Expr sum() {
    Expr lhs = term();
    while (is_op("+") || is_op("-")) {
      bool plus = peek().text == "+";
      ++pos_;
      Expr rhs = term();
      lhs = plus ? lhs + rhs : lhs - rhs;
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_op("*") || is_op("/")) {
      bool times = peek().text == "*";
      long off = peek().offset;
      ++pos_;
      Expr rhs = unary();
      lhs = guarded(off, [&] { return times ? lhs * rhs : lhs / rhs; });
    }
    return lhs;
  }

  Expr unary() {
    if (is_op("-")) {
      ++pos_;
      return -unary();
    }
    if (is_op("+")) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (is_op("^")) {
      long off = peek().offset;
      ++pos_;
      Expr ex = unary();
      return guarded(off, [&] { return pow(base, ex); });
    }
    return base;
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    expect("(");
    if (is_op(")")) fail("empty argument list");
    args.push_back(sum());
    while (is_op(",")) {
      ++pos_;
      args.push_back(sum());
    }
    expect(")");
    return args;
  }

  Expr primary() {
    const Token tok = peek();
    if (tok.kind == Tok::Number) {
      ++pos_;
      return Expr(parse_decimal(tok.text));
    }
    if (is_op("(")) {
      ++pos_;
      Expr e = sum();
      expect(")");
      return e;
    }
    if (tok.kind != Tok::Ident) fail(tok.kind == Tok::End ? "unexpected end of input" : "unexpected '" + tok.text + "'");
    ++pos_;
    const std::string& id = tok.text;
    bool call = is_op("(");
    if (id == "t" || id == "x" || id == "u") {
      if (call) throw InputError("'" + id + "' is a reserved variable and cannot be applied", tok.offset);
      return Expr::variable(id == "t" ? VarId::T : id == "x" ? VarId::X : VarId::U);
    }
    if (id.rfind("u_", 0) == 0) {
      int a, b;
      if (!parse_jet_suffix(id.substr(2), a, b)) throw InputError("unknown jet coordinate '" + id + "'", tok.offset);
      if (call) throw InputError("jet coordinate cannot be applied", tok.offset);
      return Expr::jet(a, b);
    }
    ElemFn fn = ElemFn::Exp;
    if (elementary_name(id, fn) || id == "sqrt" || id == "diff") {
      if (!call) throw InputError("expected '(' after " + id, peek().offset);
      long open = peek().offset;
      std::vector<Expr> args = arguments();
      if (id == "diff") return guarded(tok.offset, [&] { return diff(args, open); });
      if (args.size() != 1) throw InputError(id + " takes one argument", open);
      if (id == "sqrt") return guarded(tok.offset, [&] { return pow(args[0], Expr(Rational(1, 2))); });
      return Expr::elementary(fn, args[0]);
    }
    if (call) {
      std::vector<Expr> args = arguments();
      return guarded(tok.offset, [&] { return Expr::function(id, std::move(args)); });
    }
    return Expr::parameter(id);
  }

  static Expr diff(const std::vector<Expr>& args, long offset) {
    if (args.empty() || args[0].kind() != ExprKind::Function)
      throw InputError("diff expects a function atom as its first argument", offset);
    const Expr& f = args[0];
    std::vector<int> ord = f.orders();
    auto order_of = [&](const Expr& e) {
      if (!e.is_number() || e.number().get_den() != 1 || sgn(e.number()) < 0)
        throw InputError("derivative order must be a non-negative integer", offset);
      return static_cast<int>(e.number().get_num().get_si());
    };
    if (args.size() >= 2 && args[1].is_number()) {
      if (args.size() - 1 != ord.size()) throw InputError("diff slot form needs one order per argument", offset);
      for (std::size_t i = 0; i < ord.size(); ++i) ord[i] += order_of(args[i + 1]);
    } else {
      for (std::size_t i = 1; i < args.size();) {
        const Expr& v = args[i];
        int k = 1;
        if (i + 1 < args.size() && args[i + 1].is_number()) {
          k = order_of(args[i + 1]);
          i += 2;
        } else {
          i += 1;
        }
        std::size_t slot = ord.size();
        for (std::size_t s = 0; s < f.operands().size(); ++s)
          if (f.operands()[s] == v) slot = s;
        if (slot == ord.size())
          throw InputError("diff variable " + v.str() + " is not an argument of " + f.name(), offset);
        ord[slot] += k;
      }
    }
    return Expr::function(f.name(), f.operands(), ord);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p(text);
  return p.parse_all();
}

}  // namespace symkawa
