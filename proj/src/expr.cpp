#include "hk/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace hk {

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& src) : s(src) {}

  void where(std::size_t at, int& line, int& col) const {
    line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < s.size(); ++i) {
      if (s[i] == '\n')
        ++line, col = 1;
      else
        ++col;
    }
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    int l, c;
    where(at, l, c);
    throw ParseError(msg, l, c);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    fail(pos >= s.size() ? msg + " (end of input)" : msg, pos);
  }

  void ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char ch) {
    ws();
    if (pos < s.size() && s[pos] == ch) {
      ++pos;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr l = term();
    for (;;) {
      if (eat('+'))
        l = mk(Op::Add, l, term());
      else if (eat('-'))
        l = mk(Op::Sub, l, term());
      else
        return l;
    }
  }
  Expr term() {
    Expr l = factor();
    for (;;) {
      if (eat('*'))
        l = mk(Op::Mul, l, factor());
      else if (eat('/'))
        l = mk(Op::Div, l, factor());
      else
        return l;
    }
  }
  Expr factor() {
    if (eat('-')) return mk(Op::Neg, factor());
    Expr a = atom();
    if (eat('^')) {
      ws();
      std::size_t start = pos;
      bool neg = false;
      if (pos < s.size() && s[pos] == '-') neg = true, ++pos;
      std::size_t d0 = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == d0 || (pos < s.size() && (s[pos] == '.' || s[pos] == 'e' || s[pos] == 'E' || std::isalpha(static_cast<unsigned char>(s[pos])))))
        fail("exponent is not an integer literal", start);
      int e = std::atoi(s.substr(d0, pos - d0).c_str());
      return mk(Op::Pow, a, nullptr, neg ? -e : e);
    }
    return a;
  }
  Expr atom() {
    ws();
    if (pos >= s.size()) fail("expected an operand");
    char ch = s[pos];
    if (ch == '(') {
      ++pos;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      double v = 0.0;
      auto res = std::from_chars(s.data() + pos, s.data() + s.size(), v);
      if (res.ec != std::errc()) fail("malformed number");
      pos = static_cast<std::size_t>(res.ptr - s.data());
      return num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      std::string id = s.substr(start, pos - start);
      static const std::pair<const char*, Op> funcs[] = {
          {"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin}, {"cos", Op::Cos}};
      for (const auto& [name, op] : funcs)
        if (id == name) {
          if (!eat('(')) fail("expected '(' after function name");
          Expr a = expr();
          if (!eat(')')) fail("expected ')'");
          return mk(op, a);
        }
      return ident(id, start);
    }
    fail(std::string("unexpected character '") + ch + "'");
  }

  static bool all_digits(const std::string& t) {
    if (t.empty() || t[0] == '0') return false;
    for (char c : t)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }

  Expr ident(const std::string& id, std::size_t at) {
    auto node = std::make_shared<Node>();
    node->op = Op::Var;
    char k = id[0];
    std::string rest = id.substr(1);
    if ((k == 'x' || k == 'p') && all_digits(rest)) {
      node->kind = k;
      node->index = std::atoi(rest.c_str()) - 1;
      return node;
    }
    if (k == 'y') {
      auto us = rest.find('_');
      if (us != std::string::npos && all_digits(rest.substr(0, us)) && all_digits(rest.substr(us + 1))) {
        node->kind = 'y';
        node->block = std::atoi(rest.substr(0, us).c_str());
        node->index = std::atoi(rest.substr(us + 1).c_str()) - 1;
        return node;
      }
    }
    fail("unknown identifier '" + id + "'", at);
  }
};

int prec(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string fmt_num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void print_rec(const Expr& e, std::string& out) {
  const Node& n = *e;
  auto child = [&](const Expr& c, bool paren) {
    if (paren) out += '(';
    print_rec(c, out);
    if (paren) out += ')';
  };
  switch (n.op) {
    case Op::Num:
      // negative literals only arise from folding; keep them atomic
      if (n.value < 0 || std::signbit(n.value))
        out += "(-" + fmt_num(-n.value) + ")";
      else
        out += fmt_num(n.value);
      return;
    case Op::Var:
      if (n.kind == 'y')
        out += "y" + std::to_string(n.block) + "_" + std::to_string(n.index + 1);
      else
        out += std::string(1, n.kind) + std::to_string(n.index + 1);
      return;
    case Op::Neg:
      out += '-';
      child(n.a, prec(n.a->op) < prec(Op::Neg));
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int p = prec(n.op);
      const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      // binary operators associate left, so an equal-precedence right child keeps its parens
      child(n.a, prec(n.a->op) < p);
      out += sym;
      bool rp = prec(n.b->op) <= p;
      child(n.b, rp);
      return;
    }
    case Op::Pow:
      child(n.a, prec(n.a->op) <= prec(Op::Pow));
      out += "^" + std::to_string(n.expo);
      return;
    default: {
      static const char* names[] = {"sqrt", "exp", "log", "sin", "cos"};
      out += names[static_cast<int>(n.op) - static_cast<int>(Op::Sqrt)];
      out += '(';
      print_rec(n.a, out);
      out += ')';
    }
  }
}

bool is_num(const Expr& e, double v) { return e->op == Op::Num && e->value == v; }

}  // namespace

Expr num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->value = v;
  return n;
}

Expr var(int flat) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = flat;
  n->kind = 'x';
  n->index = flat;
  return n;
}

Expr mk(Op op, Expr a, Expr b, int expo) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->expo = expo;
  return n;
}

Expr parse_expr(const std::string& src) {
  Parser p(src);
  p.ws();
  if (p.pos >= src.size()) p.fail("empty expression");
  Expr e = p.expr();
  p.ws();
  if (p.pos < src.size()) p.fail("unexpected trailing input");
  return e;
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

Expr resolve(const Expr& e, const BundleShape& sh, Side side) {
  if (!e) return e;
  auto n = std::make_shared<Node>(*e);
  if (n->op == Op::Var) {
    if (n->index < 0 || n->index >= sh.n)
      throw ShapeError("identifier index " + std::to_string(n->index + 1) + " exceeds dimension " + std::to_string(sh.n));
    if (n->kind == 'x')
      n->var = sh.x(n->index);
    else if (n->kind == 'p') {
      if (side == Side::Tangent) throw ShapeError("momentum p" + std::to_string(n->index + 1) + " used in a Lagrangian");
      n->var = sh.p(n->index);
    } else {
      int top = side == Side::Cotangent ? sh.k - 1 : sh.k;
      if (n->block < 1 || n->block > top)
        throw ShapeError("y" + std::to_string(n->block) + " is outside the order range 1.." + std::to_string(top));
      n->var = sh.y(n->block, n->index);
    }
    return n;
  }
  n->a = resolve(e->a, sh, side);
  n->b = resolve(e->b, sh, side);
  return n;
}

namespace {

Expr add(Expr a, Expr b) {
  if (is_num(a, 0)) return b;
  if (is_num(b, 0)) return a;
  return mk(Op::Add, a, b);
}
Expr sub(Expr a, Expr b) {
  if (is_num(b, 0)) return a;
  if (is_num(a, 0)) return mk(Op::Neg, b);
  return mk(Op::Sub, a, b);
}
Expr mul(Expr a, Expr b) {
  if (is_num(a, 0) || is_num(b, 0)) return num(0);
  if (is_num(a, 1)) return b;
  if (is_num(b, 1)) return a;
  return mk(Op::Mul, a, b);
}
Expr divi(Expr a, Expr b) {
  if (is_num(a, 0)) return num(0);
  return mk(Op::Div, a, b);
}

}  // namespace

Expr diff(const Expr& e, int v) {
  const Node& n = *e;
  switch (n.op) {
    case Op::Num:
      return num(0);
    case Op::Var:
      if (n.var < 0) throw std::logic_error("diff on an unresolved expression");
      return num(n.var == v ? 1 : 0);
    case Op::Neg: {
      Expr d = diff(n.a, v);
      return is_num(d, 0) ? d : mk(Op::Neg, d);
    }
    case Op::Add:
      return add(diff(n.a, v), diff(n.b, v));
    case Op::Sub:
      return sub(diff(n.a, v), diff(n.b, v));
    case Op::Mul:
      return add(mul(diff(n.a, v), n.b), mul(n.a, diff(n.b, v)));
    case Op::Div:
      // (a/b)' = a'/b - a b'/b^2
      return sub(divi(diff(n.a, v), n.b), divi(mul(n.a, diff(n.b, v)), mk(Op::Pow, n.b, nullptr, 2)));
    case Op::Pow: {
      if (n.expo == 0) return num(0);
      Expr base = n.expo == 1 ? num(1) : mk(Op::Pow, n.a, nullptr, n.expo - 1);
      return mul(mul(num(n.expo), base), diff(n.a, v));
    }
    case Op::Sqrt:
      return mul(divi(num(0.5), e), diff(n.a, v));
    case Op::Exp:
      return mul(e, diff(n.a, v));
    case Op::Log:
      return divi(diff(n.a, v), n.a);
    case Op::Sin:
      return mul(mk(Op::Cos, n.a), diff(n.a, v));
    case Op::Cos:
      return mul(mk(Op::Neg, mk(Op::Sin, n.a)), diff(n.a, v));
  }
  throw std::logic_error("bad expression node");
}

}  // namespace hk
