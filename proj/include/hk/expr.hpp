#pragma once
// Tiny expression language for user Hamiltonians / Lagrangians.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' ['-'] int)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   ident  := x<i> | y<a>_<i> | p<i>       (1-based)
//   func   := sqrt | exp | log | sin | cos

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/jet.hpp"
#include "hk/taylor.hpp"

namespace hk {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c)), line(l), col(c) {}
};

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt, Exp, Log, Sin, Cos };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Num;
  double value = 0.0;  // Num
  int expo = 0;        // Pow
  char kind = 0;       // Var: 'x', 'y' or 'p'
  int block = 0;       // Var: derivative order a for y
  int index = 0;       // Var: 0-based component
  int var = -1;        // Var: flat coordinate once resolved
  Expr a, b;
};

Expr parse_expr(const std::string& src);
std::string print_expr(const Expr& e);

// Which bundle the identifiers refer to. On T*^k M, y runs to k-1 and p is
// allowed; on T^k M (Lagrangians), y runs to k and there is no p. Both use
// (k+1)n flat coordinates with the same block layout.
enum class Side { Cotangent, Tangent };

// Assigns flat coordinate indices; throws on out-of-shape identifiers.
Expr resolve(const Expr& e, const BundleShape& sh, Side side = Side::Cotangent);

Expr num(double v);
Expr var(int flat);
Expr mk(Op op, Expr a, Expr b = nullptr, int expo = 0);

// symbolic partial derivative w.r.t. a flat coordinate (resolved trees only)
Expr diff(const Expr& e, int flat);

template <class S>
S eval(const Expr& e, const std::vector<S>& u) {
  const Node& n = *e;
  switch (n.op) {
    case Op::Num:
      return constant_like(u[0], n.value);
    case Op::Var:
      if (n.var < 0) throw std::logic_error("expression evaluated before resolve()");
      return u[n.var];
    case Op::Neg:
      return -eval(n.a, u);
    case Op::Add:
      return eval(n.a, u) + eval(n.b, u);
    case Op::Sub:
      return eval(n.a, u) - eval(n.b, u);
    case Op::Mul:
      return eval(n.a, u) * eval(n.b, u);
    case Op::Div:
      return checked_div(eval(n.a, u), eval(n.b, u));
    case Op::Pow:
      return ipow(eval(n.a, u), n.expo);
    case Op::Sqrt:
      return checked_sqrt(eval(n.a, u));
    case Op::Exp: {
      using std::exp;
      return exp(eval(n.a, u));
    }
    case Op::Log:
      return checked_log(eval(n.a, u));
    case Op::Sin: {
      using std::sin;
      return sin(eval(n.a, u));
    }
    case Op::Cos: {
      using std::cos;
      return cos(eval(n.a, u));
    }
  }
  throw std::logic_error("bad expression node");
}

}  // namespace hk
