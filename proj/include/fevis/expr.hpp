// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace fevis {

// Scalar expression language over spatial coordinates.
//
// Grammar (whitespace insignificant; binary operators left-associative,
// '^' right-associative and restricted to literal exponents):
//
//   expr       := term (('+' | '-') term)*
//   term       := unary (('*' | '/') unary)*
//   unary      := '-' unary | power
//   power      := atom ('^' exponent)?
//   exponent   := ['-'] number ('^' exponent)?
//   atom       := number | 'pi' | coordinate | function '(' expr ')'
//               | '(' expr ')'
//   coordinate := 'x' '[' digits ']'
//   function   := 'sin' | 'cos' | 'exp' | 'sqrt'
//
// Precedence, tightest first: '^', unary '-', '*'/'/', '+'/'-'.
// 'pi' parses to a literal with value M_PI.

enum class ExprKind { Literal, Coordinate, Neg, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Sqrt };

struct Expr {
  ExprKind kind = ExprKind::Literal;
  double literal = 0.0;            // ExprKind::Literal
  int coord = 0;                   // ExprKind::Coordinate, 0 <= coord < 3
  BinaryOp op = BinaryOp::Add;     // ExprKind::Binary
  Func func = Func::Sin;           // ExprKind::Call
  std::vector<Expr> children;      // Neg/Call: 1 child, Binary: 2 children

  static Expr make_literal(double v) {
    Expr e;
    e.kind = ExprKind::Literal;
    e.literal = v;
    return e;
  }
  static Expr make_coord(int i) {
    Expr e;
    e.kind = ExprKind::Coordinate;
    e.coord = i;
    return e;
  }
  static Expr make_neg(Expr a) {
    Expr e;
    e.kind = ExprKind::Neg;
    e.children.push_back(std::move(a));
    return e;
  }
  static Expr make_binary(BinaryOp op, Expr l, Expr r) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.op = op;
    e.children.push_back(std::move(l));
    e.children.push_back(std::move(r));
    return e;
  }
  static Expr make_call(Func f, Expr a) {
    Expr e;
    e.kind = ExprKind::Call;
    e.func = f;
    e.children.push_back(std::move(a));
    return e;
  }
};

/// Structural equality; literal values are compared exactly.
inline bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
  case ExprKind::Literal:
    if (a.literal != b.literal) return false;
    break;
  case ExprKind::Coordinate:
    if (a.coord != b.coord) return false;
    break;
  case ExprKind::Binary:
    if (a.op != b.op) return false;
    break;
  case ExprKind::Call:
    if (a.func != b.func) return false;
    break;
  case ExprKind::Neg:
    break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!(a.children[i] == b.children[i])) return false;
  return true;
}

inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

namespace detail {

inline int precedence(const Expr& e) {
  if (e.kind == ExprKind::Neg) return 3;
  if (e.kind != ExprKind::Binary) return 5;
  switch (e.op) {
  case BinaryOp::Add:
  case BinaryOp::Sub:
    return 1;
  case BinaryOp::Mul:
  case BinaryOp::Div:
    return 2;
  case BinaryOp::Pow:
    return 4;
  }
  return 5;
}

inline void print_literal(double v, std::string& out) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void print_to(const Expr& e, std::string& out) {
  const auto child = [&](const Expr& c, bool parens) {
    if (parens) out += '(';
    print_to(c, out);
    if (parens) out += ')';
  };
  switch (e.kind) {
  case ExprKind::Literal:
    print_literal(e.literal, out);
    return;
  case ExprKind::Coordinate:
    out += "x[" + std::to_string(e.coord) + "]";
    return;
  case ExprKind::Neg:
    out += '-';
    child(e.children[0], precedence(e.children[0]) < 3);
    return;
  case ExprKind::Call:
    switch (e.func) {
    case Func::Sin: out += "sin"; break;
    case Func::Cos: out += "cos"; break;
    case Func::Exp: out += "exp"; break;
    case Func::Sqrt: out += "sqrt"; break;
    }
    out += '(';
    print_to(e.children[0], out);
    out += ')';
    return;
  case ExprKind::Binary: {
    const int prec = precedence(e);
    const bool right_assoc = (e.op == BinaryOp::Pow);
    // Parenthesize to preserve structure under re-parsing: the loosely bound
    // side (right for left-associative operators, left for '^') needs parens
    // already at equal precedence.
    child(e.children[0], precedence(e.children[0]) < prec + (right_assoc ? 1 : 0));
    switch (e.op) {
    case BinaryOp::Add: out += '+'; break;
    case BinaryOp::Sub: out += '-'; break;
    case BinaryOp::Mul: out += '*'; break;
    case BinaryOp::Div: out += '/'; break;
    case BinaryOp::Pow: out += '^'; break;
    }
    child(e.children[1], precedence(e.children[1]) < prec + (right_assoc ? 0 : 1));
    return;
  }
  }
}

} // namespace detail

/// Render the expression as text that parses back to a structurally equal
/// tree (for trees produced by parse()).
inline std::string print(const Expr& e) {
  std::string out;
  detail::print_to(e, out);
  return out;
}

/// Evaluate at a point.  Throws NumericError naming the innermost
/// subexpression whose value is non-finite (division by zero, sqrt of a
/// negative number, overflow, ...).
inline double eval_expr(const Expr& e, const Vec3& p) {
  double v = 0.0;
  switch (e.kind) {
  case ExprKind::Literal:
    v = e.literal;
    break;
  case ExprKind::Coordinate:
    v = p[static_cast<std::size_t>(e.coord)];
    break;
  case ExprKind::Neg:
    v = -eval_expr(e.children[0], p);
    break;
  case ExprKind::Call: {
    const double a = eval_expr(e.children[0], p);
    switch (e.func) {
    case Func::Sin: v = std::sin(a); break;
    case Func::Cos: v = std::cos(a); break;
    case Func::Exp: v = std::exp(a); break;
    case Func::Sqrt: v = std::sqrt(a); break;
    }
    break;
  }
  case ExprKind::Binary: {
    const double l = eval_expr(e.children[0], p);
    const double r = eval_expr(e.children[1], p);
    switch (e.op) {
    case BinaryOp::Add: v = l + r; break;
    case BinaryOp::Sub: v = l - r; break;
    case BinaryOp::Mul: v = l * r; break;
    case BinaryOp::Div: v = l / r; break;
    case BinaryOp::Pow: v = std::pow(l, r); break;
    }
    break;
  }
  }
  if (!std::isfinite(v))
    throw NumericError("expression evaluated to a non-finite value in subexpression '" +
                       print(e) + "'");
  return v;
}

namespace detail {

class Parser {
public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing input");
    return e;
  }

private:
  std::string text_;
  std::size_t pos_ = 0;
  int dim_;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ValidationError("syntax error at byte " + std::to_string(at) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool eat(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!eat(c)) fail(pos_, std::string("expected '") + c + "' " + what);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    while (true) {
      if (eat('+'))
        e = Expr::make_binary(BinaryOp::Add, std::move(e), parse_term());
      else if (eat('-'))
        e = Expr::make_binary(BinaryOp::Sub, std::move(e), parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    while (true) {
      if (eat('*'))
        e = Expr::make_binary(BinaryOp::Mul, std::move(e), parse_unary());
      else if (eat('/'))
        e = Expr::make_binary(BinaryOp::Div, std::move(e), parse_unary());
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (eat('-')) return Expr::make_neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (eat('^'))
      return Expr::make_binary(BinaryOp::Pow, std::move(base), parse_exponent());
    return base;
  }

  // '^' accepts only (optionally negated) number literals, chained
  // right-associatively: x^2, pi^-2, 2^3^2 == 2^(3^2).
  Expr parse_exponent() {
    const bool neg = eat('-');
    const char c = peek();
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.'))
      fail(pos_, "exponent must be a number literal");
    Expr e = Expr::make_literal((neg ? -1.0 : 1.0) * parse_number());
    if (eat('^'))
      return Expr::make_binary(BinaryOp::Pow, std::move(e), parse_exponent());
    return e;
  }

  Expr parse_atom() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return Expr::make_literal(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    if (eat('(')) {
      Expr e = parse_expr();
      expect(')', "to close parenthesized expression");
      return e;
    }
    fail(pos_, pos_ < text_.size()
                   ? std::string("unexpected character '") + c + "'"
                   : std::string("unexpected end of input"));
  }

  double parse_number() {
    skip_ws();
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail(pos_, "malformed number literal");
    pos_ += static_cast<std::size_t>(end - start);
    return v;
  }

  Expr parse_ident() {
    skip_ws();
    const std::size_t at = pos_;
    std::size_t n = pos_;
    while (n < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[n])))
      ++n;
    const std::string_view name = std::string_view(text_).substr(at, n - at);
    pos_ = n;
    if (name == "pi") return Expr::make_literal(M_PI);
    if (name == "x") return parse_coordinate();
    Func f;
    if (name == "sin")
      f = Func::Sin;
    else if (name == "cos")
      f = Func::Cos;
    else if (name == "exp")
      f = Func::Exp;
    else if (name == "sqrt")
      f = Func::Sqrt;
    else
      fail(at, "unknown identifier '" + std::string(name) + "'");
    expect('(', "after function name (function application requires parentheses)");
    Expr arg = parse_expr();
    expect(')', "to close function argument");
    return Expr::make_call(f, std::move(arg));
  }

  Expr parse_coordinate() {
    expect('[', "after 'x' in coordinate reference");
    skip_ws();
    const std::size_t at = pos_;
    long idx = 0;
    bool any = false;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      idx = idx * 10 + (text_[pos_] - '0');
      any = true;
      ++pos_;
      if (idx > 1000) break;
    }
    if (!any) fail(at, "expected coordinate index digits");
    expect(']', "to close coordinate reference");
    if (idx >= dim_)
      throw ValidationError("dimension error: coordinate x[" + std::to_string(idx) +
                            "] is out of range for dimension " + std::to_string(dim_));
    return Expr::make_coord(static_cast<int>(idx));
  }
};

} // namespace detail

/// Parse expression text for a mesh of the given dimension (2 or 3).
/// Syntax errors report the byte offset; coordinate indices >= dim are
/// rejected with a dimension error naming the offending index.
inline Expr parse(std::string_view text, int dim) {
  if (dim != 2 && dim != 3)
    throw ValidationError("expression dimension must be 2 or 3, got " +
                          std::to_string(dim));
  return detail::Parser(text, dim).run();
}

} // namespace fevis
