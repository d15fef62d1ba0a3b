#pragma once

// Small arithmetic language for trait functions b(x), d(x), u0(x).
//
// Grammar (see docs/expression_grammar.md):
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]
//   primary := number | "x" | "pi" | "e" | call | "(" expr ")"
//   call    := name "(" expr { "," expr } ")"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selection/grid.hpp"

namespace selection::expr {

enum class NodeKind { number, variable, constant_pi, constant_e, negate, binary, call };

enum class Builtin { exp, sin, cos, sqrt, abs, min, max, clamp, ind };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;           // number
  char op = 0;                  // binary: + - * / ^
  Builtin fn = Builtin::exp;    // call
  std::vector<NodePtr> args;    // negate: 1, binary: 2, call: arity
  std::size_t offset = 0;       // byte offset in the source text
};

/// Immutable expression tree. Cheap to copy; safe to evaluate from several threads.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  bool empty() const noexcept { return !root_; }

  /// Structural equality (source offsets ignored).
  friend bool operator==(const Expr& a, const Expr& b);

  // Factories, used by tests and generators.
  static Expr number(double v);
  static Expr variable();
  static Expr constant_pi();
  static Expr constant_e();
  static Expr negate(const Expr& operand);
  static Expr binary(char op, const Expr& lhs, const Expr& rhs);
  static Expr call(Builtin fn, const std::vector<Expr>& args);

 private:
  NodePtr root_;
};

/// Throws ParseError (with byte offset) on malformed input, unknown
/// identifiers and wrong call arity.
Expr parse(std::string_view source);

/// Throws EvalError on division by zero or sqrt of a negative number.
double eval(const Expr& e, double x);

/// Canonical fully-parenthesized text: "1+2*x" prints as "(1 + (2 * x))".
std::string print(const Expr& e);

/// Grid-certified bounds: min and max of eval over every grid node.
std::pair<double, double> bound_on_grid(const Expr& e, const Grid& grid);

std::string_view builtin_name(Builtin fn);
std::size_t builtin_arity(Builtin fn);

}  // namespace selection::expr
