#include "selection/exprlang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <system_error>

#include "selection/errors.hpp"

namespace selection::expr {

namespace {

struct BuiltinInfo {
  std::string_view name;
  Builtin fn;
  std::size_t arity;
};

constexpr std::array<BuiltinInfo, 9> kBuiltins{{
    {"exp", Builtin::exp, 1},
    {"sin", Builtin::sin, 1},
    {"cos", Builtin::cos, 1},
    {"sqrt", Builtin::sqrt, 1},
    {"abs", Builtin::abs, 1},
    {"min", Builtin::min, 2},
    {"max", Builtin::max, 2},
    {"clamp", Builtin::clamp, 3},
    {"ind", Builtin::ind, 2},
}};

std::optional<BuiltinInfo> find_builtin(std::string_view name) {
  for (const auto& info : kBuiltins) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

NodePtr make_node(Node node) { return std::make_shared<const Node>(std::move(node)); }

enum class TokenKind { number, identifier, symbol, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string_view text;
  double value = 0.0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    current_ = Token{};
    current_.offset = pos_;
    if (pos_ >= src_.size()) {
      current_.kind = TokenKind::end;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      current_.kind = TokenKind::identifier;
      current_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
    } else if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      current_.kind = TokenKind::symbol;
      current_.text = src_.substr(pos_, 1);
      ++pos_;
    } else {
      throw ParseError(pos_, std::string("invalid character '") + c + "'");
    }
  }

  void lex_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
        ++n;
      }
      return n;
    };
    std::size_t n_digits = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      n_digits += digits();
    }
    if (n_digits == 0) throw ParseError(start, "malformed number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t look = end + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        end = look;
        digits();
      }
    }
    const std::string_view text = src_.substr(start, end - start);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(value))
      throw ParseError(start, "number out of range");
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw ParseError(start, "malformed number");
    current_.kind = TokenKind::number;
    current_.text = text;
    current_.value = value;
    pos_ = end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

std::string describe(const Token& t) {
  if (t.kind == TokenKind::end) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Expr parse_all() {
    NodePtr root = expression();
    if (lex_.peek().kind != TokenKind::end)
      throw ParseError(lex_.peek().offset, "unexpected token " + describe(lex_.peek()));
    return Expr(std::move(root));
  }

 private:
  bool at_symbol(char c) const {
    const Token& t = lex_.peek();
    return t.kind == TokenKind::symbol && t.text[0] == c;
  }

  void expect_symbol(char c) {
    if (!at_symbol(c))
      throw ParseError(lex_.peek().offset,
                       std::string("expected '") + c + "' but found " + describe(lex_.peek()));
    lex_.take();
  }

  NodePtr expression() {
    NodePtr lhs = term();
    while (at_symbol('+') || at_symbol('-')) {
      const Token op = lex_.take();
      NodePtr rhs = term();
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (at_symbol('*') || at_symbol('/')) {
      const Token op = lex_.take();
      NodePtr rhs = unary();
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  NodePtr unary() {
    if (at_symbol('-')) {
      const Token op = lex_.take();
      Node n;
      n.kind = NodeKind::negate;
      n.offset = op.offset;
      n.args.push_back(unary());
      return make_node(std::move(n));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (at_symbol('^')) {
      const Token op = lex_.take();
      // Right operand goes back through unary: 2^3^2 == 2^(3^2), 2^-1 allowed.
      NodePtr exponent = unary();
      return binary(op, std::move(base), std::move(exponent));
    }
    return base;
  }

  NodePtr primary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case TokenKind::number: {
        lex_.take();
        Node n;
        n.kind = NodeKind::number;
        n.value = t.value;
        n.offset = t.offset;
        return make_node(std::move(n));
      }
      case TokenKind::identifier:
        return identifier();
      case TokenKind::symbol:
        if (t.text[0] == '(') {
          lex_.take();
          NodePtr inner = expression();
          expect_symbol(')');
          return inner;
        }
        break;
      case TokenKind::end:
        break;
    }
    throw ParseError(t.offset, "expected expression but found " + describe(t));
  }

  NodePtr identifier() {
    const Token t = lex_.take();
    if (at_symbol('(')) {
      const auto info = find_builtin(t.text);
      if (!info) throw ParseError(t.offset, "unknown function '" + std::string(t.text) + "'");
      lex_.take();
      Node n;
      n.kind = NodeKind::call;
      n.fn = info->fn;
      n.offset = t.offset;
      if (!at_symbol(')')) {
        n.args.push_back(expression());
        while (at_symbol(',')) {
          lex_.take();
          n.args.push_back(expression());
        }
      }
      expect_symbol(')');
      if (n.args.size() != info->arity)
        throw ParseError(t.offset, "wrong number of arguments to '" + std::string(info->name) +
                                       "': expected " + std::to_string(info->arity) + ", got " +
                                       std::to_string(n.args.size()));
      return make_node(std::move(n));
    }
    Node n;
    n.offset = t.offset;
    if (t.text == "x") {
      n.kind = NodeKind::variable;
    } else if (t.text == "pi") {
      n.kind = NodeKind::constant_pi;
    } else if (t.text == "e") {
      n.kind = NodeKind::constant_e;
    } else if (find_builtin(t.text)) {
      throw ParseError(t.offset, "function '" + std::string(t.text) + "' requires arguments");
    } else {
      throw ParseError(t.offset, "unknown identifier '" + std::string(t.text) + "'");
    }
    return make_node(std::move(n));
  }

  NodePtr binary(const Token& op, NodePtr lhs, NodePtr rhs) {
    Node n;
    n.kind = NodeKind::binary;
    n.op = op.text[0];
    n.offset = op.offset;
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return make_node(std::move(n));
  }

  Lexer lex_;
};

bool equal_nodes(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      // Bitwise-equal values; printing is shortest round-trip so this is stable.
      if (!(a.value == b.value) || std::signbit(a.value) != std::signbit(b.value)) return false;
      break;
    case NodeKind::binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::call:
      if (a.fn != b.fn) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal_nodes(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

double eval_node(const Node& n, double x) {
  switch (n.kind) {
    case NodeKind::number:
      return n.value;
    case NodeKind::variable:
      return x;
    case NodeKind::constant_pi:
      return std::numbers::pi;
    case NodeKind::constant_e:
      return std::numbers::e;
    case NodeKind::negate:
      return -eval_node(*n.args[0], x);
    case NodeKind::binary: {
      const double lhs = eval_node(*n.args[0], x);
      const double rhs = eval_node(*n.args[1], x);
      switch (n.op) {
        case '+':
          return lhs + rhs;
        case '-':
          return lhs - rhs;
        case '*':
          return lhs * rhs;
        case '/':
          if (rhs == 0.0) throw EvalError(n.offset, "division by zero");
          return lhs / rhs;
        case '^': {
          const double r = std::pow(lhs, rhs);
          if (std::isnan(r) && !std::isnan(lhs) && !std::isnan(rhs))
            throw EvalError(n.offset, "negative base with non-integer exponent");
          return r;
        }
      }
      break;
    }
    case NodeKind::call: {
      auto arg = [&](std::size_t i) { return eval_node(*n.args[i], x); };
      switch (n.fn) {
        case Builtin::exp:
          return std::exp(arg(0));
        case Builtin::sin:
          return std::sin(arg(0));
        case Builtin::cos:
          return std::cos(arg(0));
        case Builtin::sqrt: {
          const double v = arg(0);
          if (v < 0.0) throw EvalError(n.offset, "sqrt of negative value");
          return std::sqrt(v);
        }
        case Builtin::abs:
          return std::abs(arg(0));
        case Builtin::min:
          return std::min(arg(0), arg(1));
        case Builtin::max:
          return std::max(arg(0), arg(1));
        case Builtin::clamp:
          return std::min(std::max(arg(0), arg(1)), arg(2));
        case Builtin::ind: {
          const double lo = arg(0);
          const double hi = arg(1);
          return (lo <= x && x <= hi) ? 1.0 : 0.0;
        }
      }
      break;
    }
  }
  throw EvalError(n.offset, "malformed expression node");
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::number: {
      std::array<char, 32> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      out.append(buf.data(), res.ptr);
      return;
    }
    case NodeKind::variable:
      out += 'x';
      return;
    case NodeKind::constant_pi:
      out += "pi";
      return;
    case NodeKind::constant_e:
      out += 'e';
      return;
    case NodeKind::negate:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::binary:
      out += '(';
      print_node(*n.args[0], out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_node(*n.args[1], out);
      out += ')';
      return;
    case NodeKind::call:
      out += builtin_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return equal_nodes(a.root(), b.root());
}

Expr Expr::number(double v) {
  Node n;
  n.kind = NodeKind::number;
  n.value = v;
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable() {
  Node n;
  n.kind = NodeKind::variable;
  return Expr(make_node(std::move(n)));
}

Expr Expr::constant_pi() {
  Node n;
  n.kind = NodeKind::constant_pi;
  return Expr(make_node(std::move(n)));
}

Expr Expr::constant_e() {
  Node n;
  n.kind = NodeKind::constant_e;
  return Expr(make_node(std::move(n)));
}

Expr Expr::negate(const Expr& operand) {
  Node n;
  n.kind = NodeKind::negate;
  n.args.push_back(operand.root_);
  return Expr(make_node(std::move(n)));
}

Expr Expr::binary(char op, const Expr& lhs, const Expr& rhs) {
  Node n;
  n.kind = NodeKind::binary;
  n.op = op;
  n.args = {lhs.root_, rhs.root_};
  return Expr(make_node(std::move(n)));
}

Expr Expr::call(Builtin fn, const std::vector<Expr>& args) {
  Node n;
  n.kind = NodeKind::call;
  n.fn = fn;
  for (const auto& a : args) n.args.push_back(a.root_);
  return Expr(make_node(std::move(n)));
}

std::string_view builtin_name(Builtin fn) {
  for (const auto& info : kBuiltins) {
    if (info.fn == fn) return info.name;
  }
  return "?";
}

std::size_t builtin_arity(Builtin fn) {
  for (const auto& info : kBuiltins) {
    if (info.fn == fn) return info.arity;
  }
  return 0;
}

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

double eval(const Expr& e, double x) {
  if (e.empty()) throw EvalError(0, "empty expression");
  return eval_node(e.root(), x);
}

std::string print(const Expr& e) {
  std::string out;
  if (!e.empty()) print_node(e.root(), out);
  return out;
}

std::pair<double, double> bound_on_grid(const Expr& e, const Grid& grid) {
  double lo = eval(e, grid.node(0));
  double hi = lo;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = eval(e, grid.node(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace selection::expr
