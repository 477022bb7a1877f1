#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "npgeo/errors.hpp"
#include "npgeo/jet.hpp"

namespace npgeo {

enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt };
enum class BinOp { Add, Sub, Mul, Div, Pow };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

/// Immutable expression tree node. Subtrees are shared, so composing
/// expressions (e.g. building a flipped metric) never copies.
struct ExprNode {
  enum class Kind { Number, Pi, Coord, Neg, Call, Binary };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::size_t coord = 0;
  Func func = Func::Sin;
  BinOp op = BinOp::Add;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

class Expression {
public:
  using Node = ExprNode;
  using NodePtr = std::shared_ptr<const ExprNode>;

  Expression() : Expression(number(0.0)) {}

  static Expression number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->number = v;
    return Expression(std::move(n));
  }
  static Expression pi() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Pi;
    return Expression(std::move(n));
  }
  static Expression coordinate(std::size_t index) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Coord;
    n->coord = index;
    return Expression(std::move(n));
  }
  static Expression call(Func f, const Expression& arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->func = f;
    n->lhs = arg.root_;
    return Expression(std::move(n));
  }
  static Expression binary(BinOp op, const Expression& a, const Expression& b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->lhs = a.root_;
    n->rhs = b.root_;
    return Expression(std::move(n));
  }

  Expression operator-() const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Neg;
    n->lhs = root_;
    return Expression(std::move(n));
  }
  friend Expression operator+(const Expression& a, const Expression& b) { return binary(BinOp::Add, a, b); }
  friend Expression operator-(const Expression& a, const Expression& b) { return binary(BinOp::Sub, a, b); }
  friend Expression operator*(const Expression& a, const Expression& b) { return binary(BinOp::Mul, a, b); }
  friend Expression operator/(const Expression& a, const Expression& b) { return binary(BinOp::Div, a, b); }

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }

  /// Number literal (possibly under unary minus) or pi.
  bool is_constant() const { return constant_value(*root_) != nullptr; }

  /// Largest coordinate index referenced plus one; 0 for constants.
  std::size_t arity() const { return arity(*root_); }

  /// Structural equality of the trees.
  friend bool operator==(const Expression& a, const Expression& b) { return same(*a.root_, *b.root_); }

private:
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static const Node* constant_value(const Node& n) {
    if (n.kind == Node::Kind::Number || n.kind == Node::Kind::Pi) return &n;
    if (n.kind == Node::Kind::Neg) return constant_value(*n.lhs);
    return nullptr;
  }
  static std::size_t arity(const Node& n) {
    switch (n.kind) {
      case Node::Kind::Coord: return n.coord + 1;
      case Node::Kind::Neg:
      case Node::Kind::Call: return arity(*n.lhs);
      case Node::Kind::Binary: return std::max(arity(*n.lhs), arity(*n.rhs));
      default: return 0;
    }
  }
  static bool same(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Node::Kind::Number: return a.number == b.number;
      case Node::Kind::Pi: return true;
      case Node::Kind::Coord: return a.coord == b.coord;
      case Node::Kind::Neg: return same(*a.lhs, *b.lhs);
      case Node::Kind::Call: return a.func == b.func && same(*a.lhs, *b.lhs);
      case Node::Kind::Binary: return a.op == b.op && same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
    }
    return false;
  }

  NodePtr root_;
};

namespace detail {

class Parser {
public:
  Parser(std::string_view text, std::span<const std::string> coords) : text_(text), coords_(coords) {}

  Expression parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expression e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression parse_sum() {
    Expression e = parse_product();
    for (;;) {
      if (accept('+')) e = e + parse_product();
      else if (accept('-')) e = e - parse_product();
      else return e;
    }
  }
  Expression parse_product() {
    Expression e = parse_unary();
    for (;;) {
      if (accept('*')) e = e * parse_unary();
      else if (accept('/')) e = e / parse_unary();
      else return e;
    }
  }
  Expression parse_unary() {
    if (accept('-')) return -parse_unary();
    return parse_power();
  }
  Expression parse_power() {
    Expression base = parse_primary();
    if (accept('^')) return Expression::binary(BinOp::Pow, base, parse_unary());
    return base;
  }
  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }
  Expression parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits();
      else pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return Expression::number(v);
  }
  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static const std::map<std::string, Func> funcs = {
          {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
          {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh},
          {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt}};
      auto it = funcs.find(name);
      if (it == funcs.end()) throw UnknownIdentifier(name, start);
      ++pos_;
      Expression arg = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return Expression::call(it->second, arg);
    }
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] == name) return Expression::coordinate(i);
    if (name == "pi") return Expression::pi();
    throw UnknownIdentifier(name, start);
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;
};

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (v < 0) s = "(" + s + ")";
  return s;
}

// Precedence levels: sum 1, product 2, unary 3, power 4, atom 5.
inline void print(const ExprNode& n, std::span<const std::string> coords, int context, std::string& out) {
  using K = ExprNode::Kind;
  auto wrap = [&](int prec, auto&& body) {
    if (prec < context) out += '(';
    body();
    if (prec < context) out += ')';
  };
  switch (n.kind) {
    case K::Number: out += format_number(n.number); return;
    case K::Pi: out += "pi"; return;
    case K::Coord:
      out += n.coord < coords.size() ? coords[n.coord] : "x" + std::to_string(n.coord);
      return;
    case K::Neg:
      wrap(3, [&] {
        out += '-';
        print(*n.lhs, coords, 3, out);
      });
      return;
    case K::Call:
      out += func_name(n.func);
      out += '(';
      print(*n.lhs, coords, 1, out);
      out += ')';
      return;
    case K::Binary:
      switch (n.op) {
        case BinOp::Add:
        case BinOp::Sub:
          wrap(1, [&] {
            print(*n.lhs, coords, 1, out);
            out += n.op == BinOp::Add ? " + " : " - ";
            print(*n.rhs, coords, 2, out);
          });
          return;
        case BinOp::Mul:
        case BinOp::Div:
          wrap(2, [&] {
            print(*n.lhs, coords, 2, out);
            out += n.op == BinOp::Mul ? "*" : "/";
            print(*n.rhs, coords, 3, out);
          });
          return;
        case BinOp::Pow:
          wrap(4, [&] {
            print(*n.lhs, coords, 5, out);
            out += '^';
            print(*n.rhs, coords, 3, out);
          });
          return;
      }
  }
}

template <class S>
S eval(const ExprNode& n, std::span<const S> env, std::span<const std::string> coords);

inline std::string describe(const ExprNode& n, std::span<const std::string> coords) {
  std::string s;
  print(n, coords, 0, s);
  return s;
}

inline bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 1e9; }

template <class S>
S eval_pow(const ExprNode& n, std::span<const S> env, std::span<const std::string> coords) {
  const S base = eval<S>(*n.lhs, env, coords);
  const double b = value_of(base);
  // Constant exponents allow negative bases for integer powers.
  const ExprNode& r = *n.rhs;
  bool constant = r.kind == ExprNode::Kind::Number || r.kind == ExprNode::Kind::Pi ||
                  (r.kind == ExprNode::Kind::Neg &&
                   (r.lhs->kind == ExprNode::Kind::Number || r.lhs->kind == ExprNode::Kind::Pi));
  if (constant) {
    const double p = value_of(eval<double>(r, std::span<const double>{}, coords));
    if (is_integer(p)) {
      if (b == 0.0 && p < 0) throw DomainError("division by zero in '" + describe(n, coords) + "'");
      return ipow(base, static_cast<long>(p));
    }
    if (b < 0.0) throw DomainError("non-integer power of negative base in '" + describe(n, coords) + "'");
    if (b == 0.0) {
      if constexpr (std::is_same_v<S, double>) return S(0.0);
      else throw DomainError("non-integer power of zero in '" + describe(n, coords) + "'");
    }
    using std::pow;
    return pow(base, p);
  }
  const S expo = eval<S>(r, env, coords);
  if (b <= 0.0) throw DomainError("variable power of non-positive base in '" + describe(n, coords) + "'");
  using std::exp;
  using std::log;
  return exp(expo * log(base));
}

template <class S>
S eval(const ExprNode& n, std::span<const S> env, std::span<const std::string> coords) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number: return S(n.number);
    case K::Pi: return S(std::numbers::pi);
    case K::Coord:
      if (n.coord >= env.size()) throw DomainError("unbound coordinate in '" + describe(n, coords) + "'");
      return env[n.coord];
    case K::Neg: return -eval<S>(*n.lhs, env, coords);
    case K::Call: {
      using std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt, std::tan, std::tanh;
      const S a = eval<S>(*n.lhs, env, coords);
      const double v = value_of(a);
      switch (n.func) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Tan:
          if (std::cos(v) == 0.0) throw DomainError("tan pole in '" + describe(n, coords) + "'");
          return tan(a);
        case Func::Sinh: return sinh(a);
        case Func::Cosh: return cosh(a);
        case Func::Tanh: return tanh(a);
        case Func::Exp: return exp(a);
        case Func::Log:
          if (!(v > 0.0)) throw DomainError("log of non-positive value in '" + describe(n, coords) + "'");
          return log(a);
        case Func::Sqrt:
          if (v < 0.0) throw DomainError("sqrt of negative value in '" + describe(n, coords) + "'");
          if constexpr (!std::is_same_v<S, double>)
            if (v == 0.0) throw DomainError("sqrt not differentiable at 0 in '" + describe(n, coords) + "'");
          return sqrt(a);
      }
      break;
    }
    case K::Binary: {
      if (n.op == BinOp::Pow) return eval_pow<S>(n, env, coords);
      const S a = eval<S>(*n.lhs, env, coords);
      const S b = eval<S>(*n.rhs, env, coords);
      switch (n.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
          if (value_of(b) == 0.0) throw DomainError("division by zero in '" + describe(n, coords) + "'");
          return a / b;
        case BinOp::Pow: break;
      }
      break;
    }
  }
  throw DomainError("malformed expression node");
}

}  // namespace detail

/// Parses `text` with the standard precedence: `^` binds tightest and is
/// right-associative, then unary minus, then `* /`, then `+ -`.
inline Expression parse(std::string_view text, std::span<const std::string> coords) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j)
      if (coords[i] == coords[j]) throw ParseError("duplicate coordinate '" + coords[i] + "'", 0);
  return detail::Parser(text, coords).parse();
}

inline std::string to_string(const Expression& e, std::span<const std::string> coords) {
  return detail::describe(e.root(), coords);
}

/// Evaluates with coordinate i bound to env[i]. Works for any scalar with
/// the arithmetic operators and the elementary functions (double, Jet2).
template <class S>
S evaluate(const Expression& e, std::span<const S> env, std::span<const std::string> coords = {}) {
  return detail::eval<S>(e.root(), env, coords);
}

template <class S>
S evaluate(const Expression& e, const std::vector<S>& env, std::span<const std::string> coords = {}) {
  return evaluate<S>(e, std::span<const S>(env), coords);
}

template <class S, std::size_t N>
S evaluate(const Expression& e, const std::array<S, N>& env, std::span<const std::string> coords = {}) {
  return evaluate<S>(e, std::span<const S>(env), coords);
}

/// Name-keyed environment; every coordinate name must be bound.
template <class S>
S evaluate(const Expression& e, const std::map<std::string, S>& env, std::span<const std::string> coords) {
  std::vector<S> values;
  values.reserve(coords.size());
  for (const auto& name : coords) {
    auto it = env.find(name);
    if (it == env.end()) throw DomainError("coordinate '" + name + "' not bound");
    values.push_back(it->second);
  }
  return evaluate<S>(e, std::span<const S>(values), coords);
}

}  // namespace npgeo
