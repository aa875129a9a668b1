#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tsdelay/error.hpp"
#include "tsdelay/time_scale.hpp"

namespace tsdelay::expr {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class Kind { Literal, Variable, Negate, Add, Subtract, Multiply, Divide, Power, Call };
enum class Func { exp, log, sin, cos, sqrt, abs };

std::string_view name_of(Func f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;  // Literal
  Func func = Func::exp;  // Call
  NodePtr lhs;  // operand of Negate and Call, left operand otherwise
  NodePtr rhs;
  Span span;
};

class Expr {
 public:
  Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }
  const std::string& source() const { return source_; }
  bool depends_on_t() const;

  double operator()(double t) const;
  Fn as_function() const;

 private:
  NodePtr root_;
  std::string source_;
};

/// Raised by parse; what() is "Syntax: offset:message".
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message, std::vector<std::string> expected);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  /// "offset:message"
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string diagnostic_;
};

class EvalError : public Error {
 public:
  EvalError(Span span, const std::string& message, const std::string& snippet);
  Span span() const { return span_; }

 private:
  Span span_;
};

Expr parse(std::string_view text);
double eval(const Expr& e, double t);
/// Fully parenthesized canonical text; parse(format(e)) equals e structurally.
std::string format(const Expr& e);
std::string format(const Node& n);

/// Structural equality ignoring source spans; literals compare bit-exactly.
bool same_tree(const Node& a, const Node& b);

NodePtr make_literal(double v);
NodePtr make_variable();
NodePtr make_unary(Kind k, NodePtr operand);
NodePtr make_binary(Kind k, NodePtr lhs, NodePtr rhs);
NodePtr make_call(Func f, NodePtr arg);

}  // namespace tsdelay::expr
