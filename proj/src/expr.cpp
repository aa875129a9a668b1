#include "tsdelay/expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace tsdelay::expr {

namespace {

constexpr std::string_view kFuncs[] = {"exp", "log", "sin", "cos", "sqrt", "abs"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr run() {
    skip();
    if (pos_ == s_.size()) fail("empty expression", operand_set());
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) {
      fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"operator", "end of input"});
    }
    return n;
  }

 private:
  static std::vector<std::string> operand_set() { return {"number", "t", "function", "'('", "'-'"}; }

  [[noreturn]] void fail(const std::string& message, std::vector<std::string> expected) const {
    throw SyntaxError(pos_, message, std::move(expected));
  }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  NodePtr node(Kind k, std::size_t begin, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0,
               Func f = Func::exp) {
    return std::make_shared<const Node>(Node{k, value, f, std::move(lhs), std::move(rhs), Span{begin, pos_}});
  }

  NodePtr sum() {
    const std::size_t begin = (skip(), pos_);
    NodePtr lhs = product();
    while (peek('+') || peek('-')) {
      const Kind k = s_[pos_++] == '+' ? Kind::Add : Kind::Subtract;
      NodePtr rhs = product();
      lhs = node(k, begin, lhs, rhs);
    }
    return lhs;
  }

  NodePtr product() {
    const std::size_t begin = (skip(), pos_);
    NodePtr lhs = unary();
    while (peek('*') || peek('/')) {
      const Kind k = s_[pos_++] == '*' ? Kind::Multiply : Kind::Divide;
      NodePtr rhs = unary();
      lhs = node(k, begin, lhs, rhs);
    }
    return lhs;
  }

  NodePtr unary() {
    skip();
    const std::size_t begin = pos_;
    if (peek('-')) {
      ++pos_;
      skip();
      // A minus directly in front of a numeric literal is part of the literal.
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
        return power(begin, -1.0);
      }
      NodePtr operand = unary();
      return node(Kind::Negate, begin, operand);
    }
    return power(begin, 1.0);
  }

  // primary ('^' unary)?; sign folds into a leading numeric literal.
  NodePtr power(std::size_t begin, double sign) {
    NodePtr base;
    if (sign < 0.0) {
      NodePtr lit = number();
      base = node(Kind::Literal, begin, nullptr, nullptr, -lit->value);
    } else {
      base = primary();
    }
    if (!peek('^')) return base;
    ++pos_;
    skip();
    const std::size_t exp_at = pos_;
    if (pos_ == s_.size()) fail("unexpected end of input", operand_set());
    NodePtr exponent = unary();
    if (mentions_t(*exponent)) {
      pos_ = exp_at;
      fail("exponent must be constant", {"number", "'('", "'-'"});
    }
    if (sign < 0.0) {
      // -2^2 is -(2^2): undo the fold.
      NodePtr positive = node(Kind::Literal, begin + 1, nullptr, nullptr, -base->value);
      NodePtr pw = node(Kind::Power, begin + 1, positive, exponent);
      return node(Kind::Negate, begin, pw);
    }
    return node(Kind::Power, begin, base, exponent);
  }

  static bool mentions_t(const Node& n) {
    if (n.kind == Kind::Variable) return true;
    return (n.lhs && mentions_t(*n.lhs)) || (n.rhs && mentions_t(*n.rhs));
  }

  NodePtr number() {
    skip();
    const std::size_t begin = pos_;
    std::size_t p = pos_;
    auto digits = [&] {
      const std::size_t start = p;
      while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
      return p > start;
    };
    bool any = digits();
    if (p < s_.size() && s_[p] == '.') {
      ++p;
      any = digits() || any;
    }
    if (!any) fail("malformed number", {"number"});
    if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      const std::size_t mark = q;
      while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
      if (q == mark) {
        pos_ = q;
        fail("malformed exponent", {"digit"});
      }
      p = q;
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + begin, s_.data() + p, v);
    if (res.ec != std::errc() || !std::isfinite(v)) {
      fail("number out of range", {"number"});
    }
    pos_ = p;
    return node(Kind::Literal, begin, nullptr, nullptr, v);
  }

  NodePtr primary() {
    skip();
    const std::size_t begin = pos_;
    if (pos_ == s_.size()) fail("unexpected end of input", operand_set());
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      skip();
      if (pos_ == s_.size()) fail("unexpected end of input", operand_set());
      NodePtr inner = sum();
      if (!peek(')')) {
        if (pos_ == s_.size()) fail("unexpected end of input", {"operator", "')'"});
        fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"operator", "')'"});
      }
      ++pos_;
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t p = pos_;
      while (p < s_.size() && std::isalnum(static_cast<unsigned char>(s_[p]))) ++p;
      const std::string_view word = s_.substr(pos_, p - pos_);
      if (word == "t") {
        pos_ = p;
        return node(Kind::Variable, begin);
      }
      for (std::size_t k = 0; k < std::size(kFuncs); ++k) {
        if (word != kFuncs[k]) continue;
        pos_ = p;
        if (!peek('(')) {
          if (pos_ == s_.size()) fail("unexpected end of input", {"'('"});
          fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"'('"});
        }
        ++pos_;
        skip();
        if (pos_ == s_.size()) fail("unexpected end of input", operand_set());
        NodePtr arg = sum();
        if (!peek(')')) {
          if (pos_ == s_.size()) fail("unexpected end of input", {"operator", "')'"});
          fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"operator", "')'"});
        }
        ++pos_;
        return node(Kind::Call, begin, arg, nullptr, 0.0, static_cast<Func>(k));
      }
      fail("unknown identifier '" + std::string(word) + "'", {"t", "function"});
    }
    fail("unexpected '" + std::string(1, c) + "'", operand_set());
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, double t, const std::string& src) {
  auto error = [&](const std::string& msg) -> EvalError {
    const std::string snippet =
        n.span.end <= src.size() && n.span.begin < n.span.end ? src.substr(n.span.begin, n.span.end - n.span.begin)
                                                                : format(n);
    return EvalError(n.span, msg, snippet);
  };
  switch (n.kind) {
    case Kind::Literal: return n.value;
    case Kind::Variable: return t;
    case Kind::Negate: return -eval_node(*n.lhs, t, src);
    case Kind::Add: return eval_node(*n.lhs, t, src) + eval_node(*n.rhs, t, src);
    case Kind::Subtract: return eval_node(*n.lhs, t, src) - eval_node(*n.rhs, t, src);
    case Kind::Multiply: return eval_node(*n.lhs, t, src) * eval_node(*n.rhs, t, src);
    case Kind::Divide: {
      const double l = eval_node(*n.lhs, t, src);
      const double r = eval_node(*n.rhs, t, src);
      if (r == 0.0) throw error("division by zero");
      return l / r;
    }
    case Kind::Power: {
      const double l = eval_node(*n.lhs, t, src);
      const double r = eval_node(*n.rhs, t, src);
      const double v = std::pow(l, r);
      if (std::isnan(v)) throw error("power undefined");
      if (l == 0.0 && r < 0.0) throw error("division by zero");
      return v;
    }
    case Kind::Call: {
      const double a = eval_node(*n.lhs, t, src);
      switch (n.func) {
        case Func::exp: return std::exp(a);
        case Func::log:
          if (!(a > 0.0)) throw error("log of a non-positive value");
          return std::log(a);
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::sqrt:
          if (a < 0.0) throw error("sqrt of a negative value");
          return std::sqrt(a);
        case Func::abs: return std::fabs(a);
      }
    }
  }
  throw error("bad node");
}

void format_into(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Literal: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, n.value);
      if (n.value < 0.0 || std::signbit(n.value)) {
        out += '(';
        out.append(buf, res.ptr);
        out += ')';
      } else {
        out.append(buf, res.ptr);
      }
      return;
    }
    case Kind::Variable: out += 't'; return;
    case Kind::Negate:
      out += "(-";
      if (n.lhs->kind == Kind::Literal && !std::signbit(n.lhs->value)) {
        out += '(';
        format_into(*n.lhs, out);
        out += ')';
      } else {
        format_into(*n.lhs, out);
      }
      out += ')';
      return;
    case Kind::Call:
      out += name_of(n.func);
      out += '(';
      format_into(*n.lhs, out);
      out += ')';
      return;
    default: break;
  }
  const char op = n.kind == Kind::Add        ? '+'
                  : n.kind == Kind::Subtract ? '-'
                  : n.kind == Kind::Multiply ? '*'
                  : n.kind == Kind::Divide   ? '/'
                                             : '^';
  out += '(';
  format_into(*n.lhs, out);
  out += op;
  format_into(*n.rhs, out);
  out += ')';
}

}  // namespace

std::string_view name_of(Func f) { return kFuncs[static_cast<std::size_t>(f)]; }

SyntaxError::SyntaxError(std::size_t offset, const std::string& message, std::vector<std::string> expected)
    : Error(ErrorCode::Syntax, std::to_string(offset) + ":" + message + "; expected one of {" + join(expected) + "}"),
      offset_(offset),
      expected_(std::move(expected)) {
  diagnostic_ = std::to_string(offset_) + ":" + message + "; expected one of {" + join(expected_) + "}";
}

EvalError::EvalError(Span span, const std::string& message, const std::string& snippet)
    : Error(ErrorCode::Eval, std::to_string(span.begin) + ":" + message + " in '" + snippet + "'"), span_(span) {}

bool Expr::depends_on_t() const {
  struct Walk {
    static bool go(const Node& n) {
      if (n.kind == Kind::Variable) return true;
      return (n.lhs && go(*n.lhs)) || (n.rhs && go(*n.rhs));
    }
  };
  return Walk::go(*root_);
}

double Expr::operator()(double t) const { return eval_node(*root_, t, source_); }

Fn Expr::as_function() const {
  return [e = *this](double t) { return e(t); };
}

Expr parse(std::string_view text) { return Expr(Parser(text).run(), std::string(text)); }

double eval(const Expr& e, double t) { return e(t); }

std::string format(const Node& n) {
  std::string out;
  format_into(n, out);
  return out;
}

std::string format(const Expr& e) { return format(e.root()); }

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Literal: return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    case Kind::Variable: return true;
    case Kind::Negate: return same_tree(*a.lhs, *b.lhs);
    case Kind::Call: return a.func == b.func && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

NodePtr make_literal(double v) { return std::make_shared<const Node>(Node{Kind::Literal, v, Func::exp, nullptr, nullptr, {}}); }
NodePtr make_variable() { return std::make_shared<const Node>(Node{Kind::Variable, 0.0, Func::exp, nullptr, nullptr, {}}); }
NodePtr make_unary(Kind k, NodePtr operand) {
  return std::make_shared<const Node>(Node{k, 0.0, Func::exp, std::move(operand), nullptr, {}});
}
NodePtr make_binary(Kind k, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(Node{k, 0.0, Func::exp, std::move(lhs), std::move(rhs), {}});
}
NodePtr make_call(Func f, NodePtr arg) {
  return std::make_shared<const Node>(Node{Kind::Call, 0.0, f, std::move(arg), nullptr, {}});
}

}  // namespace tsdelay::expr
