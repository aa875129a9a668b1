#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "tsdelay/expr.hpp"

using namespace tsdelay;
using namespace tsdelay::expr;

namespace {

// Evaluates while parsing, with no tree in between.
class Reference {
 public:
  Reference(std::string s, double t) : s_(std::move(s)), t_(t) {}
  double run() {
    const double v = sum();
    skip();
    REQUIRE(i_ == s_.size());
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && s_[i_] == ' ') ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v = v + product();
      else if (eat('-')) v = v - product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v = v * unary();
      else if (eat('/')) v = v / unary();
      else return v;
    }
  }
  double unary() {
    skip();
    if (eat('-')) {
      skip();
      if (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.') {
        const double lit = -literal();
        if (eat('^')) return -std::pow(-lit, unary());
        return lit;
      }
      return -unary();
    }
    const double base = primary();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double literal() {
    std::size_t used = 0;
    const double v = std::stod(s_.substr(i_), &used);
    i_ += used;
    return v;
  }
  double primary() {
    skip();
    if (eat('(')) {
      const double v = sum();
      REQUIRE(eat(')'));
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.') return literal();
    std::size_t j = i_;
    while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) ++j;
    const std::string w = s_.substr(i_, j - i_);
    i_ = j;
    if (w == "t") return t_;
    REQUIRE(eat('('));
    const double a = sum();
    REQUIRE(eat(')'));
    if (w == "exp") return std::exp(a);
    if (w == "log") return std::log(a);
    if (w == "sin") return std::sin(a);
    if (w == "cos") return std::cos(a);
    if (w == "sqrt") return std::sqrt(a);
    return std::fabs(a);
  }
  std::string s_;
  double t_;
  std::size_t i_ = 0;
};

NodePtr random_tree(std::mt19937_64& g, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  switch (pick(g)) {
    case 0: return make_literal(std::uniform_real_distribution<>(-50.0, 50.0)(g));
    case 1: return make_variable();
    case 2: return make_unary(Kind::Negate, random_tree(g, depth - 1));
    case 3: return make_binary(Kind::Add, random_tree(g, depth - 1), random_tree(g, depth - 1));
    case 4: return make_binary(Kind::Subtract, random_tree(g, depth - 1), random_tree(g, depth - 1));
    case 5: return make_binary(Kind::Multiply, random_tree(g, depth - 1), random_tree(g, depth - 1));
    case 6: return make_binary(Kind::Divide, random_tree(g, depth - 1), random_tree(g, depth - 1));
    case 7: return make_binary(Kind::Power, random_tree(g, depth - 1), make_literal(std::uniform_int_distribution<int>(-3, 3)(g)));
    default: return make_call(static_cast<Func>(std::uniform_int_distribution<int>(0, 5)(g)), random_tree(g, depth - 1));
  }
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b) || (std::isnan(a) && std::isnan(b));
}

}  // namespace

TEST_CASE("parse examples") {
  const Expr e = parse("-3/2");
  CHECK(e(0.0) == -1.5);
  CHECK_FALSE(e.depends_on_t());
  CHECK(parse("2*exp(-t)+1")(0.0) == 3.0);
  CHECK(parse("t*t - 1")(2.0) == 3.0);
  CHECK(parse("sqrt(t^2+1)")(0.0) == 1.0);
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("2^3^2")(0.0) == 512.0);
  CHECK(parse("-2^2")(0.0) == -4.0);
  CHECK(parse("2^-1")(0.0) == 0.5);
  CHECK(parse("8/4/2")(0.0) == 1.0);
  CHECK(parse("1-2-3")(0.0) == -4.0);
  CHECK(parse("1+2*3")(0.0) == 7.0);
  CHECK(parse("-t*2")(3.0) == -6.0);
  CHECK(parse("  ( t +1 ) * 2 ")(1.0) == 4.0);
  CHECK(parse("1.5e-3")(0.0) == 0.0015);
}

TEST_CASE("syntax errors carry offsets and expected sets") {
  auto offset_of = [](const char* s) -> long {
    try {
      parse(s);
    } catch (const SyntaxError& e) {
      CHECK_FALSE(e.expected().empty());
      CHECK(std::string(e.diagnostic()).rfind(std::to_string(e.offset()) + ":", 0) == 0);
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("t^") == 2);
  CHECK(offset_of("2t") == 1);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("(1+2") == 4);
  CHECK(offset_of("foo(1)") == 0);
  CHECK(offset_of("exp 1") == 4);
  CHECK(offset_of("2^t") == 2);
  CHECK(offset_of("0x10") == 1);
  CHECK(offset_of("1e") == 2);
  CHECK(offset_of("1 $ 2") == 2);
}

TEST_CASE("evaluation errors carry the offending span") {
  try {
    parse("1/t")(0.0);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.span().begin == 0);
    CHECK(e.span().end == 3);
  }
  try {
    parse("2 + log(t - 1)")(1.0);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.span().begin == 4);
    CHECK(e.span().end == 14);
  }
  CHECK_THROWS_AS(parse("sqrt(t)")(-1.0), EvalError);
}

TEST_CASE("canonical format") {
  CHECK(format(parse("-1.5")) == "(-1.5)");
  CHECK(format(parse("-(2)")) == "(-(2))");
  CHECK(format(parse("2*exp(-t)+1")) == "((2*exp((-t)))+1)");
  CHECK(format(parse("2^3^2")) == "(2^(3^2))");
  CHECK(format(parse("0.1")) == "0.1");
  for (const char* s : {"2*exp(-t)+1", "2^3^2", "-2^2", "-(2)", "abs(-t)/cos(t)-1e300", "--t"}) {
    const Expr e = parse(s);
    CHECK(same_tree(parse(format(e)).root(), e.root()));
  }
}

TEST_CASE("round trip over random trees") {
  std::mt19937_64 g(2024);
  for (int i = 0; i < 1000; ++i) {
    const Expr e(random_tree(g, 6), "");
    const std::string text = format(e);
    CHECK_MESSAGE(same_tree(parse(text).root(), e.root()), text);
  }
}

TEST_CASE("evaluation matches the reference evaluator bit for bit") {
  std::mt19937_64 g(77);
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    const Expr e(random_tree(g, 5), "");
    const std::string text = format(e);
    const Expr parsed = parse(text);
    for (double t : {-1.25, 0.5, 2.0, 3.7}) {
      double mine;
      try {
        mine = parsed(t);
      } catch (const EvalError&) {
        continue;
      }
      const double ref = Reference(text, t).run();
      CHECK_MESSAGE(same_bits(mine, ref), text << " at t=" << t);
      ++compared;
    }
  }
  CHECK(compared > 1000);
}
