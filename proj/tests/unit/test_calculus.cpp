#include <doctest.h>

#include <cmath>

#include "tsdelay/calculus.hpp"
#include "tsdelay/error.hpp"

using namespace tsdelay;

namespace {
RegressiveFunction constant(const TimeScale& ts, double c) {
  return {ts, [c](double) { return c; }};
}
}  // namespace

TEST_CASE("circle minus") {
  CHECK(circle_minus(constant(TimeScale::unit_lattice(), 1.0), 3.0) == -0.5);
  CHECK(circle_minus(constant(TimeScale::real_line(), 0.7), 3.0) == -0.7);
  try {
    circle_minus(constant(TimeScale::unit_lattice(), -1.0), 2.0);
    FAIL("expected NotRegressive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotRegressive);
  }
}

TEST_CASE("exponential examples") {
  CHECK(ts_exponential(constant(TimeScale::unit_lattice(), 0.0), 5.0, 2.0) == 1.0);
  CHECK(ts_exponential(constant(TimeScale::unit_lattice(), 1.0), 3.0, 0.0) == 8.0);
  CHECK(ts_exponential(constant(TimeScale::real_line(), -0.3), 2.0, 0.5) ==
        doctest::Approx(std::exp(-0.45)).epsilon(1e-10));
  // Sign tracking when 1 + mu p < 0.
  CHECK(ts_exponential(constant(TimeScale::unit_lattice(), -3.0), 2.0, 0.0) == 4.0);
  CHECK(ts_exponential(constant(TimeScale::unit_lattice(), -3.0), 3.0, 0.0) == -8.0);
}

TEST_CASE("exponential on a mixed scale multiplies the pieces") {
  const auto u = TimeScale::union_of_intervals({{0.0, 1.0}, {2.0, 3.0}});
  const auto p = constant(u, 0.5);
  // exp(0.5) on [0,1], factor 1 + 1*0.5 across the gap, exp(0.5) on [2,3].
  CHECK(ts_exponential(p, 3.0, 0.0) == doctest::Approx(std::exp(1.0) * 1.5).epsilon(1e-10));
}

TEST_CASE("regressivity classes") {
  const auto z = TimeScale::unit_lattice();
  CHECK(constant(z, 0.5).classify(0, 5, 1) == Regressivity::positive);
  CHECK(constant(z, -3.0).classify(0, 5, 1) == Regressivity::regressive);
  CHECK(constant(z, -1.0).classify(0, 5, 1) == Regressivity::none);
}

TEST_CASE("exponential table agrees with the direct exponential") {
  const auto r = TimeScale::real_line();
  RegressiveFunction p{r, [](double t) { return std::sin(t) - 0.2; }};
  ExponentialTable tab(p, 0.0, 4.0, 0.01);
  for (double t : {0.0, 0.123, 1.5, 3.999, 4.0}) CHECK(tab(t) == doctest::Approx(ts_exponential(p, t, 0.0)).epsilon(1e-9));
  CHECK(tab.between(3.0, 1.0) == doctest::Approx(ts_exponential(p, 3.0, 1.0)).epsilon(1e-9));
}

TEST_CASE("substitution examples") {
  DelayFunction dz(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0);
  CHECK(delayed_integral_split(dz, [](double) { return 1.0; }, 4.0) == 1.0);
  DelayFunction dq(geometric_shifts(2.0), 2.0);
  CHECK(delayed_integral_split(dq, [](double) { return 1.0; }, 4.0) == 2.0);
  DelayFunction dr(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0);
  CHECK(delayed_integral_split(dr, [](double s) { return s; }, 1.0) == doctest::Approx(5.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("leibniz examples") {
  DelayFunction dz(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0);
  auto one = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  CHECK(leibniz_delay_derivative(dz, one, zero, 5.0) == 0.0);
  auto s_only = [](double, double s) { return s; };
  CHECK(leibniz_delay_derivative(dz, s_only, zero, 5.0) == 1.0);
  DelayFunction dr(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0);
  CHECK(leibniz_delay_derivative(dr, s_only, zero, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("interchange examples") {
  DelayFunction dz2(additive_shifts(TimeScale::unit_lattice(), 0.0), 2.0);
  auto one = [](double) { return 1.0; };
  auto p = interchange_double(dz2, one, 2.0);
  CHECK(p.lhs == 3.0);
  CHECK(p.rhs == 3.0);
  DelayFunction dr(additive_shifts(TimeScale::real_line(), 0.0), 1.0);
  auto q = interchange_double(dr, one, 1.0);
  CHECK(q.lhs == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(q.rhs == doctest::Approx(0.5).epsilon(1e-10));
  DelayFunction dz1(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0);
  auto c = interchange_double(dz1, [](double) { return 2.5; }, 7.0);
  CHECK(c.lhs == 2.5);
  CHECK(c.rhs == 2.5);
}

TEST_CASE("|x| delta derivative") {
  const auto z = TimeScale::unit_lattice();
  GridFunction alt({0, 1, 2}, {1, -1, 1}, z);
  CHECK(abs_delta_derivative(alt, 0.0) == 0.0);
  GridFunction pw({0, 1, 2}, {1, 2, 4}, z);
  CHECK(abs_delta_derivative(pw, 1.0) == 2.0);
  const auto r = TimeScale::real_line();
  std::vector<double> pts, vals;
  for (int i = 0; i <= 40; ++i) {
    pts.push_back(1.0 + i * 0.05);
    vals.push_back(1.0 + i * 0.05);
  }
  GridFunction lin(pts, vals, r);
  CHECK(abs_delta_derivative(lin, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  GridFunction zero({0, 1, 2}, {0, 1, 2}, z);
  try {
    abs_delta_derivative(zero, 0.0);
    FAIL("expected ZeroValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroValue);
  }
}

TEST_CASE("|x| derivative on scattered points is the difference quotient of |x|") {
  const auto q = TimeScale::q_lattice(2.0);
  GridFunction x({1, 2, 4, 8}, {3, -5, 2, -1}, q);
  for (double t : {1.0, 2.0, 4.0}) {
    const std::size_t i = x.locate(t);
    CHECK(abs_delta_derivative(x, t) == (std::fabs(x.values[i + 1]) - std::fabs(x.values[i])) / q.mu(t));
  }
}
