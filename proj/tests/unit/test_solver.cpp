#include <doctest.h>

#include <cmath>

#include "tsdelay/calculus.hpp"
#include "tsdelay/error.hpp"
#include "tsdelay/solver.hpp"

using namespace tsdelay;

namespace {
Fn c(double v) {
  return [v](double) { return v; };
}
}  // namespace

TEST_CASE("integer recurrence by hand") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(0.0), c(-0.5), c(1.0), 3.0};
  const Trajectory tr = solve(p);
  REQUIRE(tr.size() == 5);
  CHECK(tr.t.front() == -1.0);
  CHECK(tr.x[tr.start + 1] == 0.5);
  CHECK(tr.x[tr.start + 2] == 0.0);
  CHECK(tr.x[tr.start + 3] == -0.25);
  CHECK(residual(p, tr) == 0.0);
  CHECK(variation_of_parameters(p, 1.0) == 0.5);
  CHECK(variation_of_parameters(p, 0.0) == 1.0);
}

TEST_CASE("zero coefficients keep the initial value") {
  for (const TimeScale& ts : {TimeScale::unit_lattice(), TimeScale::real_line()}) {
    DelayProblem p{DelayFunction(additive_shifts(ts, 0.0), 1.0), c(0.0), c(0.0), c(2.5), 4.0};
    const Trajectory tr = solve(p);
    for (std::size_t i = tr.start; i < tr.size(); ++i) CHECK(tr.x[i] == 2.5);
  }
}

TEST_CASE("dense solve of the first example") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0), c(1.0), c(-1.5), c(1.0),
                 20.0};
  const Trajectory tr = solve(p);
  CHECK(tr.t.back() == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(std::fabs(tr.x.back()) <= 1.5e-2);
  CHECK(residual(p, tr) <= 1e-8);
  // variation of parameters at t = 1/3
  const double t = tr.t[tr.start + 64];
  CHECK(t == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::fabs(variation_of_parameters(p, t) - tr.x[tr.start + 64]) <= 1e-7);
  CHECK(variation_of_parameters(p, 0.0) == 1.0);
}

TEST_CASE("residual detects corruption") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0), c(1.0), c(-1.5), c(1.0),
                 3.0};
  Trajectory tr = solve(p);
  tr.x[tr.start + 50] += 1.0;
  CHECK(residual(p, tr) > 0.1);
  DelayProblem pz{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(0.0), c(-0.5), c(1.0), 6.0};
  Trajectory tz = solve(pz);
  tz.x[tz.start + 3] += 1.0;
  CHECK(residual(pz, tz) > 0.1);
}

TEST_CASE("lattice solves are reproducible") {
  DelayProblem p{DelayFunction(geometric_shifts(2.0), 2.0), [](double t) { return -0.1 / t; },
                 [](double t) { return -0.2 / t; }, c(1.0), 1024.0};
  CHECK(solve(p).x == solve(p).x);
}

TEST_CASE("csv export") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(0.0), c(-0.5), c(1.0), 2.0};
  const std::string csv = solve(p).to_csv();
  CHECK(csv.rfind("t,x,mu,delayed_t,delay_deriv\n", 0) == 0);
  CHECK(csv.find("\n-1,1,1,,\n") != std::string::npos);
  CHECK(csv.find("\n1,0.5,1,0,1\n") != std::string::npos);
}

TEST_CASE("variation of parameters outside the history regime") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(0.0), c(-0.5), c(1.0), 5.0};
  try {
    variation_of_parameters(p, 3.0);
    FAIL("expected OutOfHistoryRegime");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfHistoryRegime);
  }
}

TEST_CASE("isolated gap detection") {
  CHECK(isolated_gap(DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0)));
  CHECK_FALSE(isolated_gap(DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0)));
  CHECK(isolated_gap(DelayFunction(geometric_shifts(2.0), 2.0)));
  CHECK_FALSE(isolated_gap(DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 2.0)));
}

TEST_CASE("table history is exact at nodes") {
  Fn h = table_history({{-1.0, 2.0}, {-0.5, 1.0}, {0.0, 3.0}, {0.25, 0.0}});
  CHECK(h(-0.5) == 1.0);
  CHECK(h(0.0) == 3.0);
  Fn lin = table_history({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}});
  CHECK(lin(1.7) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("rewritten form: A^Delta = Q x along the solution") {
  // A(t) = x(t) + int_{delta_-(h,t)}^t b(delta_+(h,s)) x(s) Ds; on Z with h = 2.
  DelayFunction df(additive_shifts(TimeScale::unit_lattice(), 0.0), 2.0);
  auto a = [](double t) { return -0.3 + 0.01 * t; };
  auto b = [](double t) { return 0.2 * std::cos(t); };
  DelayProblem p{df, a, b, c(1.0), 30.0};
  const Trajectory tr = solve(p);
  const GridFunction g = tr.grid();
  auto x = [&](double s) { return g.values[g.locate(s)]; };
  auto A = [&](double t) {
    return x(t) + TimeScale::unit_lattice().delta_integral([&](double s) { return b(df.advance(s)) * x(s); }, df(t), t);
  };
  for (double t = 0.0; t < 29.0; t += 1.0) {
    const double lhs = A(t + 1.0) - A(t);
    const double rhs = (a(t) + b(df.advance(t))) * x(t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
