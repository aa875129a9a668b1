#include <doctest.h>

#include <cmath>

#include "tsdelay/error.hpp"
#include "tsdelay/stability.hpp"

using namespace tsdelay;

namespace {
Fn c(double v) {
  return [v](double) { return v; };
}
DelayProblem example1(double horizon = 20.0) {
  return {DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0), c(1.0), c(-1.5), c(1.0), horizon};
}
DelayProblem integers(double horizon = 40.0) {
  return {DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(0.0), c(-0.25), c(1.0), horizon};
}
}  // namespace

TEST_CASE("initial functional of the first example") {
  const auto v = initial_functional(example1(), 1.0 / 3.0);
  CHECK(v.A == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(v.H == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(v.V == doctest::Approx(7.0 / 24.0).epsilon(1e-13));
}

TEST_CASE("functionals with b = 0 reduce to x^2") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 1.0), c(-0.5), c(0.0), c(1.0), 10.0};
  const Trajectory tr = solve(p);
  const auto f = functionals(p, tr, 2.0);
  for (std::size_t i = 0; i < f.t.size(); ++i) CHECK(f.V[i] == f.x[i] * f.x[i]);
}

TEST_CASE("double integral agrees with the interchanged form") {
  const auto p = example1(4.0);
  const auto f = functionals(p, solve(p), 1.0 / 3.0);
  for (std::size_t i = 0; i < f.t.size(); ++i) CHECK(std::fabs(f.H[i] - f.H_interchange[i]) <= 1e-9);
  const auto pz = integers(20.0);
  const auto fz = functionals(pz, solve(pz), 1.0);
  // brute force on Z: H(t) = sum_{s=t-1}^{t-1} sum_{u=s}^{t-1} b^2 x(u)^2 = b^2 x(t-1)^2
  const Trajectory tz = solve(pz);
  for (std::size_t i = 0; i < fz.t.size(); ++i) {
    const double xm = tz.x[tz.start + i - 1];
    CHECK(fz.H[i] == 0.0625 * xm * xm);
    CHECK(fz.H_interchange[i] == fz.H[i]);
  }
}

TEST_CASE("Lyapunov condition examples") {
  const auto rep = check_lyapunov_condition(example1(), 1.0 / 3.0);
  CHECK(rep.holds());
  const auto lt = lyapunov_terms(example1(), 1.0 / 3.0, 2.0);
  CHECK(lt.lower == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(lt.upper == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(lt.Q == -0.5);

  const auto z = lyapunov_terms(integers(), 1.0, 3.0);
  CHECK(z.lower == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(z.upper == -3.0 / 16.0);
  CHECK(z.Q == -0.25);
  CHECK(check_lyapunov_condition(integers(), 1.0).holds());

  DelayProblem grow{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0), c(1.0), c(0.0), c(1.0), 5.0};
  CHECK_FALSE(check_lyapunov_condition(grow, 1.0).holds());
}

TEST_CASE("strict variant is tighter") {
  // beta + lam(beta + mu) against beta + lam beta + mu; equal when lam = 1 on Z
  const auto loose = lyapunov_terms(integers(), 2.0, 3.0, false);
  const auto strict = lyapunov_terms(integers(), 2.0, 3.0, true);
  CHECK(loose.lower == -0.4);
  CHECK(strict.lower == -0.5);
  CHECK(strict.lower < loose.lower);
}

TEST_CASE("alpha condition") {
  CHECK(check_alpha_condition(example1(), 1.0 / 3.0, 1.0 / 6.0).holds());
  DelayProblem ex2{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 2.0 / 3.0), c(0.0), c(-0.9), c(1.0),
                   20.0};
  CHECK(check_alpha_condition(ex2, 1.5, 1.0 / 3.0).holds());
  try {
    alpha_candidates(integers().delay);
    FAIL("expected EmptyAlphaInterval");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyAlphaInterval);
  }
}

TEST_CASE("split-window bound") {
  const auto p = example1();
  const SplitWindowBound b(p, 1.0 / 3.0, 1.0 / 6.0, 7.0 / 24.0);
  CHECK(b.xi(5.0) == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
  // at t = alpha the exponent vanishes
  CHECK(b(1.0 / 6.0) == doctest::Approx(std::sqrt(2.0 * 7.0 / 24.0 / (1.0 - 6.0 / 7.0))).epsilon(1e-12));
  CHECK(b(20.0) == doctest::Approx(std::sqrt(49.0 / 12.0) * std::exp(-(20.0 - 1.0 / 6.0) / 4.0)).epsilon(1e-9));
}

TEST_CASE("isolated-gap bound") {
  const auto p = integers();
  const auto v0 = initial_functional(p, 1.0);
  CHECK(v0.V == 0.625);
  const IsolatedGapBound b(p, 1.0, v0.V);
  CHECK(b(0.0) == std::sqrt(2.0 * 0.625));
  CHECK(b(16.0) == doctest::Approx(std::sqrt(1.25) * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("eta/gamma bound with a = 0, lam = 1, h = 1") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0), c(0.0), c(0.4), c(1.0), 5.0};
  const EtaGammaBound eg(p, 1.0);
  CHECK(eg.eta(2.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(eg.gamma(2.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(eg.condition().holds());
  DelayProblem big{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0), c(0.0), c(0.6), c(1.0), 5.0};
  try {
    EtaGammaBound(big, 1.0).checked(2.0);
    FAIL("expected DelayWeightTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DelayWeightTooLarge);
  }
}

TEST_CASE("eta/gamma initial value on a lattice") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 3.0), c(0.0), c(0.1), c(2.0), 10.0};
  const EtaGammaBound eg(p, 0.5);
  // |c| (1 + lam eta(t0) * 3) with eta(t0) = 1/(1 + lam * 3)
  CHECK(eg.initial_value() == doctest::Approx(2.0 * (1.0 + 0.5 * (1.0 / 2.5) * 3.0)).epsilon(1e-14));
}

TEST_CASE("instability example") {
  DelayProblem p{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 0.5), c(-0.25), c(0.5), c(1.0), 40.0};
  const auto chk = check_instability(p, 1.0);
  CHECK(chk.report.holds());
  CHECK(chk.V0 == doctest::Approx(1.4375).epsilon(1e-13));
  CHECK(chk.C == 0.5);
  DelayProblem nob{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 0.5), c(1.0), c(0.0), c(1.0), 10.0};
  try {
    check_instability(nob, 1.0);
    FAIL("expected ZeroB");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroB);
  }
}

TEST_CASE("certify verdicts") {
  SearchGrids g;
  g.lambdas = {1.0 / 3.0};
  const auto c1 = certify(example1(), g);
  CHECK(c1.verdict == Verdict::ExpStableSplitWindow);
  CHECK(*c1.alpha == doctest::Approx(1.0 / 6.0));
  const auto c2 = certify(integers());
  CHECK(c2.verdict == Verdict::ExpStableIsolatedGap);
  CHECK(*c2.lambda == 1.0);
  DelayProblem grow{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0), c(1.0), c(0.0), c(1.0), 5.0};
  CHECK(certify(grow).verdict == Verdict::NotCertified);
}

TEST_CASE("parallel search gives the same certificate") {
  SearchGrids one, four;
  four.jobs = 4;
  const auto a = certify(integers(), one);
  const auto b = certify(integers(), four);
  CHECK(a.to_text() == b.to_text());
}

TEST_CASE("Lyapunov decrease along the integer trajectory") {
  const auto p = integers(60.0);
  const Trajectory tr = solve(p);
  const auto f = functionals(p, tr, 1.0);
  for (std::size_t i = 0; i + 1 < f.t.size(); ++i) {
    const double dV = f.V[i + 1] - f.V[i];
    CHECK(dV <= f.Q[i] * f.V[i] + 1e-7);
  }
}

TEST_CASE("literature conditions") {
  const auto r1 = check_literature_conditions(example1(), 1.0);
  CHECK_FALSE(r1.find("dominant-decay")->holds);
  DelayProblem ok{DelayFunction(additive_shifts(TimeScale::real_line(), 0.0), 1.0), c(-2.0), c(0.5), c(1.0), 5.0};
  CHECK(check_literature_conditions(ok, 1.0).find("dominant-decay")->holds);
}

TEST_CASE("certificate csv has the documented header") {
  SearchGrids g;
  g.lambdas = {1.0};
  const auto p = integers(10.0);
  const auto cert = certify(p, g);
  const std::string csv = certificate_csv(p, solve(p), cert);
  CHECK(csv.rfind("t,x,V,bound,Q,beta\n", 0) == 0);
  CHECK(csv.find("\n0,1,0.625,") != std::string::npos);
}
