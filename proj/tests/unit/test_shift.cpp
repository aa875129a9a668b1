#include <doctest.h>

#include <cmath>

#include "tsdelay/error.hpp"
#include "tsdelay/shift.hpp"

using namespace tsdelay;

TEST_CASE("additive shifts and their rebasing") {
  const auto r = additive_shifts(TimeScale::real_line(), 0.0);
  CHECK(r.delta_minus(1.0, 5.0) == 4.0);
  CHECK(r.delta_plus(1.0, 5.0) == 6.0);
  const auto r1 = rebase_initial_point(r, 1.0);
  CHECK(r1.t0 == 1.0);
  // rebased forward shift is t - 1 + s
  CHECK(r1.delta_plus(3.0, 1.0) == 3.0);
  CHECK(r1.delta_plus(2.5, 4.0) == 4.0 - 1.0 + 2.5);
  CHECK(r1.delta_minus(2.5, 4.0) == 4.0 + 1.0 - 2.5);
}

TEST_CASE("step lattice rebased at h*lam") {
  const auto hz = additive_shifts(TimeScale::step_lattice(0.5), 0.0);
  const auto moved = rebase_initial_point(hz, 1.5);
  CHECK(moved.delta_minus(2.0, 3.0) == 3.0 + 1.5 - 2.0);
}

TEST_CASE("geometric shifts") {
  const auto q = geometric_shifts(2.0);
  CHECK(q.delta_minus(2.0, 8.0) == 4.0);
  CHECK(q.delta_plus(2.0, 8.0) == 16.0);
  CHECK(q.sticky_point.value() == 0.0);
  CHECK(q.t0 == 1.0);
}

TEST_CASE("delay function basics") {
  DelayFunction df(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0);
  CHECK(df(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(df.advance(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(df.derivative(0.7) == 1.0);
  CHECK(df.lag(5.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  DelayFunction dq(geometric_shifts(2.0), 2.0);
  CHECK(dq(8.0) == 4.0);
  CHECK(dq.derivative(8.0) == 0.5);
  CHECK(dq.history_start() == 0.5);
}

TEST_CASE("delay function rejects bad shift sizes") {
  try {
    DelayFunction df(additive_shifts(TimeScale::unit_lattice(), 0.0), 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() != ErrorCode::Syntax);
  }
  CHECK_THROWS_AS(DelayFunction(additive_shifts(TimeScale::unit_lattice(), 0.0), 0.5), Error);
}

TEST_CASE("split line admits no delay function") {
  try {
    DelayFunction df(split_line_shifts(), 1.0);
    FAIL("expected NotADelayFunction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotADelayFunction);
  }
}

TEST_CASE("axiom verifier passes on built-ins") {
  SampleSpec spec;
  spec.count = 1000;
  spec.delay_h = 2.0;
  const auto rep = verify_axioms(geometric_shifts(2.0), spec);
  CHECK_MESSAGE(rep.all_pass(), rep.to_text());
  CHECK(rep.admissible_pairs >= 1000);
  spec.delay_h = 1.0;
  const auto roots = verify_axioms(root_shifts(), spec);
  CHECK_MESSAGE(roots.all_pass(), roots.to_text());
  const auto mult = verify_axioms(multiplicative_real_shifts(), SampleSpec{});
  CHECK_MESSAGE(mult.all_pass(), mult.to_text());
}

TEST_CASE("axiom verifier reports failures as data") {
  const auto rep = verify_axioms(broken_geometric_shifts(2.0), SampleSpec{});
  const AxiomLine* closure = rep.find("closure");
  REQUIRE(closure != nullptr);
  CHECK(closure->status == AxiomStatus::fail);
  CHECK_FALSE(closure->counterexample.empty());
  CHECK(rep.to_text().find("closure FAIL") != std::string::npos);
}

TEST_CASE("axiom verifier is deterministic and seedable") {
  SampleSpec a;
  a.seed = 5;
  CHECK(verify_axioms(broken_geometric_shifts(2.0), a).to_text() ==
        verify_axioms(broken_geometric_shifts(2.0), a).to_text());
}

TEST_CASE("too few samples") {
  SampleSpec s;
  s.count = 10;
  try {
    verify_axioms(geometric_shifts(2.0), s);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }
}

TEST_CASE("commutation with the jump on lattices") {
  DelayFunction dz(additive_shifts(TimeScale::unit_lattice(), 0.0), 3.0);
  DelayFunction dq(geometric_shifts(3.0), 9.0);
  for (double t : {3.0, 4.0, 10.0}) CHECK(dz(dz.scale().sigma(t)) == dz.scale().sigma(dz(t)));
  for (double t : {9.0, 27.0, 243.0}) CHECK(dq(dq.scale().sigma(t)) == dq.scale().sigma(dq(t)));
}

TEST_CASE("translation lag is the shift size without rounding") {
  const DelayFunction real(additive_shifts(TimeScale::real_line(), 0.0), 1.0 / 3.0);
  for (double t : {0.0, 0.1, 7.3, 20.0}) {
    CHECK(real.lag(t) == 1.0 / 3.0);
    CHECK(real(t) == t - 1.0 / 3.0);
  }
  // non-translation systems still compute t - delta_-(h,t)
  const DelayFunction geo(geometric_shifts(2.0), 2.0);
  CHECK(geo.lag(8.0) == 4.0);
}
