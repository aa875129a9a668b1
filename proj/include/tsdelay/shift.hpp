#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsdelay/time_scale.hpp"

namespace tsdelay {

using Fn2 = std::function<double(double, double)>;
using Predicate2 = std::function<bool(double, double)>;

enum class Direction { minus, plus };

/// A pair of backward/forward shift operators on the working set T* of a
/// time scale, together with their initial point t0 and domains D-/D+.
///
/// Domains are exact predicates on (shift size, point); they always require
/// the shift size to lie in [t0, inf)_T.
struct ShiftSystem {
  std::string name;
  TimeScale scale = TimeScale::real_line();
  double t0 = 0.0;
  Fn2 delta_minus;
  Fn2 delta_plus;
  Predicate2 domain_minus;
  Predicate2 domain_plus;
  std::optional<double> sticky_point;
  /// Closed form of d/Delta t of delta_minus(h, t), when known.
  Fn2 delay_derivative;
  /// delta_-/+(s,t) = t -/+ s; the lag t - delta_-(h,t) is then h exactly.
  bool translation = false;
  /// Window of T* the axiom verifier samples from.
  Interval sample_window{-5.0, 5.0};

  bool in_star(double t) const;
  bool admissible_shift(double s) const;
  bool in_domain(Direction dir, double s, double t) const;
  double shift(Direction dir, double s, double t) const;
};

/// t -/+ s on R, Z or hZ with initial point t0.
ShiftSystem additive_shifts(const TimeScale& scale, double t0 = 0.0);
/// t/s and st on q^Z u {0}; initial point 1, sticky point 0.
ShiftSystem geometric_shifts(double q);
/// sqrt(t^2 -/+ s^2) on sqrt(N); initial point 0.
ShiftSystem root_shifts();
/// t/s for t >= 0 and st for t < 0 (and the inverse pair) on R; initial
/// point 1, sticky point 0.
ShiftSystem multiplicative_real_shifts();
/// t -/+ s on (-inf,0] u [1,inf). Admits no delay function.
ShiftSystem split_line_shifts();
/// t -/+ s forced onto q^Z; fails closure.
ShiftSystem broken_geometric_shifts(double q);

/// Moves the initial point to lam: new shifts are delta_-+(lam, delta_+-(s,t)).
ShiftSystem rebase_initial_point(const ShiftSystem& sys, double lam);

/// The delay function delta_-(h, .) generated by a shift system.
class DelayFunction {
 public:
  /// Validates that h is a shift size in (t0,inf)_T and that the map keeps
  /// the scattered/dense structure of [t0,inf)_T on a sampled window.
  DelayFunction(ShiftSystem sys, double h);

  const ShiftSystem& system() const noexcept { return sys_; }
  const TimeScale& scale() const noexcept { return sys_.scale; }
  double h() const noexcept { return h_; }
  double t0() const noexcept { return sys_.t0; }

  double operator()(double t) const;          // delta_-(h,t)
  double advance(double t) const;             // delta_+(h,t)
  double derivative(double t) const;          // delta_-^Delta(h,t)
  double lag(double t) const { return sys_.translation ? h_ : t - (*this)(t); }  // beta(t)
  double history_start() const { return (*this)(sys_.t0); }

  /// Supremum of the (positive) delta derivative over [t0, horizon]_T.
  double derivative_bound(double horizon, double real_step) const;

 private:
  ShiftSystem sys_;
  double h_;
};

double delay_delta_derivative(const DelayFunction& df, double t);

struct SampleSpec {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  /// Shift size of a delay function to check commutation with the jump
  /// operator and structure preservation.
  std::optional<double> delay_h;
};

enum class AxiomStatus { pass, fail, skipped };

struct AxiomLine {
  std::string name;
  AxiomStatus status = AxiomStatus::skipped;
  std::size_t checked = 0;
  std::vector<std::pair<std::string, double>> counterexample;
};

struct AxiomReport {
  std::string system;
  std::vector<AxiomLine> lines;
  std::size_t admissible_pairs = 0;

  bool all_pass() const;
  const AxiomLine* find(const std::string& name) const;
  std::string to_text() const;
};

/// Property-tests closure, the five shift axioms, the derived shift identities and, when a
/// delay shift size is given, the delay-function properties. Failures are
/// data: each line carries the lexicographically smallest failing sample.
AxiomReport verify_axioms(const ShiftSystem& sys, const SampleSpec& spec);

}  // namespace tsdelay
