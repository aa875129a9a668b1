#pragma once

#include <string>
#include <vector>

#include "tsdelay/shift.hpp"
#include "tsdelay/time_scale.hpp"

namespace tsdelay {

/// x^Delta(t) = a(t) x(t) + b(t) x(delta_-(h,t)) delta_-^Delta(h,t) on
/// [t0, horizon]_T with x = history on [delta_-(h,t0), t0]_T.
struct DelayProblem {
  DelayFunction delay;
  Fn a;
  Fn b;
  Fn history;
  double horizon;
  /// Dense step; 0 selects min(beta(t0)/64, 1e-2).
  double real_step = 0.0;

  const TimeScale& scale() const { return delay.scale(); }
  double t0() const { return delay.t0(); }
  double effective_step() const;
  /// Last point of T in [t0, horizon].
  double end_point() const;
  /// Right-hand side of the equation given the delayed value.
  double rhs(double t, double x, double delayed_x) const {
    return a(t) * x + b(t) * delayed_x * delay.derivative(t);
  }
  /// sup |history| over the sampled history window.
  double history_norm() const;
};

/// Piecewise cubic interpolant through (t, v) pairs; exact at the nodes.
Fn table_history(std::vector<std::pair<double, double>> table);

struct Trajectory {
  TimeScale scale = TimeScale::real_line();
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> mu;
  /// delta_-(h,t) and its delta derivative; NaN on history nodes.
  std::vector<double> delayed_t;
  std::vector<double> delay_deriv;
  /// x' at dense nodes (right-hand side of the equation, or the history slope).
  std::vector<double> slope;
  /// Index of the node delta_-(h, t[i]) for i >= start.
  std::vector<std::size_t> delayed_index;
  /// First node of each smooth stretch: history, then each method-of-steps
  /// segment. On isolated scales a single stretch.
  std::vector<std::size_t> segments;
  std::size_t start = 0;  // index of t0
  bool dense = false;
  /// Exact history, used by value_at before t0 on dense scales.
  Fn history_fn;

  std::size_t size() const { return t.size(); }
  GridFunction grid() const { return GridFunction(t, x, scale); }
  /// x at an arbitrary point of [t.front(), t.back()]: exact at nodes, cubic
  /// Hermite between dense nodes.
  double value_at(double s) const;
  /// Index range [first, last] of the smooth stretch containing node i.
  std::pair<std::size_t, std::size_t> stretch_of(std::size_t i) const;
  /// Cumulative integral of node values from t.front(): exact sums on
  /// scattered nodes, cubic Lagrange panels within each dense stretch.
  std::vector<double> cumulative(const std::vector<double>& values) const;
  /// Derivative of node values: forward quotient at scattered nodes, five
  /// point stencil within the node's stretch at dense nodes.
  std::vector<double> derivative(const std::vector<double>& values) const;
  std::string to_csv() const;
};

Trajectory solve(const DelayProblem& p);

/// max over interior nodes at or after t0 of |x^Delta - rhs|.
double residual(const DelayProblem& p, const Trajectory& tr);

/// Closed solution formula valid while delta_-(h,t) <= t0.
double variation_of_parameters(const DelayProblem& p, double t);

/// True iff (t0,h)_T is empty and sigma agrees with delta_+(h,.) on a sample
/// of [delta_-(h,t0), inf)_T.
bool isolated_gap(const DelayFunction& df);

}  // namespace tsdelay
