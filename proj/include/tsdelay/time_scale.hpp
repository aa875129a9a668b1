#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tsdelay {

using Fn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute tolerance (scaled by max(1,|t|)) used to snap a real number onto a
/// lattice point and to decide equality of points.
inline constexpr double kSnapTolerance = 1e-9;

enum class ScaleKind {
  RealInterval,
  UnitLattice,
  StepLattice,
  QLattice,
  SqrtNaturals,
  FiniteGrid,
  UnionOfIntervals,
};

struct Interval {
  double lo;
  double hi;
};

struct Jump {
  double sigma;
  double mu;
};

/// A maximal piece of [a,b]_T: a dense stretch [lo,hi] or a single
/// right-scattered point lo whose forward jump is hi.
struct Piece {
  bool dense;
  double lo;
  double hi;
};

/// A computable closed subset of the reals.
///
/// Lattice kinds keep points by integer index internally (q^n, sqrt(n),
/// origin + n*step) so that jumps and grids are exact; real values are only
/// derived on output.
class TimeScale {
 public:
  static TimeScale real_interval(double lo, double hi);
  static TimeScale real_line() { return real_interval(-kInf, kInf); }
  static TimeScale unit_lattice(double origin = 0.0);
  static TimeScale step_lattice(double step, double origin = 0.0);
  static TimeScale q_lattice(double q);
  static TimeScale sqrt_naturals();
  static TimeScale finite_grid(std::vector<double> points);
  static TimeScale union_of_intervals(std::vector<Interval> parts);

  ScaleKind kind() const noexcept;
  std::string describe() const;

  /// Spacing of UnitLattice/StepLattice, ratio of QLattice; 0 otherwise.
  double parameter() const noexcept;

  bool contains(double t) const;
  /// Returns the exact scale point within snap tolerance of t.
  double snap(double t) const;
  /// Integer index on lattice kinds (and FiniteGrid); empty for dense points
  /// and for the accumulation point 0 of the q-lattice.
  std::optional<std::int64_t> index_of(double t) const;
  bool same_point(double u, double v) const;

  double infimum() const;
  double supremum() const;

  Jump jump(double t) const;
  double sigma(double t) const { return jump(t).sigma; }
  double mu(double t) const { return jump(t).mu; }
  bool right_scattered(double t) const { return jump(t).mu > 0.0; }
  /// True when every point of the scale is right-scattered.
  bool isolated() const noexcept;

  std::vector<Piece> pieces(double a, double b) const;
  /// [a,b]_T exactly on isolated stretches; uniform samples with spacing at
  /// most real_step (endpoints included) on dense stretches.
  std::vector<double> grid(double a, double b, double real_step) const;

  /// Oriented delta integral: sum of mu*f over scattered points plus a
  /// composite Simpson integral on dense stretches.
  double delta_integral(const Fn& f, double a, double b) const;
  double delta_derivative(const Fn& f, double t) const;

  double quadrature_tolerance() const noexcept { return quad_tol_; }
  double quadrature_step() const noexcept { return quad_step_; }
  double difference_step() const noexcept { return fd_step_; }
  TimeScale with_quadrature(double tolerance, double initial_step) const;
  TimeScale with_difference_step(double step) const;

 private:
  struct Real { double lo, hi; };
  struct Lattice { double step, origin; bool unit; };
  struct Geometric { double q, log_q; };
  struct Roots {};
  struct Points { std::vector<double> pts; };
  struct Union { std::vector<Interval> parts; };
  using Repr = std::variant<Real, Lattice, Geometric, Roots, Points, Union>;

  explicit TimeScale(Repr repr) : repr_(std::move(repr)) {}

  double lattice_value(std::int64_t n) const;
  std::optional<std::int64_t> lattice_index(double t) const;
  double simpson(const Fn& f, double lo, double hi) const;

  Repr repr_;
  double quad_tol_ = 1e-10;
  double quad_step_ = 1e-2;
  double fd_step_ = 1e-5;
};

/// Tabulated antiderivative F(t) = int_a^t f(s) Delta s on [a,b]_T.
///
/// Scattered points contribute mu*f exactly; dense stretches are integrated
/// panel-wise with 3-point Gauss-Legendre, so evaluation between panel nodes
/// is a single extra panel.
class Antiderivative {
 public:
  Antiderivative(const TimeScale& scale, Fn f, double a, double b, double real_step);

  double operator()(double t) const;
  double between(double u, double v) const { return (*this)(v) - (*this)(u); }
  double lower() const noexcept { return nodes_.front(); }
  double upper() const noexcept { return nodes_.back(); }

 private:
  TimeScale scale_;
  Fn f_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<char> dense_after_;
};

/// 3-point Gauss-Legendre on [lo,hi].
double gauss3(const Fn& f, double lo, double hi);

/// Carrier for a function sampled on scale points.
struct GridFunction {
  std::vector<double> points;
  std::vector<double> values;
  TimeScale scale;

  GridFunction(std::vector<double> pts, std::vector<double> vals, TimeScale ts);
  std::size_t locate(double t) const;
};

}  // namespace tsdelay
