#include "tsdelay/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsdelay/error.hpp"

namespace tsdelay {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_half_line(const DelayFunction& df, double t) {
  const double t0 = df.t0();
  if (!df.scale().contains(t) || t < t0 - kSnapTolerance * std::max(1.0, std::fabs(t0)))
    throw Error(ErrorCode::OutOfDomain, fmt(t) + " is not in [t0,inf)_T");
}

bool all_scattered(const std::vector<Piece>& ps) {
  return std::none_of(ps.begin(), ps.end(), [](const Piece& p) { return p.dense; });
}

}  // namespace

Regressivity RegressiveFunction::classify(double a, double b, double real_step) const {
  Regressivity worst = Regressivity::positive;
  for (const Piece& piece : scale.pieces(a, b)) {
    if (piece.dense) continue;
    const double v = 1.0 + (piece.hi - piece.lo) * f(piece.lo);
    if (v == 0.0) return Regressivity::none;
    if (v < 0.0) worst = Regressivity::regressive;
  }
  (void)real_step;  // dense points always have 1 + mu p = 1
  return worst;
}

double circle_minus(const RegressiveFunction& p, double t) {
  const double v = p.factor(t);
  if (v == 0.0) throw Error(ErrorCode::NotRegressive, "1 + mu p vanishes at " + fmt(t));
  return -p(t) / v;
}

double ts_exponential(const RegressiveFunction& p, double t, double s) {
  if (p.scale.same_point(t, s)) return 1.0;
  if (t < s) return 1.0 / ts_exponential(p, s, t);
  double product = 1.0;
  double dense = 0.0;
  for (const Piece& piece : p.scale.pieces(s, t)) {
    if (piece.dense) {
      dense += p.scale.delta_integral(p.f, piece.lo, piece.hi);
      continue;
    }
    const double v = 1.0 + (piece.hi - piece.lo) * p(piece.lo);
    if (v == 0.0) throw Error(ErrorCode::NotRegressive, "1 + mu p vanishes at " + fmt(piece.lo));
    product *= v;
  }
  return dense == 0.0 ? product : product * std::exp(dense);
}

ExponentialTable::ExponentialTable(const RegressiveFunction& p, double t0, double t_end, double real_step)
    : scale_(p.scale), p_(p.f) {
  nodes_ = scale_.grid(t0, t_end, real_step);
  values_.assign(nodes_.size(), 1.0);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const Jump j = scale_.jump(nodes_[i]);
    double step = 0.0;
    if (j.mu > 0.0) {
      step = 1.0 + j.mu * p_(nodes_[i]);
      if (step == 0.0) throw Error(ErrorCode::NotRegressive, "1 + mu p vanishes at " + fmt(nodes_[i]));
    } else {
      step = std::exp(gauss3(p_, nodes_[i], nodes_[i + 1]));
    }
    values_[i + 1] = values_[i] * step;
  }
}

double ExponentialTable::operator()(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (scale_.same_point(nodes_[i], t)) return values_[i];
  if (i + 1 < nodes_.size() && scale_.same_point(nodes_[i + 1], t)) return values_[i + 1];
  if (i + 1 >= nodes_.size() || t < nodes_.front() || scale_.mu(nodes_[i]) > 0.0)
    throw Error(ErrorCode::OutOfDomain, fmt(t) + " outside tabulated exponential");
  return values_[i] * std::exp(gauss3(p_, nodes_[i], t));
}

double delayed_integral_split(const DelayFunction& df, const Fn& f, double t) {
  require_half_line(df, t);
  const TimeScale& ts = df.scale();
  const double t0 = df.t0();
  auto substituted = [&](double s) { return f(df(s)) * df.derivative(s); };
  return ts.delta_integral(substituted, t, t0) + ts.delta_integral(f, df.history_start(), t);
}

double leibniz_delay_derivative(const DelayFunction& df, const Fn2& f, const Fn2& f_delta_t, double t) {
  require_half_line(df, t);
  const TimeScale& ts = df.scale();
  const double sig = ts.sigma(t);
  const double d = df(t);
  const double inner = ts.delta_integral([&](double s) { return f_delta_t(t, s); }, d, t);
  return f(sig, t) - f(sig, d) * df.derivative(t) + inner;
}

InterchangePair interchange_double(const DelayFunction& df, const Fn& k, double t) {
  require_half_line(df, t);
  const TimeScale& ts = df.scale();
  const double d = df(t);
  const auto ps = ts.pieces(d, t);

  double lhs = 0.0;
  if (all_scattered(ps)) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      double inner = 0.0;
      for (std::size_t j = i; j < ps.size(); ++j) inner += (ps[j].hi - ps[j].lo) * k(ps[j].lo);
      lhs += (ps[i].hi - ps[i].lo) * inner;
    }
  } else {
    const Antiderivative K(ts, k, d, t, ts.quadrature_step() / 4.0);
    const double total = K(t);
    lhs = ts.delta_integral([&](double s) { return total - K(s); }, d, t);
  }
  const double rhs = ts.delta_integral([&](double u) { return (ts.sigma(u) - d) * k(u); }, d, t);
  return {lhs, rhs};
}

double abs_delta_derivative(const GridFunction& x, double t) {
  const std::size_t i = x.locate(t);
  if (i + 1 >= x.points.size()) throw Error(ErrorCode::AtSupremum, fmt(t) + " is the last grid point");
  const double xi = x.values[i];
  if (xi == 0.0) throw Error(ErrorCode::ZeroValue, "x vanishes at " + fmt(t));
  const double sign = xi > 0.0 ? 1.0 : -1.0;
  const double xn = x.values[i + 1];
  const Jump j = x.scale.jump(x.points[i]);
  if (j.mu > 0.0) {
    const double dx = (xn - xi) / j.mu;
    if (xi * xn >= 0.0) return sign * dx;
    return -(2.0 / j.mu) * std::fabs(xi) - sign * dx;
  }
  if (xi * xn < 0.0) throw Error(ErrorCode::DenseSignChange, "x changes sign after the right-dense point " + fmt(t));
  const double h2 = x.points[i + 1] - x.points[i];
  double dx = (xn - xi) / h2;
  if (i > 0 && x.scale.mu(x.points[i - 1]) == 0.0) {
    const double h1 = x.points[i] - x.points[i - 1];
    dx = -h2 / (h1 * (h1 + h2)) * x.values[i - 1] + (h2 - h1) / (h1 * h2) * xi + h1 / (h2 * (h1 + h2)) * xn;
  }
  return sign * dx;
}

}  // namespace tsdelay
