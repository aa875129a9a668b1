#include "tsdelay/time_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsdelay/error.hpp"

namespace tsdelay {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double snap_tol(double t) { return kSnapTolerance * std::max(1.0, std::fabs(t)); }

bool near(double u, double v) {
  if (std::isinf(u) || std::isinf(v)) return u == v;
  return std::fabs(u - v) <= snap_tol(std::max(std::fabs(u), std::fabs(v)));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void not_in_scale(double t, const TimeScale& ts) {
  throw Error(ErrorCode::PointNotInScale, fmt(t) + " is not a point of " + ts.describe());
}

constexpr std::int64_t kMaxLatticePieces = 50'000'000;

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointNotInScale: return "PointNotInScale";
    case ErrorCode::AtSupremum: return "AtSupremum";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StickyPointViolation: return "StickyPointViolation";
    case ErrorCode::NotADelayFunction: return "NotADelayFunction";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NotRegressive: return "NotRegressive";
    case ErrorCode::ZeroValue: return "ZeroValue";
    case ErrorCode::DenseSignChange: return "DenseSignChange";
    case ErrorCode::HistoryGap: return "HistoryGap";
    case ErrorCode::NonMonotoneGrid: return "NonMonotoneGrid";
    case ErrorCode::OutOfHistoryRegime: return "OutOfHistoryRegime";
    case ErrorCode::EmptyAlphaInterval: return "EmptyAlphaInterval";
    case ErrorCode::PreconditionNotVerified: return "PreconditionNotVerified";
    case ErrorCode::DelayWeightTooLarge: return "DelayWeightTooLarge";
    case ErrorCode::ZeroB: return "ZeroBAt";
    case ErrorCode::NonPositiveV0: return "NonPositiveV0";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Eval: return "EvalError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Error";
}

TimeScale TimeScale::real_interval(double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorCode::EmptyInterval, "real interval needs lo < hi");
  return TimeScale(Real{lo, hi});
}

TimeScale TimeScale::unit_lattice(double origin) { return TimeScale(Lattice{1.0, origin, true}); }

TimeScale TimeScale::step_lattice(double step, double origin) {
  if (!(step > 0.0)) throw Error(ErrorCode::Config, "lattice step must be positive");
  return TimeScale(Lattice{step, origin, false});
}

TimeScale TimeScale::q_lattice(double q) {
  if (!(q > 1.0)) throw Error(ErrorCode::Config, "q-lattice ratio must exceed 1");
  return TimeScale(Geometric{q, std::log(q)});
}

TimeScale TimeScale::sqrt_naturals() { return TimeScale(Roots{}); }

TimeScale TimeScale::finite_grid(std::vector<double> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInterval, "finite grid needs at least one point");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]))
      throw Error(ErrorCode::NonMonotoneGrid, "finite grid points must be strictly increasing");
  return TimeScale(Points{std::move(points)});
}

TimeScale TimeScale::union_of_intervals(std::vector<Interval> parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptyInterval, "union needs at least one interval");
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].lo > parts[i].hi) throw Error(ErrorCode::EmptyInterval, "interval with lo > hi");
    if (i > 0 && !(parts[i].lo > parts[i - 1].hi))
      throw Error(ErrorCode::Config, "union intervals must be disjoint");
  }
  return TimeScale(Union{std::move(parts)});
}

ScaleKind TimeScale::kind() const noexcept {
  return std::visit(overloaded{
                        [](const Real&) { return ScaleKind::RealInterval; },
                        [](const Lattice& l) { return l.unit ? ScaleKind::UnitLattice : ScaleKind::StepLattice; },
                        [](const Geometric&) { return ScaleKind::QLattice; },
                        [](const Roots&) { return ScaleKind::SqrtNaturals; },
                        [](const Points&) { return ScaleKind::FiniteGrid; },
                        [](const Union&) { return ScaleKind::UnionOfIntervals; },
                    },
                    repr_);
}

std::string TimeScale::describe() const {
  return std::visit(overloaded{
                        [](const Real& r) { return "[" + fmt(r.lo) + "," + fmt(r.hi) + "]"; },
                        [](const Lattice& l) { return fmt(l.origin) + "+" + fmt(l.step) + "Z"; },
                        [](const Geometric& g) { return fmt(g.q) + "^Z u {0}"; },
                        [](const Roots&) { return std::string("sqrt(N)"); },
                        [](const Points& p) { return "finite grid of " + std::to_string(p.pts.size()) + " points"; },
                        [](const Union& u) {
                          std::string s;
                          for (const auto& part : u.parts) {
                            if (!s.empty()) s += " u ";
                            s += "[" + fmt(part.lo) + "," + fmt(part.hi) + "]";
                          }
                          return s;
                        },
                    },
                    repr_);
}

double TimeScale::parameter() const noexcept {
  if (const auto* l = std::get_if<Lattice>(&repr_)) return l->step;
  if (const auto* g = std::get_if<Geometric>(&repr_)) return g->q;
  return 0.0;
}

double TimeScale::lattice_value(std::int64_t n) const {
  return std::visit(overloaded{
                        [&](const Lattice& l) { return l.origin + static_cast<double>(n) * l.step; },
                        [&](const Geometric& g) { return std::pow(g.q, static_cast<double>(n)); },
                        [&](const Roots&) { return std::sqrt(static_cast<double>(n)); },
                        [&](const Points& p) { return p.pts[static_cast<std::size_t>(n)]; },
                        [](const auto&) { return std::numeric_limits<double>::quiet_NaN(); },
                    },
                    repr_);
}

std::optional<std::int64_t> TimeScale::lattice_index(double t) const {
  if (!std::isfinite(t)) return std::nullopt;
  std::optional<std::int64_t> candidate = std::visit(
      overloaded{
          [&](const Lattice& l) -> std::optional<std::int64_t> {
            return static_cast<std::int64_t>(std::llround((t - l.origin) / l.step));
          },
          [&](const Geometric& g) -> std::optional<std::int64_t> {
            if (t <= 0.0) return std::nullopt;
            return static_cast<std::int64_t>(std::llround(std::log(t) / g.log_q));
          },
          [&](const Roots&) -> std::optional<std::int64_t> {
            if (t < -snap_tol(t)) return std::nullopt;
            return static_cast<std::int64_t>(std::llround(t * t));
          },
          [&](const Points& p) -> std::optional<std::int64_t> {
            auto it = std::lower_bound(p.pts.begin(), p.pts.end(), t);
            std::optional<std::int64_t> best;
            double best_d = kInf;
            for (auto c : {it, it == p.pts.begin() ? it : it - 1}) {
              if (c == p.pts.end()) continue;
              double d = std::fabs(*c - t);
              if (d < best_d) {
                best_d = d;
                best = static_cast<std::int64_t>(c - p.pts.begin());
              }
            }
            return best;
          },
          [](const auto&) -> std::optional<std::int64_t> { return std::nullopt; },
      },
      repr_);
  if (!candidate) return std::nullopt;
  if (std::holds_alternative<Roots>(repr_) && *candidate < 0) return std::nullopt;
  if (!near(lattice_value(*candidate), t)) return std::nullopt;
  return candidate;
}

bool TimeScale::contains(double t) const {
  if (std::isnan(t)) return false;
  return std::visit(overloaded{
                        [&](const Real& r) { return t >= r.lo - snap_tol(t) && t <= r.hi + snap_tol(t); },
                        [&](const Union& u) {
                          return std::any_of(u.parts.begin(), u.parts.end(), [&](const Interval& p) {
                            return t >= p.lo - snap_tol(t) && t <= p.hi + snap_tol(t);
                          });
                        },
                        [&](const Geometric&) { return std::fabs(t) <= snap_tol(0.0) || lattice_index(t).has_value(); },
                        [&](const auto&) { return lattice_index(t).has_value(); },
                    },
                    repr_);
}

double TimeScale::snap(double t) const {
  if (auto n = lattice_index(t)) return lattice_value(*n);
  if (!contains(t)) not_in_scale(t, *this);
  if (const auto* r = std::get_if<Real>(&repr_)) return std::clamp(t, r->lo, r->hi);
  if (const auto* u = std::get_if<Union>(&repr_)) {
    for (const auto& p : u->parts)
      if (t >= p.lo - snap_tol(t) && t <= p.hi + snap_tol(t)) return std::clamp(t, p.lo, p.hi);
  }
  if (std::holds_alternative<Geometric>(repr_)) return 0.0;
  return t;
}

std::optional<std::int64_t> TimeScale::index_of(double t) const { return lattice_index(t); }

bool TimeScale::same_point(double u, double v) const {
  auto iu = lattice_index(u);
  auto iv = lattice_index(v);
  if (iu && iv) return *iu == *iv;
  return near(u, v);
}

double TimeScale::infimum() const {
  return std::visit(overloaded{
                        [](const Real& r) { return r.lo; },
                        [](const Lattice&) { return -kInf; },
                        [](const Geometric&) { return 0.0; },
                        [](const Roots&) { return 0.0; },
                        [](const Points& p) { return p.pts.front(); },
                        [](const Union& u) { return u.parts.front().lo; },
                    },
                    repr_);
}

double TimeScale::supremum() const {
  return std::visit(overloaded{
                        [](const Real& r) { return r.hi; },
                        [](const Points& p) { return p.pts.back(); },
                        [](const Union& u) { return u.parts.back().hi; },
                        [](const auto&) { return kInf; },
                    },
                    repr_);
}

Jump TimeScale::jump(double t) const {
  if (!contains(t)) not_in_scale(t, *this);
  const double sup = supremum();
  if (std::isfinite(sup) && same_point(t, sup))
    throw Error(ErrorCode::AtSupremum, fmt(t) + " is the supremum of " + describe());
  if (auto n = lattice_index(t)) {
    const double here = lattice_value(*n);
    const double next = lattice_value(*n + 1);
    return {next, next - here};
  }
  if (const auto* u = std::get_if<Union>(&repr_)) {
    for (std::size_t i = 0; i + 1 < u->parts.size(); ++i)
      if (near(t, u->parts[i].hi)) return {u->parts[i + 1].lo, u->parts[i + 1].lo - u->parts[i].hi};
  }
  // Dense point (including the accumulation point 0 of the q-lattice).
  return {snap(t), 0.0};
}

bool TimeScale::isolated() const noexcept {
  return std::visit(overloaded{
                        [](const Real&) { return false; },
                        [](const Geometric&) { return false; },  // 0 is right-dense
                        [](const Union& u) {
                          return std::all_of(u.parts.begin(), u.parts.end(),
                                             [](const Interval& p) { return p.lo == p.hi; });
                        },
                        [](const auto&) { return true; },
                    },
                    repr_);
}

std::vector<Piece> TimeScale::pieces(double a, double b) const {
  if (a > b + snap_tol(b)) throw Error(ErrorCode::EmptyInterval, "interval [" + fmt(a) + "," + fmt(b) + "] is empty");
  a = snap(a);
  b = snap(b);
  std::vector<Piece> out;
  if (same_point(a, b)) return out;

  if (std::holds_alternative<Real>(repr_)) {
    out.push_back({true, a, b});
    return out;
  }
  if (const auto* u = std::get_if<Union>(&repr_)) {
    for (std::size_t i = 0; i < u->parts.size(); ++i) {
      const Interval& p = u->parts[i];
      if (p.hi < a || p.lo >= b) continue;
      const double lo = std::max(p.lo, a);
      const double hi = std::min(p.hi, b);
      if (hi > lo) out.push_back({true, lo, hi});
      if (p.hi < b && i + 1 < u->parts.size()) out.push_back({false, p.hi, u->parts[i + 1].lo});
    }
    return out;
  }
  auto ia = lattice_index(a);
  auto ib = lattice_index(b);
  if (!ia || !ib)
    throw Error(ErrorCode::Unsupported,
                "interval touching the accumulation point 0 of a q-lattice has infinitely many points");
  if (*ib - *ia > kMaxLatticePieces) throw Error(ErrorCode::Unsupported, "lattice interval too long");
  out.reserve(static_cast<std::size_t>(*ib - *ia));
  for (std::int64_t n = *ia; n < *ib; ++n) out.push_back({false, lattice_value(n), lattice_value(n + 1)});
  return out;
}

std::vector<double> TimeScale::grid(double a, double b, double real_step) const {
  if (!(real_step > 0.0)) throw Error(ErrorCode::Config, "real step must be positive");
  auto ps = pieces(a, b);
  std::vector<double> out;
  if (ps.empty()) {
    out.push_back(snap(a));
    return out;
  }
  for (const Piece& p : ps) {
    if (!p.dense) {
      out.push_back(p.lo);
      continue;
    }
    const auto n = static_cast<std::size_t>(std::ceil((p.hi - p.lo) / real_step - 1e-12));
    const std::size_t steps = std::max<std::size_t>(1, n);
    for (std::size_t k = 0; k < steps; ++k)
      out.push_back(p.lo + (p.hi - p.lo) * static_cast<double>(k) / static_cast<double>(steps));
  }
  out.push_back(ps.back().hi);
  return out;
}

double TimeScale::simpson(const Fn& f, double lo, double hi) const {
  std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / quad_step_));
  n = std::max<std::size_t>(2, n + (n % 2));
  const double ends = f(lo) + f(hi);
  double odd = 0.0;
  double even = 0.0;
  const double width = hi - lo;
  for (std::size_t k = 1; k < n; ++k) {
    const double v = f(lo + width * static_cast<double>(k) / static_cast<double>(n));
    (k % 2 ? odd : even) += v;
  }
  double prev = width / static_cast<double>(n) / 3.0 * (ends + 4.0 * odd + 2.0 * even);
  constexpr std::size_t kMaxPanels = std::size_t{1} << 22;
  while (n < kMaxPanels) {
    even += odd;
    odd = 0.0;
    n *= 2;
    for (std::size_t k = 1; k < n; k += 2) odd += f(lo + width * static_cast<double>(k) / static_cast<double>(n));
    const double cur = width / static_cast<double>(n) / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    if (std::fabs(cur - prev) <= 15.0 * quad_tol_ * std::max(1.0, std::fabs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

double TimeScale::delta_integral(const Fn& f, double a, double b) const {
  if (a > b) return -delta_integral(f, b, a);
  double sum = 0.0;
  for (const Piece& p : pieces(a, b)) sum += p.dense ? simpson(f, p.lo, p.hi) : (p.hi - p.lo) * f(p.lo);
  return sum;
}

double TimeScale::delta_derivative(const Fn& f, double t) const {
  const Jump j = jump(t);
  if (j.mu > 0.0) return (f(j.sigma) - f(t)) / j.mu;
  const double h = fd_step_ * std::max(1.0, std::fabs(t));
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

TimeScale TimeScale::with_quadrature(double tolerance, double initial_step) const {
  TimeScale copy = *this;
  copy.quad_tol_ = tolerance;
  copy.quad_step_ = initial_step;
  return copy;
}

TimeScale TimeScale::with_difference_step(double step) const {
  TimeScale copy = *this;
  copy.fd_step_ = step;
  return copy;
}

double gauss3(const Fn& f, double lo, double hi) {
  static const double x = std::sqrt(0.6);
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  return r * (5.0 * f(c - r * x) + 8.0 * f(c) + 5.0 * f(c + r * x)) / 9.0;
}

Antiderivative::Antiderivative(const TimeScale& scale, Fn f, double a, double b, double real_step)
    : scale_(scale), f_(std::move(f)) {
  nodes_ = scale_.grid(a, b, real_step);
  values_.assign(nodes_.size(), 0.0);
  dense_after_.assign(nodes_.size(), 0);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const double t = nodes_[i];
    const Jump j = scale_.jump(t);
    if (j.mu > 0.0) {
      values_[i + 1] = values_[i] + j.mu * f_(t);
    } else {
      dense_after_[i] = 1;
      values_[i + 1] = values_[i] + gauss3(f_, t, nodes_[i + 1]);
    }
  }
}

double Antiderivative::operator()(double t) const {
  if (t < nodes_.front() - snap_tol(t) || t > nodes_.back() + snap_tol(t))
    throw Error(ErrorCode::OutOfDomain, fmt(t) + " outside tabulated antiderivative range");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (scale_.same_point(nodes_[i], t)) return values_[i];
  if (i + 1 < nodes_.size() && scale_.same_point(nodes_[i + 1], t)) return values_[i + 1];
  if (!dense_after_[i]) not_in_scale(t, scale_);
  return values_[i] + gauss3(f_, nodes_[i], t);
}

GridFunction::GridFunction(std::vector<double> pts, std::vector<double> vals, TimeScale ts)
    : points(std::move(pts)), values(std::move(vals)), scale(std::move(ts)) {
  if (points.size() != values.size()) throw Error(ErrorCode::Config, "grid function size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!scale.contains(points[i])) not_in_scale(points[i], scale);
    if (i == 0) continue;
    if (!(points[i] > points[i - 1])) throw Error(ErrorCode::NonMonotoneGrid, "grid points must increase");
    const Jump j = scale.jump(points[i - 1]);
    if (j.mu > 0.0 && !scale.same_point(j.sigma, points[i]))
      throw Error(ErrorCode::NonMonotoneGrid, "grid skips a scattered point after " + fmt(points[i - 1]));
  }
}

std::size_t GridFunction::locate(double t) const {
  auto it = std::lower_bound(points.begin(), points.end(), t - snap_tol(t));
  if (it == points.end() || !scale.same_point(*it, t)) not_in_scale(t, scale);
  return static_cast<std::size_t>(it - points.begin());
}

}  // namespace tsdelay
