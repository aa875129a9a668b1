#include "tsdelay/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsdelay/error.hpp"

namespace tsdelay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double tol(double t) { return kSnapTolerance * std::max(1.0, std::fabs(t)); }

void append_number(std::string& out, double v) {
  if (std::isnan(v)) return;
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

// Derivative at x of the Lagrange polynomial through (z[k], f[k]).
double lagrange_derivative(const double* z, const double* f, int n, double x) {
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double dk = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      double prod = 1.0 / (z[k] - z[m]);
      for (int l = 0; l < n; ++l)
        if (l != k && l != m) prod *= (x - z[l]) / (z[k] - z[l]);
      dk += prod;
    }
    total += dk * f[k];
  }
  return total;
}

double lagrange_value(const double* z, const double* f, int n, double x) {
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = 1.0;
    for (int l = 0; l < n; ++l)
      if (l != k) w *= (x - z[l]) / (z[k] - z[l]);
    total += w * f[k];
  }
  return total;
}

double hermite(double t0, double t1, double x0, double x1, double d0, double d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * d1;
}

std::size_t find_node(const std::vector<double>& nodes, const TimeScale& ts, double v) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v - tol(v));
  if (it == nodes.end() || !ts.same_point(*it, v))
    throw Error(ErrorCode::HistoryGap, "delayed point " + fmt(v) + " is not a computed node");
  return static_cast<std::size_t>(it - nodes.begin());
}

Trajectory solve_isolated(const DelayProblem& p) {
  const TimeScale& ts = p.scale();
  const DelayFunction& df = p.delay;
  Trajectory tr;
  tr.scale = ts;
  tr.t = ts.grid(df.history_start(), p.t0(), 1.0);
  tr.start = tr.t.size() - 1;
  for (double t = p.t0(); t < ts.supremum();) {
    const double next = ts.sigma(t);
    if (next > p.horizon + tol(p.horizon)) break;
    tr.t.push_back(next);
    t = next;
  }
  const std::size_t n = tr.t.size();
  tr.x.assign(n, 0.0);
  tr.mu.assign(n, 0.0);
  tr.delayed_t.assign(n, kNaN);
  tr.delay_deriv.assign(n, kNaN);
  tr.slope.assign(n, kNaN);
  tr.delayed_index.assign(n, 0);
  tr.segments = {0};
  for (std::size_t i = 0; i < n; ++i) {
    if (tr.t[i] < ts.supremum() && !ts.same_point(tr.t[i], ts.supremum())) tr.mu[i] = ts.mu(tr.t[i]);
    if (i <= tr.start) tr.x[i] = p.history(tr.t[i]);
  }
  for (std::size_t i = tr.start; i < n; ++i) {
    const double d = df(tr.t[i]);
    if (d < tr.t.front() - tol(d)) throw Error(ErrorCode::HistoryGap, "delta_-(h,t) precedes the history at " + fmt(tr.t[i]));
    tr.delayed_t[i] = d;
    tr.delayed_index[i] = find_node(tr.t, ts, d);
    tr.delay_deriv[i] = df.derivative(tr.t[i]);
    if (tr.delayed_index[i] >= i) throw Error(ErrorCode::NonMonotoneGrid, "delayed node is not in the past");
    const double r = p.a(tr.t[i]) * tr.x[i] + p.b(tr.t[i]) * tr.x[tr.delayed_index[i]] * tr.delay_deriv[i];
    tr.slope[i] = r;
    if (i + 1 < n) tr.x[i + 1] = tr.x[i] + tr.mu[i] * r;
  }
  return tr;
}

Trajectory solve_dense(const DelayProblem& p) {
  const TimeScale& ts = p.scale();
  const DelayFunction& df = p.delay;
  const double t0 = p.t0();
  const double T = p.horizon;
  const double tau1 = df.advance(t0);
  const auto n0 = static_cast<std::size_t>(
      std::max<double>(8.0, std::ceil((tau1 - t0) / p.effective_step() - 1e-9)));

  std::vector<double> seg(n0 + 1);
  for (std::size_t j = 0; j <= n0; ++j) seg[j] = t0 + (tau1 - t0) * static_cast<double>(j) / static_cast<double>(n0);
  seg.back() = tau1;

  Trajectory tr;
  tr.scale = ts;
  tr.dense = true;
  for (double s : seg) tr.t.push_back(df(s));
  tr.t.front() = df.history_start();
  tr.t.back() = t0;
  tr.start = n0;
  tr.segments = {0, n0};
  std::vector<double> cur = seg;
  while (true) {
    bool done = false;
    for (std::size_t j = 1; j <= n0; ++j) {
      double v = cur[j];
      if (std::fabs(v - T) <= tol(T)) v = T;
      if (v > T) {
        done = true;
        break;
      }
      tr.t.push_back(v);
    }
    if (done || tr.t.back() >= T) break;
    tr.segments.push_back(tr.t.size() - 1);
    std::vector<double> next(n0 + 1);
    next.front() = cur.back();
    for (std::size_t j = 1; j <= n0; ++j) next[j] = df.advance(cur[j]);
    cur = std::move(next);
  }
  if (tr.segments.back() == tr.t.size() - 1) tr.segments.pop_back();

  const std::size_t n = tr.t.size();
  tr.x.assign(n, 0.0);
  tr.mu.assign(n, 0.0);
  tr.delayed_t.assign(n, kNaN);
  tr.delay_deriv.assign(n, kNaN);
  tr.slope.assign(n, 0.0);
  tr.delayed_index.assign(n, 0);
  for (std::size_t i = 0; i <= tr.start; ++i) {
    tr.x[i] = p.history(tr.t[i]);
    const double e = 1e-6 * std::max(1.0, std::fabs(tr.t[i]));
    const double lo = std::max(tr.t.front(), tr.t[i] - e);
    const double hi = std::min(t0, tr.t[i] + e);
    tr.slope[i] = (p.history(hi) - p.history(lo)) / (hi - lo);
  }
  for (std::size_t i = tr.start; i < n; ++i) {
    tr.delayed_index[i] = i - n0;
    tr.delayed_t[i] = df(tr.t[i]);
    tr.delay_deriv[i] = df.derivative(tr.t[i]);
  }

  auto delayed_mid = [&](std::size_t i, double tm) {
    const double dm = df(tm);
    if (i < tr.start + n0) return p.history(dm);
    const std::size_t k = i - n0;
    return hermite(tr.t[k], tr.t[k + 1], tr.x[k], tr.x[k + 1], tr.slope[k], tr.slope[k + 1], dm);
  };
  auto f = [&](double t, double x, double xd) { return p.a(t) * x + p.b(t) * xd * df.derivative(t); };

  tr.slope[tr.start] = p.a(t0) * tr.x[tr.start] + p.b(t0) * tr.x[0] * tr.delay_deriv[tr.start];
  for (std::size_t i = tr.start; i + 1 < n; ++i) {
    const double ti = tr.t[i];
    const double ti1 = tr.t[i + 1];
    const double h = ti1 - ti;
    const double tm = ti + 0.5 * h;
    const double xi = tr.x[i];
    const double xd0 = tr.x[i - n0];
    const double xdm = delayed_mid(i, tm);
    const double xd1 = tr.x[i + 1 - n0];
    const double k1 = f(ti, xi, xd0);
    const double k2 = f(tm, xi + 0.5 * h * k1, xdm);
    const double k3 = f(tm, xi + 0.5 * h * k2, xdm);
    const double k4 = f(ti1, xi + h * k3, xd1);
    tr.x[i + 1] = xi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tr.slope[i + 1] = f(ti1, tr.x[i + 1], xd1);
  }
  tr.history_fn = p.history;
  return tr;
}

}  // namespace

double DelayProblem::effective_step() const {
  if (real_step > 0.0) return real_step;
  return std::min(delay.lag(t0()) / 64.0, 1e-2);
}

double DelayProblem::end_point() const {
  const TimeScale& ts = scale();
  if (ts.contains(horizon)) return ts.snap(horizon);
  if (ts.kind() == ScaleKind::RealInterval) return std::min(horizon, ts.supremum());
  double t = t0();
  while (t < ts.supremum()) {
    const double next = ts.sigma(t);
    if (next > horizon) break;
    t = next;
  }
  return t;
}

double DelayProblem::history_norm() const {
  double m = 0.0;
  for (double s : scale().grid(delay.history_start(), t0(), effective_step())) m = std::max(m, std::fabs(history(s)));
  return m;
}

Fn table_history(std::vector<std::pair<double, double>> table) {
  if (table.empty()) throw Error(ErrorCode::Config, "history table is empty");
  std::sort(table.begin(), table.end());
  std::vector<double> z, v;
  for (const auto& [t, x] : table) {
    if (!z.empty() && !(t > z.back())) throw Error(ErrorCode::NonMonotoneGrid, "history table repeats " + fmt(t));
    z.push_back(t);
    v.push_back(x);
  }
  return [z, v](double t) {
    if (t < z.front() - tol(t) || t > z.back() + tol(t))
      throw Error(ErrorCode::HistoryGap, "history table does not cover " + fmt(t));
    auto it = std::lower_bound(z.begin(), z.end(), t - tol(t));
    if (it != z.end() && std::fabs(*it - t) <= tol(t)) return v[static_cast<std::size_t>(it - z.begin())];
    if (z.size() == 1) return v.front();
    const auto n = static_cast<std::ptrdiff_t>(z.size());
    const int width = static_cast<int>(std::min<std::ptrdiff_t>(4, n));
    std::ptrdiff_t first = (it - z.begin()) - 2;
    first = std::clamp<std::ptrdiff_t>(first, 0, n - width);
    return lagrange_value(z.data() + first, v.data() + first, width, t);
  };
}

double Trajectory::value_at(double s) const {
  if (s < t.front() - tol(s) || s > t.back() + tol(s)) throw Error(ErrorCode::OutOfDomain, fmt(s) + " outside trajectory");
  if (history_fn && s <= t[start]) return history_fn(s);
  auto it = std::upper_bound(t.begin(), t.end(), s);
  std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  if (scale.same_point(t[i], s)) return x[i];
  if (i + 1 < t.size() && scale.same_point(t[i + 1], s)) return x[i + 1];
  if (!dense) throw Error(ErrorCode::PointNotInScale, fmt(s) + " is not a node of the trajectory");
  return hermite(t[i], t[i + 1], x[i], x[i + 1], slope[i], slope[i + 1], s);
}

std::pair<std::size_t, std::size_t> Trajectory::stretch_of(std::size_t i) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), i);
  std::size_t k = static_cast<std::size_t>(it - segments.begin()) - 1;
  if (i == t.size() - 1 && k > 0 && segments[k] == i) --k;
  const std::size_t last = k + 1 < segments.size() ? segments[k + 1] : t.size() - 1;
  return {segments[k], last};
}

std::vector<double> Trajectory::cumulative(const std::vector<double>& values) const {
  std::vector<double> out(t.size(), 0.0);
  static const double g = 1.0 / std::sqrt(3.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!dense) {
      out[i + 1] = out[i] + mu[i] * values[i];
      continue;
    }
    const auto [first, last] = stretch_of(i);
    const std::size_t width = std::min<std::size_t>(4, last - first + 1);
    std::size_t lo = i > first ? i - 1 : first;
    lo = std::min(lo, last + 1 - width);
    const int w = static_cast<int>(width);
    const double c = 0.5 * (t[i] + t[i + 1]);
    const double r = 0.5 * (t[i + 1] - t[i]);
    const double panel = r * (lagrange_value(&t[lo], &values[lo], w, c - r * g) +
                              lagrange_value(&t[lo], &values[lo], w, c + r * g));
    out[i + 1] = out[i] + panel;
  }
  return out;
}

std::vector<double> Trajectory::derivative(const std::vector<double>& values) const {
  std::vector<double> out(t.size(), kNaN);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!dense) {
      if (i + 1 < t.size()) out[i] = (values[i + 1] - values[i]) / mu[i];
      continue;
    }
    // A segment start belongs to the stretch on its right.
    auto [first, last] = stretch_of(i);
    if (i == last && i + 1 < t.size()) std::tie(first, last) = stretch_of(i + 1);
    const std::size_t width = std::min<std::size_t>(5, last - first + 1);
    std::size_t lo = i >= first + 2 ? i - 2 : first;
    lo = std::min(lo, last + 1 - width);
    out[i] = lagrange_derivative(&t[lo], &values[lo], static_cast<int>(width), t[i]);
  }
  return out;
}

std::string Trajectory::to_csv() const {
  std::string out = "t,x,mu,delayed_t,delay_deriv\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    append_number(out, t[i]);
    out += ',';
    append_number(out, x[i]);
    out += ',';
    append_number(out, mu[i]);
    out += ',';
    append_number(out, delayed_t[i]);
    out += ',';
    append_number(out, delay_deriv[i]);
    out += '\n';
  }
  return out;
}

Trajectory solve(const DelayProblem& p) {
  const TimeScale& ts = p.scale();
  if (p.horizon < p.t0() - tol(p.t0())) throw Error(ErrorCode::EmptyInterval, "horizon precedes t0");
  if (ts.kind() == ScaleKind::RealInterval) {
    if (p.horizon > ts.supremum()) throw Error(ErrorCode::OutOfDomain, "horizon beyond the time scale");
    return solve_dense(p);
  }
  if (ts.kind() == ScaleKind::UnionOfIntervals)
    throw Error(ErrorCode::Unsupported, "solver handles real intervals and isolated scales only");
  return solve_isolated(p);
}

double residual(const DelayProblem& p, const Trajectory& tr) {
  double worst = 0.0;
  if (!tr.dense) {
    for (std::size_t i = tr.start; i + 1 < tr.size(); ++i) {
      const double r = p.a(tr.t[i]) * tr.x[i] + p.b(tr.t[i]) * tr.x[tr.delayed_index[i]] * tr.delay_deriv[i];
      worst = std::max(worst, std::fabs(tr.x[i + 1] - (tr.x[i] + tr.mu[i] * r)) / tr.mu[i]);
    }
    return worst;
  }
  const auto dx = tr.derivative(tr.x);
  for (std::size_t i = tr.start; i < tr.size(); ++i) {
    const double r = p.a(tr.t[i]) * tr.x[i] + p.b(tr.t[i]) * tr.x[tr.delayed_index[i]] * tr.delay_deriv[i];
    worst = std::max(worst, std::fabs(dx[i] - r));
  }
  return worst;
}

double variation_of_parameters(const DelayProblem& p, double t) {
  const TimeScale& ts = p.scale();
  const DelayFunction& df = p.delay;
  const double t0 = p.t0();
  if (!ts.contains(t) || t < t0 - tol(t0)) throw Error(ErrorCode::OutOfDomain, fmt(t) + " is not in [t0,inf)_T");
  if (df(t) > t0 + tol(t0))
    throw Error(ErrorCode::OutOfHistoryRegime, "delta_-(h,t) exceeds t0 at " + fmt(t));
  const double x0 = p.history(t0);
  if (ts.same_point(t, t0)) return x0;
  const auto ps = ts.pieces(t0, t);
  const bool scattered = std::none_of(ps.begin(), ps.end(), [](const Piece& q) { return q.dense; });
  const bool dense = std::all_of(ps.begin(), ps.end(), [](const Piece& q) { return q.dense; });
  if (scattered) {
    double e = 1.0;  // e_a(t, s) for the current s, built from the right
    double sum = 0.0;
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
      const double s = it->lo;
      const double mu = it->hi - it->lo;
      const double f = 1.0 + mu * p.a(s);
      e *= f;
      sum += mu * p.b(s) / f * e * p.history(df(s)) * df.derivative(s);
    }
    return x0 * e + sum;
  }
  if (!dense) throw Error(ErrorCode::Unsupported, "mixed dense/scattered interval");
  const Antiderivative A(ts, p.a, t0, t, p.effective_step() / 4.0);
  const double At = A(t);
  auto integrand = [&](double s) { return p.b(s) * std::exp(At - A(s)) * p.history(df(s)) * df.derivative(s); };
  return x0 * std::exp(At) + ts.delta_integral(integrand, t0, t);
}

bool isolated_gap(const DelayFunction& df) {
  const TimeScale& ts = df.scale();
  const double t0 = df.t0();
  const Jump j = ts.jump(t0);
  if (j.mu <= 0.0) return false;
  if (j.sigma < df.h() && !ts.same_point(j.sigma, df.h())) return false;
  double end = t0;
  for (int k = 0; k < 8; ++k) end = df.advance(end);
  auto pts = ts.grid(df.history_start(), end, 1.0);
  if (pts.size() > 256) pts.resize(256);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double t = pts[i];
    if (!ts.same_point(ts.sigma(t), df.advance(t))) return false;
    if (t >= t0 && !ts.same_point(ts.sigma(df(t)), t)) return false;
  }
  return true;
}

}  // namespace tsdelay
