#include "tsdelay/shift.hpp"

#include <algorithm>
#include <array>
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

double tol(double t) { return kSnapTolerance * std::max(1.0, std::fabs(t)); }

Direction opposite(Direction d) { return d == Direction::minus ? Direction::plus : Direction::minus; }

Interval lattice_window(const TimeScale& scale, double t0, int below, int above) {
  const double step = scale.parameter();
  return {t0 - below * step, t0 + above * step};
}

}  // namespace

bool ShiftSystem::in_star(double t) const {
  if (!scale.contains(t)) return false;
  return !(sticky_point && scale.same_point(t, *sticky_point));
}

bool ShiftSystem::admissible_shift(double s) const { return scale.contains(s) && s >= t0 - tol(t0); }

bool ShiftSystem::in_domain(Direction dir, double s, double t) const {
  if (!admissible_shift(s) || !in_star(t)) return false;
  return dir == Direction::minus ? domain_minus(s, t) : domain_plus(s, t);
}

double ShiftSystem::shift(Direction dir, double s, double t) const {
  if (!in_domain(dir, s, t))
    throw Error(ErrorCode::OutOfDomain, "(" + fmt(s) + "," + fmt(t) + ") is outside the domain of " + name);
  const double r = dir == Direction::minus ? delta_minus(s, t) : delta_plus(s, t);
  if (sticky_point && scale.same_point(r, *sticky_point) && !scale.same_point(t, *sticky_point))
    throw Error(ErrorCode::StickyPointViolation, name + " maps " + fmt(t) + " onto the sticky point");
  if (!in_star(r)) throw Error(ErrorCode::OutOfDomain, name + " result " + fmt(r) + " leaves T*");
  return scale.snap(r);
}

ShiftSystem additive_shifts(const TimeScale& scale, double t0) {
  ShiftSystem sys;
  sys.name = "additive(" + scale.describe() + ")";
  sys.scale = scale;
  sys.t0 = scale.snap(t0);
  sys.delta_minus = [](double s, double t) { return t - s; };
  sys.delta_plus = [](double s, double t) { return t + s; };
  sys.domain_minus = [scale](double s, double t) { return scale.contains(t - s); };
  sys.domain_plus = [scale](double s, double t) { return scale.contains(t + s); };
  sys.delay_derivative = [](double, double) { return 1.0; };
  sys.translation = true;
  if (scale.kind() == ScaleKind::UnitLattice || scale.kind() == ScaleKind::StepLattice)
    sys.sample_window = lattice_window(scale, sys.t0, 20, 20);
  else
    sys.sample_window = {sys.t0 - 5.0, sys.t0 + 5.0};
  return sys;
}

ShiftSystem geometric_shifts(double q) {
  ShiftSystem sys;
  sys.name = "geometric(q=" + fmt(q) + ")";
  sys.scale = TimeScale::q_lattice(q);
  sys.t0 = 1.0;
  sys.sticky_point = 0.0;
  sys.delta_minus = [](double s, double t) { return t / s; };
  sys.delta_plus = [](double s, double t) { return s * t; };
  sys.domain_minus = [](double, double) { return true; };
  sys.domain_plus = [](double, double) { return true; };
  sys.delay_derivative = [](double h, double) { return 1.0 / h; };
  sys.sample_window = {std::pow(q, -6.0), std::pow(q, 10.0)};
  return sys;
}

ShiftSystem root_shifts() {
  ShiftSystem sys;
  sys.name = "roots";
  sys.scale = TimeScale::sqrt_naturals();
  sys.t0 = 0.0;
  // Squares of sqrt(N) points are integers; work on them exactly. A negative
  // square stands for the signed root, which keeps compositions (rebasing)
  // exact when an intermediate value leaves the scale.
  auto sq = [](double v) { return std::copysign(static_cast<double>(std::llround(v * v)), v); };
  auto root = [](double v) { return std::copysign(std::sqrt(std::fabs(v)), v); };
  sys.delta_minus = [sq, root](double s, double t) { return root(sq(t) - sq(s)); };
  sys.delta_plus = [sq, root](double s, double t) { return root(sq(t) + sq(s)); };
  sys.domain_minus = [sq](double s, double t) { return sq(t) >= sq(s); };
  sys.domain_plus = [](double, double) { return true; };
  sys.sample_window = {0.0, 10.0};
  return sys;
}

ShiftSystem multiplicative_real_shifts() {
  ShiftSystem sys;
  sys.name = "multiplicative(R)";
  sys.scale = TimeScale::real_line();
  sys.t0 = 1.0;
  sys.sticky_point = 0.0;
  sys.delta_minus = [](double s, double t) { return t >= 0.0 ? t / s : s * t; };
  sys.delta_plus = [](double s, double t) { return t >= 0.0 ? s * t : t / s; };
  sys.domain_minus = [](double, double) { return true; };
  sys.domain_plus = [](double, double) { return true; };
  sys.delay_derivative = [](double h, double t) { return t >= 0.0 ? 1.0 / h : h; };
  sys.sample_window = {-5.0, 5.0};
  return sys;
}

ShiftSystem split_line_shifts() {
  auto scale = TimeScale::union_of_intervals({{-kInf, 0.0}, {1.0, kInf}});
  ShiftSystem sys = additive_shifts(scale, 0.0);
  sys.name = "additive((-inf,0] u [1,inf))";
  sys.sample_window = {-5.0, 5.0};
  return sys;
}

ShiftSystem broken_geometric_shifts(double q) {
  ShiftSystem sys = geometric_shifts(q);
  sys.name = "broken-geometric(q=" + fmt(q) + ")";
  sys.delta_minus = [](double s, double t) { return t - s; };
  sys.delta_plus = [](double s, double t) { return t + s; };
  sys.delay_derivative = nullptr;
  return sys;
}

ShiftSystem rebase_initial_point(const ShiftSystem& sys, double lam) {
  if (!sys.admissible_shift(lam) || !(lam > sys.t0 + tol(sys.t0)))
    throw Error(ErrorCode::OutOfDomain, "rebase point " + fmt(lam) + " is not in (t0,inf)_T");
  if (!sys.in_domain(Direction::plus, lam, sys.t0) || !sys.in_domain(Direction::minus, lam, lam))
    throw Error(ErrorCode::OutOfDomain, "rebase point " + fmt(lam) + " is not admissible for both compositions");
  const double l = sys.scale.snap(lam);
  ShiftSystem out;
  out.name = sys.name + "@" + fmt(l);
  out.scale = sys.scale;
  out.t0 = l;
  out.sticky_point = sys.sticky_point;
  out.sample_window = sys.sample_window;
  out.delta_minus = [sys, l](double s, double t) { return sys.delta_plus(l, sys.delta_minus(s, t)); };
  out.delta_plus = [sys, l](double s, double t) { return sys.delta_minus(l, sys.delta_plus(s, t)); };
  // The composition may pass outside the scale on its way; membership of the
  // result is what closure needs.
  out.domain_minus = [ts = sys.scale, f = out.delta_minus](double s, double t) { return ts.contains(f(s, t)); };
  out.domain_plus = [ts = sys.scale, f = out.delta_plus](double s, double t) { return ts.contains(f(s, t)); };
  return out;
}

// ---------------------------------------------------------------------------

DelayFunction::DelayFunction(ShiftSystem sys, double h) : sys_(std::move(sys)), h_(h) {
  if (!sys_.admissible_shift(h) || !(h > sys_.t0 + tol(sys_.t0)))
    throw Error(ErrorCode::OutOfDomain, "delay shift size " + fmt(h) + " is not in (t0,inf)_T");
  h_ = sys_.scale.snap(h);
  const TimeScale& ts = sys_.scale;

  // Sample [t0, delta_+^4(h,t0)] and check the defining properties there.
  std::vector<double> marks{sys_.t0};
  for (int k = 0; k < 4; ++k) {
    if (!sys_.in_domain(Direction::plus, h_, marks.back()))
      throw Error(ErrorCode::NotADelayFunction, "delta_+(h,.) undefined at " + fmt(marks.back()));
    marks.push_back(ts.snap(sys_.delta_plus(h_, marks.back())));
  }
  const double step = (marks[1] - marks[0]) / 16.0;
  std::vector<double> sample = ts.grid(marks.front(), marks.back(), step);
  if (sample.size() > 4096) sample.resize(4096);
  for (double t : sample) {
    if (!sys_.in_domain(Direction::minus, h_, t) || !sys_.in_domain(Direction::plus, h_, t))
      throw Error(ErrorCode::NotADelayFunction, "(h,t) outside D+- at t=" + fmt(t));
    const double d = sys_.delta_minus(h_, t);
    if (!(d < t)) throw Error(ErrorCode::NotADelayFunction, "delta_-(h,t) >= t at t=" + fmt(t));
    if (!ts.contains(d)) throw Error(ErrorCode::NotADelayFunction, "delta_-(h,t) leaves T at t=" + fmt(t));
    if (t >= marks.back()) continue;
    const Jump jt = ts.jump(t);
    const Jump jd = ts.jump(d);
    if ((jt.mu > 0.0) != (jd.mu > 0.0))
      throw Error(ErrorCode::NotADelayFunction, "structure of T not preserved at t=" + fmt(t));
    if (!ts.same_point(sys_.delta_minus(h_, jt.sigma), jd.sigma))
      throw Error(ErrorCode::NotADelayFunction, "delta_-(h,sigma(t)) != sigma(delta_-(h,t)) at t=" + fmt(t));
  }
}

double DelayFunction::operator()(double t) const {
  const double r = sys_.delta_minus(h_, t);
  return sys_.scale.kind() == ScaleKind::RealInterval ? r : sys_.scale.snap(r);
}

double DelayFunction::advance(double t) const {
  const double r = sys_.delta_plus(h_, t);
  return sys_.scale.kind() == ScaleKind::RealInterval ? r : sys_.scale.snap(r);
}

double DelayFunction::derivative(double t) const {
  if (t < sys_.t0 - tol(sys_.t0) || !sys_.scale.contains(t))
    throw Error(ErrorCode::OutOfDomain, "delay derivative requested at " + fmt(t) + " outside [t0,inf)_T");
  double d = 0.0;
  if (sys_.delay_derivative) {
    d = sys_.delay_derivative(h_, t);
  } else {
    const Jump j = sys_.scale.jump(t);
    if (j.mu > 0.0) {
      d = ((*this)(j.sigma) - (*this)(t)) / j.mu;
    } else {
      const double e = sys_.scale.difference_step() * std::max(1.0, std::fabs(t));
      d = (sys_.delta_minus(h_, t + e) - sys_.delta_minus(h_, t - e)) / (2.0 * e);
    }
  }
  if (!(d > 0.0)) throw Error(ErrorCode::NotADelayFunction, "non-positive delay derivative at " + fmt(t));
  return d;
}

double DelayFunction::derivative_bound(double horizon, double real_step) const {
  double m = 0.0;
  const auto pts = sys_.scale.grid(sys_.t0, horizon, real_step);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) m = std::max(m, derivative(pts[i]));
  if (pts.size() == 1) m = derivative(pts.front());
  return m;
}

double delay_delta_derivative(const DelayFunction& df, double t) { return df.derivative(t); }

// ---------------------------------------------------------------------------

bool AxiomReport::all_pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const AxiomLine& l) { return l.status == AxiomStatus::pass; });
}

const AxiomLine* AxiomReport::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

std::string AxiomReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& l : lines) {
    os << l.name << ' ';
    switch (l.status) {
      case AxiomStatus::pass: os << "PASS"; break;
      case AxiomStatus::fail: os << "FAIL"; break;
      case AxiomStatus::skipped: os << "SKIP"; break;
    }
    for (const auto& [k, v] : l.counterexample) os << ' ' << k << '=' << v;
    os << '\n';
  }
  return os.str();
}

namespace {

using Index = std::array<std::size_t, 3>;

class Checker {
 public:
  explicit Checker(std::string name) { line_.name = std::move(name); }

  // An instance whose hypotheses held; ok tells whether the conclusion did.
  void record(bool ok, const Index& idx, std::vector<std::pair<std::string, double>> ce) {
    ++line_.checked;
    if (ok) return;
    if (!worst_ || idx < *worst_) {
      worst_ = idx;
      line_.counterexample = std::move(ce);
    }
  }

  AxiomLine finish() {
    line_.status = worst_ ? AxiomStatus::fail : (line_.checked ? AxiomStatus::pass : AxiomStatus::skipped);
    return line_;
  }

 private:
  AxiomLine line_;
  std::optional<Index> worst_;
};

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> sample_points(const ShiftSystem& sys, std::uint64_t seed) {
  const TimeScale& ts = sys.scale;
  std::vector<double> pts;
  const Interval w = sys.sample_window;
  const bool indexed = ts.kind() != ScaleKind::RealInterval && ts.kind() != ScaleKind::UnionOfIntervals;
  if (indexed) {
    pts = ts.grid(ts.snap(w.lo), ts.snap(w.hi), 1.0);
  } else {
    std::uint64_t state = seed ^ 0x5DEECE66DULL;
    const double offset = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
    constexpr double kGolden = 0.6180339887498949;
    pts.push_back(sys.t0);
    for (int k = 0; pts.size() < 96 && k < 10000; ++k) {
      double u = offset + kGolden * (k + 1);
      u -= std::floor(u);
      const double t = w.lo + (w.hi - w.lo) * u;
      if (ts.contains(t)) pts.push_back(ts.snap(t));
    }
    // Boundary points of a union carry its scattered structure.
    for (double b : {0.0, 1.0})
      if (ts.kind() == ScaleKind::UnionOfIntervals && ts.contains(b)) pts.push_back(b);
  }
  std::erase_if(pts, [&](double t) { return !sys.in_star(t); });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [&](double a, double b) { return ts.same_point(a, b); }), pts.end());
  return pts;
}

}  // namespace

AxiomReport verify_axioms(const ShiftSystem& sys, const SampleSpec& spec) {
  if (spec.count < 100) throw Error(ErrorCode::InsufficientSamples, "at least 100 samples are required");
  const TimeScale& ts = sys.scale;
  const std::vector<double> P = sample_points(sys, spec.seed);
  std::vector<double> S;
  std::copy_if(P.begin(), P.end(), std::back_inserter(S), [&](double t) { return sys.admissible_shift(t); });
  if (P.size() < 2 || S.size() < 2)
    throw Error(ErrorCode::InsufficientSamples, "sample window of " + sys.name + " holds too few points");

  // Low-discrepancy sweep over index triples (additive recurrence on the
  // plastic number), shifted by the seed.
  std::uint64_t state = spec.seed;
  std::array<double, 3> offset{};
  for (double& o : offset) o = static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
  constexpr double g = 1.2207440846057596;
  const std::array<double, 3> alpha{1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)};
  std::vector<Index> tuples(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) {
    for (int d = 0; d < 3; ++d) {
      double u = offset[d] + alpha[d] * static_cast<double>(k + 1);
      u -= std::floor(u);
      tuples[k][d] = static_cast<std::size_t>(u * 1e9);
    }
  }
  auto pick_s = [&](std::size_t raw) { return S[raw % S.size()]; };
  auto pick_p = [&](std::size_t raw) { return P[raw % P.size()]; };

  auto eq = [&](double a, double b) { return ts.same_point(a, b); };
  auto lt = [&](double a, double b) { return a < b && !eq(a, b); };
  auto dom = [&](Direction d, double s, double t) { return sys.in_domain(d, s, t); };
  auto del = [&](Direction d, double s, double t) {
    return d == Direction::minus ? sys.delta_minus(s, t) : sys.delta_plus(s, t);
  };
  using CE = std::vector<std::pair<std::string, double>>;

  AxiomReport report;
  report.system = sys.name;

  Checker closure("closure"), p1("shift.monotone-t"), p2("shift.monotone-s"), p3("shift.identity"),
      p4("shift.inverse"), p5("shift.commute");
  std::array<Checker, 10> derived{Checker("derived.minus-self"),     Checker("derived.minus-identity"),
                                  Checker("derived.round-trip"),     Checker("derived.minus-via-t0"),
                                  Checker("derived.plus-symmetric"), Checker("derived.plus-above-t0"),
                                  Checker("derived.minus-above-t0"), Checker("derived.plus-increasing"),
                                  Checker("derived.chain"),          Checker("derived.minus-hits-t0-on-diagonal")};
  Checker sticky("sticky");
  Checker d_less("delay.less"), d_lower("delay.lower"), d_comm("delay.commutation"),
      d_struct("delay.structure"), d_deriv("delay.derivative");

  for (const Index& raw : tuples) {
    const Index idx{raw[0] % S.size(), raw[1] % P.size(), raw[2] % P.size()};
    const double s = pick_s(raw[0]);
    const double t = pick_p(raw[1]);
    const double u = pick_p(raw[2]);
    const double s2 = pick_s(raw[2]);
    if (dom(Direction::plus, s, t)) ++report.admissible_pairs;

    // Any exception thrown while evaluating an instance counts against it.
    auto guarded = [&](Checker& c, auto&& body) {
      try {
        body();
      } catch (const Error&) {
        c.record(false, idx, CE{{"s", s}, {"t", t}});
      }
    };

    for (Direction d : {Direction::minus, Direction::plus}) {
      guarded(closure, [&] {
        if (dom(d, s, t)) closure.record(sys.in_star(del(d, s, t)), idx, CE{{"s", s}, {"t", t}});
      });
      guarded(p1, [&] {
        const double lo = std::min(t, u), hi = std::max(t, u);
        if (lt(lo, hi) && !lt(lo, s) && dom(d, s, lo) && dom(d, s, hi))
          p1.record(lt(del(d, s, lo), del(d, s, hi)), idx, CE{{"s", s}, {"t", lo}, {"u", hi}});
      });
      guarded(p2, [&] {
        const double a = std::min(s, s2), b = std::max(s, s2);
        if (lt(a, b) && dom(d, a, t) && dom(d, b, t)) {
          const bool ok = d == Direction::minus ? lt(del(d, b, t), del(d, a, t)) : lt(del(d, a, t), del(d, b, t));
          p2.record(ok, idx, CE{{"s1", a}, {"s2", b}, {"t", t}});
        }
      });
      guarded(p4, [&] {
        if (!dom(d, s, t)) return;
        const double r = del(d, s, t);
        p4.record(dom(opposite(d), s, r) && eq(del(opposite(d), s, r), t), idx, CE{{"s", s}, {"t", t}});
      });
      guarded(p5, [&] {
        const Direction o = opposite(d);
        if (!(dom(d, s, t) && dom(o, s2, del(d, s, t)) && dom(o, s2, t))) return;
        const double lhs = del(o, s2, del(d, s, t));
        const double mid = del(o, s2, t);
        p5.record(dom(d, s, mid) && eq(lhs, del(d, s, mid)), idx, CE{{"s", s}, {"t", t}, {"u", s2}});
      });
    }

    guarded(p3, [&] {
      if (sys.admissible_shift(t))
        p3.record(dom(Direction::plus, t, sys.t0) && eq(del(Direction::plus, t, sys.t0), t), idx,
                  CE{{"s", t}, {"t", sys.t0}});
      p3.record(dom(Direction::plus, sys.t0, t) && eq(del(Direction::plus, sys.t0, t), t), idx,
                CE{{"s", sys.t0}, {"t", t}});
    });
    guarded(derived[0], [&] {
      if (dom(Direction::minus, s, s)) derived[0].record(eq(del(Direction::minus, s, s), sys.t0), idx, CE{{"s", s}, {"t", s}});
    });
    guarded(derived[1], [&] {
      if (dom(Direction::minus, sys.t0, t))
        derived[1].record(eq(del(Direction::minus, sys.t0, t), t), idx, CE{{"s", sys.t0}, {"t", t}});
    });
    guarded(derived[2], [&] {
      if (dom(Direction::plus, s, t)) {
        const double r = del(Direction::plus, s, t);
        derived[2].record(dom(Direction::minus, s, r) && eq(del(Direction::minus, s, r), t), idx, CE{{"s", s}, {"t", t}});
      }
      if (dom(Direction::minus, s, t)) {
        const double r = del(Direction::minus, s, t);
        derived[2].record(dom(Direction::plus, s, r) && eq(del(Direction::plus, s, r), t), idx, CE{{"s", s}, {"t", t}});
      }
    });
    guarded(derived[3], [&] {
      if (!sys.admissible_shift(t) || !dom(Direction::minus, s, t) || !dom(Direction::minus, s, sys.t0)) return;
      const double back = del(Direction::minus, s, sys.t0);
      if (!dom(Direction::plus, t, back)) return;
      derived[3].record(eq(del(Direction::plus, t, back), del(Direction::minus, s, t)), idx, CE{{"s", s}, {"t", t}});
    });
    guarded(derived[4], [&] {
      if (dom(Direction::plus, s, s2) && dom(Direction::plus, s2, s))
        derived[4].record(eq(del(Direction::plus, s, s2), del(Direction::plus, s2, s)), idx, CE{{"s", s}, {"t", s2}});
    });
    guarded(derived[5], [&] {
      if (!lt(t, sys.t0) && dom(Direction::plus, s, t))
        derived[5].record(!lt(del(Direction::plus, s, t), sys.t0), idx, CE{{"s", s}, {"t", t}});
    });
    guarded(derived[6], [&] {
      if (!lt(t, s) && dom(Direction::minus, s, t))
        derived[6].record(!lt(del(Direction::minus, s, t), sys.t0), idx, CE{{"s", s}, {"t", t}});
    });
    guarded(derived[7], [&] {
      if (t >= ts.supremum() || !dom(Direction::plus, s, t)) return;
      const Jump j = ts.jump(t);
      if (j.mu > 0.0) {
        if (dom(Direction::plus, s, j.sigma))
          derived[7].record((del(Direction::plus, s, j.sigma) - del(Direction::plus, s, t)) / j.mu > 0.0, idx,
                            CE{{"s", s}, {"t", t}});
      } else {
        const double e = 1e-6 * std::max(1.0, std::fabs(t));
        if (sys.in_star(t - e) && sys.in_star(t + e) && dom(Direction::plus, s, t - e) && dom(Direction::plus, s, t + e))
          derived[7].record(del(Direction::plus, s, t + e) > del(Direction::plus, s, t - e), idx, CE{{"s", s}, {"t", t}});
      }
    });
    guarded(derived[8], [&] {
      const double a = std::min(s, s2), b = std::max(s, s2);  // u <= s <= v
      const double v = t;
      if (lt(v, b) || !dom(Direction::minus, b, v) || !dom(Direction::minus, a, b) || !dom(Direction::minus, a, v))
        return;
      const double x = del(Direction::minus, a, b);
      const double y = del(Direction::minus, b, v);
      if (!dom(Direction::plus, x, y)) return;
      derived[8].record(eq(del(Direction::plus, x, y), del(Direction::minus, a, v)), idx,
                        CE{{"u", a}, {"s", b}, {"v", v}});
    });
    guarded(derived[9], [&] {
      if (dom(Direction::minus, s, t))
        derived[9].record(!eq(del(Direction::minus, s, t), sys.t0) || eq(s, t), idx, CE{{"s", s}, {"t", t}});
    });

    if (sys.sticky_point) {
      const double star = *sys.sticky_point;
      guarded(sticky, [&] {
        sticky.record(eq(sys.delta_minus(s, star), star) && eq(sys.delta_plus(s, star), star) && lt(star, sys.t0), idx,
                      CE{{"s", s}, {"t", star}});
      });
    }

    if (spec.delay_h) {
      const double h = *spec.delay_h;
      const bool in_half_line = !lt(t, sys.t0);
      guarded(d_less, [&] {
        if (in_half_line && dom(Direction::minus, h, t))
          d_less.record(lt(del(Direction::minus, h, t), t), idx, CE{{"h", h}, {"t", t}});
      });
      guarded(d_lower, [&] {
        if (!lt(t, h) && dom(Direction::minus, h, t))
          d_lower.record(!lt(del(Direction::minus, h, t), sys.t0), idx, CE{{"h", h}, {"t", t}});
      });
      if (in_half_line && t < ts.supremum()) {
        guarded(d_comm, [&] {
          if (!dom(Direction::minus, h, t)) return;
          const Jump j = ts.jump(t);
          if (!dom(Direction::minus, h, j.sigma)) return;
          const double d = del(Direction::minus, h, t);
          d_comm.record(ts.contains(d) && eq(del(Direction::minus, h, j.sigma), ts.sigma(d)), idx,
                        CE{{"h", h}, {"t", t}});
        });
        guarded(d_struct, [&] {
          if (!dom(Direction::minus, h, t)) return;
          const double d = del(Direction::minus, h, t);
          d_struct.record(ts.contains(d) && ts.right_scattered(t) == ts.right_scattered(d), idx,
                          CE{{"h", h}, {"t", t}});
        });
        guarded(d_deriv, [&] {
          if (!dom(Direction::minus, h, t)) return;
          const Jump j = ts.jump(t);
          double slope = 0.0;
          if (j.mu > 0.0) {
            if (!dom(Direction::minus, h, j.sigma)) return;
            slope = (del(Direction::minus, h, j.sigma) - del(Direction::minus, h, t)) / j.mu;
          } else {
            const double e = 1e-6 * std::max(1.0, std::fabs(t));
            if (!sys.in_star(t + e) || !sys.in_star(t - e)) return;
            slope = (del(Direction::minus, h, t + e) - del(Direction::minus, h, t - e)) / (2 * e);
          }
          d_deriv.record(slope > 0.0, idx, CE{{"h", h}, {"t", t}});
        });
      }
    }
  }

  if (report.admissible_pairs < 100)
    throw Error(ErrorCode::InsufficientSamples,
                "only " + std::to_string(report.admissible_pairs) + " admissible pairs for " + sys.name);

  for (Checker* c : {&closure, &p1, &p2, &p3, &p4, &p5}) report.lines.push_back(c->finish());
  for (Checker& c : derived) report.lines.push_back(c.finish());
  if (sys.sticky_point) report.lines.push_back(sticky.finish());
  if (spec.delay_h)
    for (Checker* c : {&d_less, &d_lower, &d_comm, &d_struct, &d_deriv}) report.lines.push_back(c->finish());
  return report;
}

}  // namespace tsdelay
