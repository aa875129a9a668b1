#include "tsdelay/stability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <sstream>

#include "tsdelay/error.hpp"

namespace tsdelay {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Slack within rounding of the compared terms counts as zero.
double settle(double slack, double magnitude) {
  const double eps = 1e-12 * (1.0 + std::fabs(magnitude));
  if (std::fabs(slack) <= eps) return 0.0;
  return slack;
}

bool at_supremum(const TimeScale& ts, double t) {
  const double sup = ts.supremum();
  return std::isfinite(sup) && ts.same_point(t, sup);
}

double snapped(const TimeScale& ts, double v) { return ts.kind() == ScaleKind::RealInterval ? v : ts.snap(v); }

// Node data shared by both functionals: A, the window integral K of
// k = (b(delta_+) x)^2, and the double integral H in both forms.
struct WindowData {
  std::vector<double> A, K, H, H_int;
};

WindowData window_data(const DelayProblem& p, const Trajectory& tr) {
  const std::size_t n = tr.size();
  std::vector<double> g(n), k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double bp = p.b(p.delay.advance(tr.t[i]));
    g[i] = bp * tr.x[i];
    k[i] = g[i] * g[i];
  }
  WindowData w;
  const std::size_t m = n - tr.start;
  w.A.resize(m);
  w.K.resize(m);
  w.H.resize(m);
  w.H_int.resize(m);
  if (!tr.dense) {
    for (std::size_t i = tr.start; i < n; ++i) {
      const std::size_t d = tr.delayed_index[i];
      double a = 0.0, kk = 0.0, h = 0.0, hi = 0.0;
      for (std::size_t j = d; j < i; ++j) {
        a += tr.mu[j] * g[j];
        kk += tr.mu[j] * k[j];
        double inner = 0.0;
        for (std::size_t l = j; l < i; ++l) inner += tr.mu[l] * k[l];
        h += tr.mu[j] * inner;
        hi += (tr.t[j + 1] - tr.t[d]) * tr.mu[j] * k[j];
      }
      const std::size_t r = i - tr.start;
      w.A[r] = tr.x[i] + a;
      w.K[r] = kk;
      w.H[r] = h;
      w.H_int[r] = hi;
    }
    return w;
  }
  std::vector<double> uk(n);
  for (std::size_t i = 0; i < n; ++i) uk[i] = tr.t[i] * k[i];
  const auto Cg = tr.cumulative(g);
  const auto Ck = tr.cumulative(k);
  const auto CCk = tr.cumulative(Ck);
  const auto Cuk = tr.cumulative(uk);
  for (std::size_t i = tr.start; i < n; ++i) {
    const std::size_t d = tr.delayed_index[i];
    const double beta = tr.t[i] - tr.t[d];
    const std::size_t r = i - tr.start;
    w.A[r] = tr.x[i] + (Cg[i] - Cg[d]);
    w.K[r] = Ck[i] - Ck[d];
    w.H[r] = beta * Ck[i] - (CCk[i] - CCk[d]);
    w.H_int[r] = (Cuk[i] - Cuk[d]) - tr.t[d] * (Ck[i] - Ck[d]);
  }
  return w;
}

std::vector<double> default_ds(const DelayProblem& p) {
  double beta0 = 0.0;
  double ratio = kInf;
  for (double t : check_grid(p, p.t0())) {
    beta0 = std::max(beta0, p.delay.lag(t));
    const double bp = p.b(p.delay.advance(t));
    if (bp == 0.0) return {};
    ratio = std::min(ratio, q_coefficient(p, t) / (bp * bp));
  }
  std::vector<double> out;
  if (!(ratio > beta0)) return out;
  for (int k = 1; k <= 8; ++k) out.push_back(beta0 + k * (ratio - beta0) / 8.0);
  return out;
}

void merge(MarginReport& into, const MarginReport& from, const std::string& prefix) {
  for (Margin m : from.margins) {
    m.name = prefix + m.name;
    into.margins.push_back(m);
  }
  if (into.failure.empty()) into.failure = from.failure;
}

double stable_divergence(const DelayProblem& p, double lam, double from, double to) {
  if (to <= from) return 0.0;
  auto integrand = [&](double s) {
    const double mu = p.scale().mu(s);
    const double bp = p.b(p.delay.advance(s));
    const double Q = q_coefficient(p, s);
    return lam * (p.delay.lag(s) + mu) * bp * bp + mu * Q * Q;
  };
  return p.scale().delta_integral(integrand, from, to);
}

}  // namespace

double q_coefficient(const DelayProblem& p, double t) { return p.a(t) + p.b(p.delay.advance(t)); }

FunctionalCache functionals(const DelayProblem& p, const Trajectory& tr, double lam) {
  if (tr.t.front() > p.delay.history_start() + kSnapTolerance * std::max(1.0, std::fabs(tr.t.front())))
    throw Error(ErrorCode::HistoryGap, "trajectory does not include the history window");
  const WindowData w = window_data(p, tr);
  FunctionalCache c;
  c.lambda = lam;
  for (std::size_t i = tr.start; i < tr.size(); ++i) {
    const std::size_t r = i - tr.start;
    c.t.push_back(tr.t[i]);
    c.x.push_back(tr.x[i]);
    c.Q.push_back(q_coefficient(p, tr.t[i]));
    c.beta.push_back(p.delay.lag(tr.t[i]));
    c.A.push_back(w.A[r]);
    c.H.push_back(w.H[r]);
    c.H_interchange.push_back(w.H_int[r]);
    c.V.push_back(w.A[r] * w.A[r] + lam * w.H[r]);
  }
  return c;
}

std::vector<double> instability_functional(const DelayProblem& p, const Trajectory& tr, double D) {
  const WindowData w = window_data(p, tr);
  std::vector<double> V(w.A.size());
  for (std::size_t r = 0; r < V.size(); ++r) V[r] = w.A[r] * w.A[r] - D * w.K[r];
  return V;
}

InitialFunctional initial_functional(const DelayProblem& p, double lam) {
  const TimeScale& ts = p.scale();
  const double t0 = p.t0();
  const double hs = p.delay.history_start();
  auto bp = [&](double s) { return p.b(p.delay.advance(s)); };
  const double A = p.history(t0) + ts.delta_integral([&](double s) { return bp(s) * p.history(s); }, hs, t0);
  const double H = ts.delta_integral(
      [&](double u) {
        const double k = bp(u) * p.history(u);
        return (ts.sigma(u) - hs) * k * k;
      },
      hs, t0);
  return {A, H, A * A + lam * H};
}

void Margin::update(double slack, double t) {
  if (slack < min_slack) {
    min_slack = slack;
    at = t;
  }
}

bool MarginReport::holds() const {
  return failure.empty() && std::all_of(margins.begin(), margins.end(), [](const Margin& m) { return m.ok(); });
}

const Margin* MarginReport::find(const std::string& name) const {
  for (const auto& m : margins)
    if (m.name == name) return &m;
  return nullptr;
}

Margin& MarginReport::add(const std::string& name, bool strict) {
  margins.push_back(Margin{name, kInf, 0.0, strict});
  return margins.back();
}

std::vector<double> check_grid(const DelayProblem& p, double from) {
  const double end = p.end_point();
  if (from >= end) return {p.scale().snap(from)};
  return p.scale().grid(from, end, p.effective_step());
}

LyapunovTerms lyapunov_terms(const DelayProblem& p, double lam, double t, bool strict) {
  const double beta = p.delay.lag(t);
  const double mu = p.scale().mu(t);
  const double bp = p.b(p.delay.advance(t));
  const double Q = q_coefficient(p, t);
  const double denom = strict ? beta + lam * beta + mu : beta + lam * (beta + mu);
  return {-lam * p.delay.derivative(t) / denom, Q, -lam * (beta + mu) * bp * bp - mu * Q * Q};
}

LyapunovTerms q_lattice_lyapunov_terms(const DelayProblem& p, double lam, double t) {
  const TimeScale& ts = p.scale();
  if (ts.kind() != ScaleKind::QLattice) throw Error(ErrorCode::Unsupported, "q-lattice form needs a q-lattice");
  const double q = ts.parameter();
  // Shift size q^k with delta_-(h,t) = q^-k t.
  const double qk = p.delay.h();
  const double varpi = t * (1.0 - 1.0 / qk);
  const double mu = t * (q - 1.0);
  const double bp = p.b(qk * t);
  const double Q = p.a(t) + bp;
  return {-lam / qk / (varpi + lam * (varpi + mu)), Q, -lam * (varpi + mu) * bp * bp - mu * Q * Q};
}

MarginReport check_lyapunov_condition(const DelayProblem& p, double lam, bool strict) {
  MarginReport rep;
  Margin& lower = rep.add("lyapunov.lower");
  Margin& upper = rep.add("lyapunov.upper");
  Margin& reg_a = rep.add("regressive.a", true);
  Margin& reg_q = rep.add("regressive.Q", true);
  if (!(lam > 0.0)) {
    rep.failure = "lambda must be positive";
    return rep;
  }
  const TimeScale& ts = p.scale();
  for (double t : check_grid(p, p.t0())) {
    if (at_supremum(ts, t)) continue;
    const LyapunovTerms v = lyapunov_terms(p, lam, t, strict);
    lower.update(settle(v.Q - v.lower, std::fabs(v.Q) + std::fabs(v.lower)), t);
    upper.update(settle(v.upper - v.Q, std::fabs(v.Q) + std::fabs(v.upper)), t);
    const double mu = ts.mu(t);
    reg_a.update(1.0 + mu * p.a(t), t);
    reg_q.update(std::fabs(1.0 + mu * v.Q), t);
  }
  return rep;
}

std::vector<double> alpha_candidates(const DelayFunction& df) {
  const TimeScale& ts = df.scale();
  const double t0 = df.t0();
  const double h = df.h();
  std::vector<double> out;
  const auto ps = ts.pieces(t0, h);
  const bool dense = std::any_of(ps.begin(), ps.end(), [](const Piece& q) { return q.dense; });
  if (dense) {
    for (int k = 7; k >= 1; --k) {
      const double a = t0 + (h - t0) * k / 8.0;
      if (ts.contains(a)) out.push_back(a);
    }
  } else {
    for (std::size_t i = ps.size(); i-- > 1;) out.push_back(ps[i].lo);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyAlphaInterval, "(t0,h)_T is empty");
  return out;
}

MarginReport check_alpha_condition(const DelayProblem& p, double lam, double alpha) {
  const DelayFunction& df = p.delay;
  const ShiftSystem& sys = df.system();
  const TimeScale& ts = p.scale();
  alpha_candidates(df);  // throws when (t0,h)_T is empty
  if (!ts.contains(alpha) || !(alpha > df.t0()) || !(alpha < df.h()))
    throw Error(ErrorCode::OutOfDomain, "alpha " + fmt(alpha) + " is not in (t0,h)_T");
  alpha = ts.snap(alpha);
  MarginReport rep;
  Margin& window = rep.add("window");
  Margin& gap = rep.add("Lambda", true);
  Margin& xi = rep.add("xi-1", true);
  for (double t : check_grid(p, alpha)) {
    if (!sys.in_domain(Direction::minus, alpha, t) || !sys.in_domain(Direction::plus, alpha, t)) {
      rep.failure = "(alpha,t) outside D+- at t=" + fmt(t);
      return rep;
    }
    const double da = snapped(ts, sys.delta_minus(alpha, t));
    const double lhs = df(t);
    const double dd = df(da);
    const double rhs = 0.5 * (da + dd);
    window.update(settle(rhs - lhs, std::fabs(lhs) + std::fabs(rhs)), t);
    const double Lambda = lhs - dd;
    gap.update(Lambda, t);
    xi.update(lam * Lambda / df.lag(t), t);
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct SplitWindowBound::State {
  DelayProblem p;
  double lam, alpha, V0, norm, M;
  Antiderivative int_Q, int_a, weight;

  State(const DelayProblem& prob, double l, double a, double v0)
      : p(prob),
        lam(l),
        alpha(a),
        V0(v0),
        norm(prob.history_norm()),
        M(prob.delay.derivative_bound(prob.end_point(), prob.effective_step())),
        int_Q(prob.scale(), [q = prob](double t) { return q_coefficient(q, t); }, prob.t0(),
              std::max(prob.t0(), prob.end_point()), prob.effective_step()),
        int_a(prob.scale(), prob.a, prob.t0(), a, prob.effective_step()),
        weight(prob.scale(),
               [this](double s) {
                 const double mu = p.scale().mu(s);
                 return std::fabs(p.b(s) / (1.0 + mu * p.a(s))) * std::exp(-int_a(s));
               },
               prob.t0(), a, prob.effective_step()) {}

  double lambda_gap(double t) const {
    const double da = snapped(p.scale(), p.delay.system().delta_minus(alpha, t));
    return p.delay(t) - p.delay(da);
  }
  double xi(double t) const { return 1.0 + lam * lambda_gap(t) / p.delay.lag(t); }
};

SplitWindowBound::SplitWindowBound(const DelayProblem& p, double lam, double alpha, double V0)
    : s_(std::make_shared<State>(p, lam, alpha, V0)) {}

double SplitWindowBound::xi(double t) const { return s_->xi(t); }
double SplitWindowBound::lambda_gap(double t) const { return s_->lambda_gap(t); }

double SplitWindowBound::operator()(double t) const {
  const State& s = *s_;
  const TimeScale& ts = s.p.scale();
  if (t < s.alpha && !ts.same_point(t, s.alpha))
    return s.norm * std::exp(s.int_a(t)) * (1.0 + s.M * s.weight(t));
  const double da = snapped(ts, s.p.delay.system().delta_minus(s.alpha, t));
  return std::sqrt(2.0 * s.V0 / (1.0 - 1.0 / s.xi(t))) * std::exp(0.5 * s.int_Q(da));
}

struct IsolatedGapBound::State {
  double factor;
  Antiderivative int_Q;
};

IsolatedGapBound::IsolatedGapBound(const DelayProblem& p, double lam, double V0)
    : s_(std::make_shared<State>(State{
          std::sqrt((1.0 + 1.0 / lam) * V0),
          Antiderivative(p.scale(), [q = p](double t) { return q_coefficient(q, t); }, p.t0(),
                         std::max(p.t0(), p.end_point()), p.effective_step())})) {}

double IsolatedGapBound::operator()(double t) const { return s_->factor * std::exp(0.5 * s_->int_Q(t)); }

struct EtaGammaBound::State {
  DelayProblem p;
  double lam;
  double Mt;
  double end;
  double end_sigma;
  ExponentialTable e_a;
  Antiderivative window;
  std::optional<ExponentialTable> e_gamma;
  double V0 = 0.0;

  static double sigma_end(const DelayProblem& prob) {
    const double e = prob.end_point();
    return prob.scale().mu(e) > 0.0 ? prob.scale().sigma(e) : e;
  }

  State(const DelayProblem& prob, double l)
      : p(prob),
        lam(l),
        Mt(std::max(1.0, prob.delay.derivative_bound(prob.end_point(), prob.effective_step()))),
        end(prob.end_point()),
        end_sigma(sigma_end(prob)),
        e_a(RegressiveFunction{prob.scale(), prob.a}, prob.t0(), prob.delay.advance(end_sigma),
            prob.effective_step()),
        window(prob.scale(), [this](double s) { return e_a(p.delay.advance(s)); }, prob.delay.history_start(),
               end_sigma, prob.effective_step()) {
    e_gamma.emplace(RegressiveFunction{p.scale(), [this](double t) { return gamma(t); }}, p.t0(), end,
                    p.effective_step());
    const double t0 = p.t0();
    const double mass =
        p.scale().delta_integral([&](double s) { return std::fabs(p.history(s)); }, p.delay.history_start(), t0);
    V0 = std::fabs(p.history(t0)) + lam * eta(t0) * mass;
  }

  double eta(double t) const { return e_a(t) / (1.0 + lam * (window(t) - window(p.delay(t)))); }
  double eta_sigma(double t) const {
    const Jump j = p.scale().jump(t);
    return j.mu > 0.0 ? eta(j.sigma) : eta(t);
  }
  double gamma(double t) const { return p.a(t) + lam * Mt * eta_sigma(t); }
};

EtaGammaBound::EtaGammaBound(const DelayProblem& p, double lam) : s_(std::make_shared<State>(p, lam)) {}

double EtaGammaBound::eta(double t) const { return s_->eta(t); }
double EtaGammaBound::eta_sigma(double t) const { return s_->eta_sigma(t); }
double EtaGammaBound::gamma(double t) const { return s_->gamma(t); }
double EtaGammaBound::initial_value() const { return s_->V0; }
double EtaGammaBound::m_tilde() const { return s_->Mt; }

EtaGamma EtaGammaBound::operator()(double t) const {
  return {s_->eta(t), s_->gamma(t), s_->V0 * (*s_->e_gamma)(t)};
}

MarginReport EtaGammaBound::condition() const {
  const State& s = *s_;
  MarginReport rep;
  Margin& weight = rep.add("delay-weight");
  Margin& reg = rep.add("regressive.a", true);
  for (double t : check_grid(s.p, s.p.t0())) {
    if (at_supremum(s.p.scale(), t)) continue;
    const double allowed = s.lam * s.eta_sigma(t) * s.p.delay.derivative(t);
    const double b = std::fabs(s.p.b(t));
    weight.update(settle(allowed - b, allowed + b), t);
    reg.update(1.0 + s.p.scale().mu(t) * s.p.a(t), t);
  }
  return rep;
}

EtaGamma EtaGammaBound::checked(double t) const {
  const MarginReport rep = condition();
  if (!rep.holds()) {
    const Margin* m = rep.find("delay-weight");
    throw Error(ErrorCode::DelayWeightTooLarge,
                "|b| exceeds lam*eta^sigma*delta' at t=" + fmt(m->at) + " (slack " + fmt(m->min_slack) + ")");
  }
  return (*this)(t);
}

// ---------------------------------------------------------------------------

InstabilityCheck check_instability(const DelayProblem& p, double D, double divergence_threshold) {
  InstabilityCheck out;
  out.D = D;
  if (!(D > 0.0)) throw Error(ErrorCode::Config, "D must be positive");
  MarginReport& rep = out.report;
  Margin& ratio = rep.add("ratio-over-D");
  Margin& lag = rep.add("D-over-lag", true);
  Margin& growth = rep.add("divergence");
  const auto grid = check_grid(p, p.t0());
  for (double t : grid) {
    const double bp = p.b(p.delay.advance(t));
    if (bp == 0.0) throw Error(ErrorCode::ZeroB, "b(delta_+(h,t)) vanishes at t=" + fmt(t));
    const double r = q_coefficient(p, t) / (bp * bp);
    ratio.update(settle(r - D, std::fabs(r) + D), t);
    out.beta0 = std::max(out.beta0, p.delay.lag(t));
  }
  lag.update(D - out.beta0, p.t0());
  const auto b2 = std::make_shared<Antiderivative>(
      p.scale(),
      [q = p](double s) {
        const double bp = q.b(q.delay.advance(s));
        return bp * bp;
      },
      p.t0(), std::max(p.t0(), p.end_point()), p.effective_step());
  out.divergence = (*b2)(std::max(p.t0(), p.end_point()));
  growth.update(out.divergence - divergence_threshold, p.end_point());

  const TimeScale& ts = p.scale();
  const double hs = p.delay.history_start();
  const double A0 = initial_functional(p, 0.0).A;
  const double K0 = ts.delta_integral(
      [&](double s) {
        const double k = p.b(p.delay.advance(s)) * p.history(s);
        return k * k;
      },
      hs, p.t0());
  out.V0 = A0 * A0 - D * K0;
  if (!(out.V0 > 0.0)) throw Error(ErrorCode::NonPositiveV0, "V(t0) = " + fmt(out.V0) + " is not positive");
  out.C = D - out.beta0;
  const double cv = out.C * out.V0;
  out.lower_bound = [b2, cv](double t) { return std::sqrt(std::max(0.0, cv * (*b2)(t))); };
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ExpStableSplitWindow: return "ExpStable_SplitWindow";
    case Verdict::ExpStableIsolatedGap: return "ExpStable_IsolatedGap";
    case Verdict::BoundedEtaGamma: return "Bounded_EtaGamma";
    case Verdict::Unstable: return "Unstable_Growth";
    case Verdict::NotCertified: return "NotCertified";
  }
  return "?";
}

std::vector<double> default_lambda_grid() {
  std::vector<double> out{1.0};
  for (int k = 1; k <= 6; ++k) {
    out.push_back(std::ldexp(1.0, k));
    out.push_back(std::ldexp(1.0, -k));
  }
  return out;
}

namespace {

std::optional<Certificate> try_lyapunov(const DelayProblem& p, double lam, const SearchGrids& search) {
  const MarginReport lyap = check_lyapunov_condition(p, lam, search.strict);
  if (!lyap.holds()) return std::nullopt;
  const InitialFunctional init = initial_functional(p, lam);

  std::vector<double> alphas = search.alphas;
  bool gap_empty = false;
  if (alphas.empty()) {
    try {
      alphas = alpha_candidates(p.delay);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAlphaInterval) throw;
      gap_empty = true;
    }
  }
  Certificate cert;
  cert.lambda = lam;
  cert.V0 = init.V;
  cert.divergence_threshold = search.divergence_threshold;
  merge(cert.margins, lyap, "");
  if (!gap_empty) {
    for (double alpha : alphas) {
      MarginReport rep;
      try {
        rep = check_alpha_condition(p, lam, alpha);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::OutOfDomain) continue;
        throw;
      }
      if (!rep.holds()) continue;
      merge(cert.margins, rep, "alpha.");
      cert.verdict = Verdict::ExpStableSplitWindow;
      cert.alpha = p.scale().snap(alpha);
      const SplitWindowBound bound(p, lam, *cert.alpha, init.V);
      cert.bound = [bound](double t) { return bound(t); };
      cert.bound_formula =
          "t >= alpha: sqrt(2 V0 / (1 - 1/xi(t))) * exp(0.5 * int_{t0}^{delta_-(alpha,t)} Q); "
          "t < alpha: |psi| exp(int a) (1 + M int |b/(1+mu a)| exp(-int a))";
      const double end = p.end_point();
      const double reach = end >= *cert.alpha ? snapped(p.scale(), p.delay.system().delta_minus(*cert.alpha, end))
                                              : p.t0();
      cert.divergence = stable_divergence(p, lam, p.t0(), reach);
      cert.notes.push_back("window domain read as (alpha,t) in D- and D+");
      return cert;
    }
    return std::nullopt;
  }
  if (!isolated_gap(p.delay)) return std::nullopt;
  cert.verdict = Verdict::ExpStableIsolatedGap;
  const IsolatedGapBound bound(p, lam, init.V);
  cert.bound = [bound](double t) { return bound(t); };
  cert.bound_formula = "sqrt((1 + 1/lambda) V0) * exp(0.5 * int_{t0}^{t} Q)";
  cert.divergence = stable_divergence(p, lam, p.t0(), p.end_point());
  return cert;
}

std::optional<Certificate> try_eta_gamma(const DelayProblem& p, double lam, const SearchGrids& search) {
  const EtaGammaBound eg(p, lam);
  MarginReport rep = eg.condition();
  Margin& g = rep.add("gamma.nonpositive");
  for (double t : check_grid(p, p.t0())) {
    if (at_supremum(p.scale(), t)) continue;
    g.update(-eg.gamma(t), t);
  }
  if (!rep.holds()) return std::nullopt;
  Certificate cert;
  cert.verdict = Verdict::BoundedEtaGamma;
  cert.lambda = lam;
  cert.V0 = eg.initial_value();
  cert.margins = rep;
  cert.divergence_threshold = search.divergence_threshold;
  cert.bound = [eg](double t) { return eg(t).bound; };
  cert.bound_formula = "V(t0,x_t0) * e_gamma(t,t0), gamma = a + lambda * max(1,M) * eta^sigma";
  cert.notes.push_back("bound without the extra exp(0.5 int gamma) factor");
  return cert;
}

template <class Try>
std::optional<Certificate> first_success(const DelayProblem& p, const std::vector<double>& values,
                                         const SearchGrids& search, Try attempt) {
  auto guarded = [&](double v) -> std::optional<Certificate> {
    try {
      return attempt(p, v, search);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  if (search.jobs <= 1) {
    for (double v : values)
      if (auto c = guarded(v)) return c;
    return std::nullopt;
  }
  for (std::size_t begin = 0; begin < values.size(); begin += search.jobs) {
    const std::size_t end = std::min(values.size(), begin + search.jobs);
    std::vector<std::future<std::optional<Certificate>>> futures;
    for (std::size_t i = begin; i < end; ++i) futures.push_back(std::async(std::launch::async, guarded, values[i]));
    std::optional<Certificate> found;
    for (auto& f : futures) {
      auto c = f.get();
      if (!found && c) found = std::move(c);
    }
    if (found) return found;
  }
  return std::nullopt;
}

}  // namespace

Certificate certify(const DelayProblem& p, const SearchGrids& search) {
  const std::vector<double> lambdas = search.lambdas.empty() ? default_lambda_grid() : search.lambdas;
  if (auto c = first_success(p, lambdas, search, try_lyapunov)) return *c;
  if (auto c = first_success(p, lambdas, search, try_eta_gamma)) return *c;

  std::vector<double> ds = search.Ds;
  if (ds.empty()) ds = default_ds(p);
  auto try_unstable = [](const DelayProblem& q, double D, const SearchGrids& s) -> std::optional<Certificate> {
    InstabilityCheck chk = check_instability(q, D, s.divergence_threshold);
    if (!chk.report.holds()) return std::nullopt;
    Certificate cert;
    cert.verdict = Verdict::Unstable;
    cert.D = D;
    cert.V0 = chk.V0;
    cert.margins = chk.report;
    cert.divergence = chk.divergence;
    cert.divergence_threshold = s.divergence_threshold;
    cert.lower_bound = true;
    cert.bound = chk.lower_bound;
    cert.bound_formula = "sqrt(C * V0 * int_{t0}^{t} b(delta_+(h,s))^2), C = D - beta0 = " + fmt(chk.C);
    cert.notes.push_back("requires V(t0) > 0 for the given history");
    return cert;
  };
  if (auto c = first_success(p, ds, search, try_unstable)) return *c;

  Certificate none;
  none.divergence_threshold = search.divergence_threshold;
  none.notes.push_back("no lambda, alpha or D on the search grids satisfied every hypothesis");
  return none;
}

std::string Certificate::to_text() const {
  std::ostringstream os;
  os << "verdict: " << to_string(verdict) << '\n';
  if (lambda) os << "lambda: " << fmt(*lambda) << '\n';
  if (alpha) os << "alpha: " << fmt(*alpha) << '\n';
  if (D) os << "D: " << fmt(*D) << '\n';
  if (certified()) os << "V0: " << fmt(V0) << '\n';
  for (const Margin& m : margins.margins)
    os << "margin " << m.name << ": " << fmt(m.min_slack) << " at t=" << fmt(m.at) << (m.ok() ? "" : " FAIL") << '\n';
  if (!margins.failure.empty()) os << "failure: " << margins.failure << '\n';
  if (certified()) {
    os << "divergence_integral: " << fmt(divergence) << " (threshold " << fmt(divergence_threshold)
       << (divergence >= divergence_threshold ? ", reached" : ", not reached") << ", finite horizon)\n";
    os << (lower_bound ? "lower_bound: " : "upper_bound: ") << bound_formula << '\n';
  }
  for (const auto& n : notes) os << "note: " << n << '\n';
  return os.str();
}

std::string certificate_csv(const DelayProblem& p, const Trajectory& tr, const Certificate& cert) {
  std::vector<double> V;
  if (cert.verdict == Verdict::Unstable) {
    V = instability_functional(p, tr, *cert.D);
  } else if (cert.lambda) {
    V = functionals(p, tr, *cert.lambda).V;
  }
  std::string out = "t,x,V,bound,Q,beta\n";
  for (std::size_t i = tr.start; i < tr.size(); ++i) {
    const double t = tr.t[i];
    out += fmt(t) + ',' + fmt(tr.x[i]) + ',';
    if (!V.empty()) out += fmt(V[i - tr.start]);
    out += ',';
    if (cert.bound) out += fmt(cert.bound(t));
    out += ',' + fmt(q_coefficient(p, t)) + ',' + fmt(p.delay.lag(t)) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

const LiteratureLine* LiteratureReport::find(const std::string& name) const {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

std::string LiteratureReport::to_text() const {
  std::ostringstream os;
  for (const auto& l : lines) {
    os << l.name << ' ' << (!l.applicable ? "N/A" : (l.holds ? "HOLDS" : "FAILS"));
    if (l.applicable) os << " worst=" << fmt(l.worst);
    if (l.first_failure) os << " first_failure_t=" << fmt(*l.first_failure);
    if (!l.detail.empty()) os << " (" << l.detail << ')';
    os << '\n';
  }
  return os.str();
}

LiteratureReport check_literature_conditions(const DelayProblem& p, double N, std::optional<double> lam) {
  LiteratureReport rep;
  const TimeScale& ts = p.scale();
  const DelayFunction& df = p.delay;
  const auto grid = check_grid(p, p.t0());
  const double end = p.end_point();
  const double step = p.effective_step();

  {
    LiteratureLine l;
    l.name = "dominant-decay";
    l.holds = true;
    l.worst = kInf;
    for (double t : grid) {
      const double slack = std::min(N - std::fabs(p.b(t)), -N - p.a(t));
      l.worst = std::min(l.worst, slack);
      const bool ok = N - std::fabs(p.b(t)) >= 0.0 && p.a(t) < -N;
      if (!ok && !l.first_failure) l.first_failure = t;
      l.holds = l.holds && ok;
    }
    l.detail = "|b| <= N and a < -N with N=" + fmt(N);
    rep.lines.push_back(l);
  }

  {
    LiteratureLine l;
    l.name = "fixed-point-contraction";
    const Fn pf = [b = p.b, df](double t) { return b(df.advance(t)); };
    bool nonzero = true;
    for (double t : grid) nonzero = nonzero && pf(t) != 0.0;
    const RegressiveFunction rp{ts, pf};
    try {
      const ExponentialTable E(rp, p.t0(), end, step);
      const Antiderivative abs_p(ts, [pf](double s) { return std::fabs(pf(s)); }, df.history_start(), end, step);
      auto W = [&](double s) { return abs_p(s) - abs_p(df(s)); };
      const Antiderivative inner(
          ts, [&](double s) { return std::fabs(circle_minus(rp, s)) * W(s) / E(s); }, p.t0(), end, step);
      l.worst = 0.0;
      for (double t : grid) {
        const double v = W(t) + E(t) * inner(t);
        l.worst = std::max(l.worst, v);
        if (v >= 1.0 && !l.first_failure) l.first_failure = t;
      }
      const double decay = std::fabs(E(end));
      l.holds = nonzero && !l.first_failure && decay < 1e-2;
      l.detail = "sup of the contraction integral must stay below 1; |e_p(T,t0)|=" + fmt(decay) +
                 " as finite-horizon proxy for e_p -> 0" + (nonzero ? "" : "; p vanishes somewhere");
    } catch (const Error& e) {
      l.holds = false;
      l.detail = e.what();
    }
    rep.lines.push_back(l);
  }

  {
    LiteratureLine l;
    l.name = "constant-lag-window";
    bool constant_lag = ts.kind() == ScaleKind::RealInterval;
    const double h = df.lag(p.t0());
    for (double t : grid) constant_lag = constant_lag && std::fabs(df.lag(t) - h) <= 1e-12 * std::max(1.0, std::fabs(t));
    l.applicable = constant_lag;
    if (constant_lag) {
      l.holds = true;
      l.worst = kInf;
      for (double t : grid) {
        const double s = p.a(t) + p.b(t + h);
        const double lo = -1.0 / (2.0 * h);
        const double hi = -h * p.b(t + h) * p.b(t + h);
        const double slack = std::min(settle(s - lo, std::fabs(s) + std::fabs(lo)), settle(hi - s, std::fabs(s) + std::fabs(hi)));
        l.worst = std::min(l.worst, slack);
        if (slack < 0.0 && !l.first_failure) l.first_failure = t;
      }
      l.holds = !l.first_failure;
      l.detail = "-1/(2h) <= a(t)+b(t+h) <= -h b(t+h)^2, h=" + fmt(h);
    } else {
      l.detail = "needs the real line with delay t - h";
    }
    rep.lines.push_back(l);
  }

  {
    LiteratureLine l;
    l.name = "pure-delay-window";
    bool pure = lam.has_value();
    for (double t : grid) pure = pure && p.a(t) == 0.0;
    l.applicable = pure;
    if (pure) {
      l.worst = kInf;
      for (double t : grid) {
        if (at_supremum(ts, t)) continue;
        const double beta = df.lag(t);
        const double mu = ts.mu(t);
        const double bp = p.b(df.advance(t));
        const double lower = -*lam * df.derivative(t) / (beta + *lam * (beta + mu));
        const double upper = -bp * bp * (*lam * beta + (1.0 + *lam) * mu);
        const double slack = std::min(settle(bp - lower, std::fabs(bp) + std::fabs(lower)),
                                      settle(upper - bp, std::fabs(bp) + std::fabs(upper)));
        if (t == grid.front())
          l.detail = "at t0: lower=" + fmt(lower) + " b(delta_+)=" + fmt(bp) + " upper=" + fmt(upper);
        l.worst = std::min(l.worst, slack);
        if (slack < 0.0 && !l.first_failure) l.first_failure = t;
      }
      l.holds = !l.first_failure;
      l.detail += ", lambda=" + fmt(*lam);
    } else {
      l.detail = "needs a = 0 and a lambda";
    }
    rep.lines.push_back(l);
  }
  return rep;
}

}  // namespace tsdelay
