#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsdelay/calculus.hpp"
#include "tsdelay/solver.hpp"

namespace tsdelay {

/// Q(t) = a(t) + b(delta_+(h,t)).
double q_coefficient(const DelayProblem& p, double t);

/// Lyapunov functional data on the trajectory nodes at or after t0.
struct FunctionalCache {
  double lambda = 0.0;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> Q;
  std::vector<double> beta;
  std::vector<double> A;
  /// Double integral of b(delta_+(h,u))^2 x(u)^2 over the delay window, as an
  /// iterated integral and through the interchanged single integral.
  std::vector<double> H;
  std::vector<double> H_interchange;
  std::vector<double> V;
};

FunctionalCache functionals(const DelayProblem& p, const Trajectory& tr, double lam);

/// A, H and V at t0 from the history alone.
struct InitialFunctional {
  double A;
  double H;
  double V;
};
InitialFunctional initial_functional(const DelayProblem& p, double lam);

/// One-sided slack of an inequality over a grid.
struct Margin {
  std::string name;
  double min_slack = kInf;
  double at = 0.0;
  bool strict = false;
  bool ok() const { return strict ? min_slack > 0.0 : min_slack >= 0.0; }
  void update(double slack, double t);
};

struct MarginReport {
  std::deque<Margin> margins;  // deque: add() hands out stable references
  std::string failure;  // hard failure such as lost regressivity; empty if none
  bool holds() const;
  const Margin* find(const std::string& name) const;
  Margin& add(const std::string& name, bool strict = false);
};

/// [from, end]_T sampled with the problem's dense step, end being the last
/// point of T not beyond the horizon.
std::vector<double> check_grid(const DelayProblem& p, double from);

struct LyapunovTerms {
  double lower;
  double Q;
  double upper;
};
/// Both sides of the Lyapunov condition at t. The strict variant uses the
/// denominator beta + lam*beta + mu on the left.
LyapunovTerms lyapunov_terms(const DelayProblem& p, double lam, double t, bool strict = false);
/// Same condition on q^Z for shift size q^k, written through
/// varpi(t) = t(1 - q^-k) and mu(t) = t(q - 1).
LyapunovTerms q_lattice_lyapunov_terms(const DelayProblem& p, double lam, double t);
/// Checks lower <= Q <= upper, 1 + mu a > 0 and 1 + mu Q != 0 on the grid.
MarginReport check_lyapunov_condition(const DelayProblem& p, double lam, bool strict = false);

/// Usable alpha values in (t0,h)_T, largest first: the lattice points on
/// isolated stretches, h-multiples k/8 (k = 7..1) of the gap on dense ones.
std::vector<double> alpha_candidates(const DelayFunction& df);

/// delta_-(h,t) <= (delta_-(alpha,t) + delta_-(h,delta_-(alpha,t)))/2 on
/// [alpha, end]_T, with (alpha,t) in both domains, Lambda > 0 and xi > 1.
MarginReport check_alpha_condition(const DelayProblem& p, double lam, double alpha);

using BoundFn = std::function<double(double)>;

/// Split-window upper bound for |x| (needs an admissible alpha).
class SplitWindowBound {
 public:
  SplitWindowBound(const DelayProblem& p, double lam, double alpha, double V0);
  double operator()(double t) const;
  double xi(double t) const;
  double lambda_gap(double t) const;

 private:
  struct State;
  std::shared_ptr<const State> s_;
};

/// Upper bound for |x| when (t0,h)_T is empty.
class IsolatedGapBound {
 public:
  IsolatedGapBound(const DelayProblem& p, double lam, double V0);
  double operator()(double t) const;

 private:
  struct State;
  std::shared_ptr<const State> s_;
};

struct EtaGamma {
  double eta;
  double gamma;
  double bound;
};

/// |x(t)| <= V(t0,x_t0) e_gamma(t,t0) with gamma = a + lam*max(1,M)*eta^sigma.
class EtaGammaBound {
 public:
  EtaGammaBound(const DelayProblem& p, double lam);
  double eta(double t) const;
  double eta_sigma(double t) const;
  double gamma(double t) const;
  double initial_value() const;
  double m_tilde() const;
  EtaGamma operator()(double t) const;
  /// |b(t)| - lam eta^sigma(t) delta_-^Delta(h,t) <= 0 and a in R+ on the grid.
  MarginReport condition() const;
  /// Throws DelayWeightTooLarge when condition() fails.
  EtaGamma checked(double t) const;

 private:
  struct State;
  std::shared_ptr<const State> s_;
};

struct InstabilityCheck {
  MarginReport report;
  double D = 0.0;
  double beta0 = 0.0;
  double C = 0.0;
  double V0 = 0.0;
  double divergence = 0.0;  // int_{t0}^{end} b(delta_+(h,s))^2
  BoundFn lower_bound;
};

/// beta(t) <= beta0 < D <= Q(t)/b(delta_+(h,t))^2 on the grid, divergence of
/// the b^2 integral past the threshold, and V(t0) > 0 for the alternative
/// functional V = A^2 - D int b(delta_+)^2 x^2. Throws ZeroB, NonPositiveV0.
InstabilityCheck check_instability(const DelayProblem& p, double D, double divergence_threshold = 10.0);

/// V = A^2 - D int_{delta_-(h,t)}^t b(delta_+(h,s))^2 x(s)^2 Ds on the nodes at or after t0.
std::vector<double> instability_functional(const DelayProblem& p, const Trajectory& tr, double D);

enum class Verdict { ExpStableSplitWindow, ExpStableIsolatedGap, BoundedEtaGamma, Unstable, NotCertified };
std::string_view to_string(Verdict v);

struct SearchGrids {
  std::vector<double> lambdas;  // empty: 1, 2, 1/2, 4, 1/4, ..., 64, 1/64
  std::vector<double> alphas;   // empty: alpha_candidates
  std::vector<double> Ds;       // empty: beta0 + k (min Q/b^2 - beta0)/8, k = 1..8
  double divergence_threshold = 10.0;
  bool strict = false;
  unsigned jobs = 1;
};

std::vector<double> default_lambda_grid();

struct Certificate {
  Verdict verdict = Verdict::NotCertified;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> D;
  double V0 = 0.0;
  MarginReport margins;
  double divergence = 0.0;
  double divergence_threshold = 10.0;
  std::string bound_formula;
  bool lower_bound = false;
  BoundFn bound;
  std::vector<std::string> notes;

  bool certified() const { return verdict != Verdict::NotCertified; }
  std::string to_text() const;
};

Certificate certify(const DelayProblem& p, const SearchGrids& search = {});

/// Companion CSV t,x,V,bound,Q,beta over the trajectory nodes at or after t0.
std::string certificate_csv(const DelayProblem& p, const Trajectory& tr, const Certificate& cert);

struct LiteratureLine {
  std::string name;
  bool applicable = true;
  bool holds = false;
  double worst = 0.0;
  std::optional<double> first_failure;
  std::string detail;
};

struct LiteratureReport {
  std::vector<LiteratureLine> lines;
  const LiteratureLine* find(const std::string& name) const;
  std::string to_text() const;
};

/// Stability conditions from the literature, for comparison:
/// dominant-decay |b| <= N, a < -N; fixed-point-contraction on
/// p(t) = b(delta_+(h,t)); constant-lag-window (real line, t - h only);
/// pure-delay-window when a vanishes and lam is given.
LiteratureReport check_literature_conditions(const DelayProblem& p, double N, std::optional<double> lam = {});

}  // namespace tsdelay
