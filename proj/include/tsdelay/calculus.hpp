#pragma once

#include <functional>
#include <utility>

#include "tsdelay/shift.hpp"
#include "tsdelay/time_scale.hpp"

namespace tsdelay {

enum class Regressivity { none, regressive, positive };

struct RegressiveFunction {
  TimeScale scale;
  Fn f;

  double operator()(double t) const { return f(t); }
  /// 1 + mu(t) p(t) at a point.
  double factor(double t) const { return 1.0 + scale.mu(t) * f(t); }
  /// Worst class over the sampled [a,b]_T (the supremum itself excluded).
  Regressivity classify(double a, double b, double real_step) const;
};

double circle_minus(const RegressiveFunction& p, double t);

/// e_p(t,s). Scattered stretches multiply 1 + mu p exactly (keeping the sign
/// when p is regressive but not positively so); dense stretches contribute
/// exp of the integral of p. For t < s the reciprocal of e_p(s,t).
double ts_exponential(const RegressiveFunction& p, double t, double s);

/// e_p(., t0) tabulated on [t0, t_end]_T, evaluable anywhere on dense
/// stretches. Used wherever an exponential sits under an integral.
class ExponentialTable {
 public:
  ExponentialTable(const RegressiveFunction& p, double t0, double t_end, double real_step);
  double operator()(double t) const;
  /// e_p(t,s) = e_p(t,t0) / e_p(s,t0).
  double between(double t, double s) const { return (*this)(t) / (*this)(s); }

 private:
  TimeScale scale_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  Fn p_;
};

/// Integral of f over [delta_-(h,t), t] evaluated through the substitution
/// s -> delta_-(h,s): the t0 ... t part becomes an integral of
/// f(delta_-(h,s)) delta_-^Delta(h,s).
double delayed_integral_split(const DelayFunction& df, const Fn& f, double t);

/// Delta derivative of g(t) = int_{delta_-(h,t)}^t f(t,s) Ds via the
/// Leibniz rule; f_delta_t is the partial delta derivative in t.
double leibniz_delay_derivative(const DelayFunction& df, const Fn2& f, const Fn2& f_delta_t, double t);

struct InterchangePair {
  double lhs;  // int_{delta(t)}^t Ds int_s^t k(u) Du
  double rhs;  // int_{delta(t)}^t [sigma(u) - delta(t)] k(u) Du
};
InterchangePair interchange_double(const DelayFunction& df, const Fn& k, double t);

/// Delta derivative of |x| at a grid point.
double abs_delta_derivative(const GridFunction& x, double t);

}  // namespace tsdelay
