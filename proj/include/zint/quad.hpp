#pragma once

#include <zint/errors.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

namespace zint {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_open = true;
  bool hi_open = false;

  bool hi_infinite() const { return hi == std::numeric_limits<double>::infinity(); }
};

// A real integrand together with the structural hints the quadrature engine
// can exploit: known derivative discontinuities and, for integrands like
// cos(1/u), the local phase derivative (1/u^2 there).  Panels are never wider
// than a quarter of the local period when a hint is present.
struct Integrand {
  std::function<double(double)> eval;
  Interval domain{0.0, 1.0, true, false};
  std::vector<double> breakpoints{};
  std::function<double(double)> oscillation_hint{};
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
};

// Adaptive Gauss-Kronrod 7/15 with panel subdivision.  Splits at declared
// breakpoints, honors the oscillation hint, and throws QuadratureError when
// the evaluation budget is exhausted.
QuadResult integrate_proper(const Integrand& f, double a, double b, double tol,
                            std::int64_t eval_budget = 1'000'000);

enum class AntiderivativeSource { closed_form, cumulative_numeric };

// F(x) = integral from base_point to x.  Either a user-supplied closed form or
// a memoizing numeric cumulative built by cumulative().
class Antiderivative {
 public:
  Antiderivative() = default;

  static Antiderivative closed_form(double base_point, std::function<double(double)> eval);

  double base_point() const { return phi_; }
  AntiderivativeSource source() const { return source_; }
  bool valid() const { return static_cast<bool>(eval_); }
  double operator()(double x) const { return eval_(x); }

 private:
  double phi_ = 0.0;
  AntiderivativeSource source_ = AntiderivativeSource::closed_form;
  std::function<double(double)> eval_;

  friend Antiderivative cumulative(const Integrand&, double, double, std::int64_t);
};

// Numeric cumulative antiderivative with anchor memoization on a quarter-octave
// ladder (x = 2^{m/4}).  Repeated queries in nested windows cost amortized O(1)
// quadrature panels, and anchor values do not depend on query order, so results
// are reproducible under concurrent use.
Antiderivative cumulative(const Integrand& f, double phi, double tol = 1e-12,
                          std::int64_t eval_budget = 100'000'000);

}  // namespace zint
