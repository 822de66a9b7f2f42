#pragma once

#include <zint/chvar.hpp>
#include <zint/errors.hpp>
#include <zint/quad.hpp>
#include <zint/regfun.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace zint {

enum class Extrapolation { none, richardson, epsilon_algorithm };
enum class Progression { geometric, arithmetic };
enum class Status { converged, diverged, inconclusive };

// Discrete schedule for the delta -> 0+ (finite) or b -> infinity (infinite)
// limit.  Geometric progressions use ratio (in (0,1) for delta-shrink, > 1 for
// b-growth); arithmetic progressions use step.  start <= 0 means "choose
// automatically" (beta/2 or 2a + 1).
struct LimitSchedule {
  double start = 0.0;
  double ratio = 0.5;
  double step = 2.399963229728653;  // golden angle; avoids resonant sampling
  Progression progression = Progression::geometric;
  int max_levels = 40;
  int min_levels = 3;
  double tol = 1e-8;                // raw-sequence Cauchy tolerance
  double tol_extrapolated = 1e-10;  // extrapolated-sequence Cauchy tolerance
  Extrapolation extrapolation = Extrapolation::epsilon_algorithm;
  double quad_tol = 1e-12;          // inner quadrature absolute tolerance
  std::int64_t eval_budget = 100'000'000;  // per inner integral
};

LimitSchedule default_finite_schedule();
LimitSchedule default_infinite_schedule();

struct TracePoint {
  int level = 0;
  double param = 0.0;         // delta_k or b_k
  double raw = 0.0;
  double extrapolated = 0.0;
  double abs_diff = 0.0;      // |extrapolated_k - extrapolated_{k-1}|, 0 at level 0
};

struct ZResult {
  double value = 0.0;     // meaningful when status == converged
  Status status = Status::inconclusive;
  std::vector<TracePoint> trace;
  double error_estimate = 0.0;
};

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
  bool hi_infinite = false;
};

inline Bounds finite_bounds(double alpha, double beta) { return {alpha, beta, false}; }
inline Bounds infinite_upper(double a) {
  return {a, std::numeric_limits<double>::infinity(), true};
}

enum class CriticalSide { lower, upper };

struct ZetaPair {
  InitializationFn w;
  ChangeOfVariable cov;
};

using Regularizer = std::variant<InitializationFn, TerminationFn, ZetaPair>;

struct EvalRequest {
  Integrand integrand;
  std::optional<Antiderivative> antiderivative;
  CriticalSide critical_side = CriticalSide::lower;
  Bounds bounds;
  Regularizer regularizer;
};

// Finite-limit regularized integral with a critical endpoint.  Per level,
// evaluates the initialization-window form: with an antiderivative the
// integrated-by-parts expression G(beta) - int_eps^1 G(delta v) w'(v) dv,
// otherwise the direct two-integral form with a memoized numeric tail.
ZResult z_integral_finite(const EvalRequest& req, const LimitSchedule& sched = {});

// Infinite-limit regularized integral with a first-type termination function:
// -F(a) - int_0^c F(x + b_k) z'(x) dx, or the two-integral form when no
// antiderivative is given.
ZResult z_integral_infinite(const EvalRequest& req,
                            const LimitSchedule& sched = default_infinite_schedule());

// Infinite-limit form induced by an initialization function through a change
// of variable: -F(a) - int_0^{e(eps,b_k)} F(x + b_k) zeta'(x, b_k) dx.
ZResult xi_integral_infinite(const EvalRequest& req,
                             const LimitSchedule& sched = default_infinite_schedule());

struct ExtrapolationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double fitted_order = std::numeric_limits<double>::quiet_NaN();  // richardson only
};

// (param, estimate) pairs -> accelerated limit.  richardson fits v + C h^p
// from successive differences; epsilon_algorithm runs the Wynn table and picks
// the most settled even column; none returns the last estimate.
ExtrapolationResult extrapolate(const std::vector<std::pair<double, double>>& seq,
                                Extrapolation method);

// Classification of a (possibly partial) trace: converged when the last two
// successive differences of the deciding sequence are within tolerance,
// diverged when |raw| grows monotonically over the last five levels and an
// unbounded model (c0 + c1 ln h or c h^q) fits with residual under 10% of the
// range, inconclusive otherwise.
Status classify(const std::vector<TracePoint>& trace, const LimitSchedule& sched);

// CSV with header "level,param,raw_estimate,extrapolated,abs_diff" and
// shortest-round-trip number formatting.
std::string trace_to_csv(const std::vector<TracePoint>& trace);

}  // namespace zint
