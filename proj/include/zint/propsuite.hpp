#pragma once

#include <zint/chvar.hpp>
#include <zint/quad.hpp>
#include <zint/regfun.hpp>
#include <zint/zlimit.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace zint::props {

struct PropertyOutcome {
  std::string name;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool passed = false;
  bool skipped = false;   // a premise integral did not converge
  std::string details;
};

// Parametrized integrand family g(u, y) with its analytic y-derivative;
// derivatives are never computed symbolically.
struct DiffFamily {
  std::function<double(double, double)> g;      // (u, y)
  std::function<double(double, double)> dg_dy;  // (u, y)
  std::function<double(double)> oscillation_hint;
  std::vector<double> breakpoints;
};

struct InterchangeSpec {
  std::function<double(double, double)> g;  // (u, y)
  std::function<double(double)> s;          // weight in y
  double y_lo = 0.0;
  double y_hi = 1.0;
  double beta = 1.0;
  InitializationFn w;
  // Optional closed form of int_{y_lo}^{y_hi} s(y) g(u, y) dy; computed by
  // quadrature per u-evaluation when absent.
  std::function<double(double)> sg_integral;
  std::function<double(double)> oscillation_hint;
  int outer_panels = 1;  // fixed Gauss-Kronrod panels for the outer y-integral
};

PropertyOutcome check_uniqueness(const Integrand& g, double beta,
                                 const std::vector<InitializationFn>& ws, double tol,
                                 const LimitSchedule& sched);

PropertyOutcome check_linearity(const Integrand& g, const Integrand& h, double a_coef,
                                double b_coef, double beta, const InitializationFn& w, double tol,
                                const LimitSchedule& sched);

PropertyOutcome check_change_of_variable(const Integrand& f, double a,
                                         const ChangeOfVariable& cov, const InitializationFn& w,
                                         double tol, const LimitSchedule& finite_sched,
                                         const LimitSchedule& infinite_sched,
                                         double alpha_ref = 1.0);

PropertyOutcome check_diff_under_integral(const DiffFamily& family, double beta,
                                          const InitializationFn& w, double y0, double step,
                                          double tol, const LimitSchedule& sched);

PropertyOutcome check_interchange(const InterchangeSpec& spec, double tol,
                                  const LimitSchedule& sched);

PropertyOutcome check_round_trip(const InitializationFn& w, double alpha, double tol);

// The built-in corpus: uniqueness, linearity, change of variable, differentiation
// under the integral, interchange of iterated integration, and w <-> z round
// trips, with tolerances pinned per entry.  Skips are reported, not failed.
std::vector<PropertyOutcome> run_default_suite(std::ostream* log = nullptr);

std::string outcomes_to_json(const std::vector<PropertyOutcome>& outcomes);

}  // namespace zint::props
