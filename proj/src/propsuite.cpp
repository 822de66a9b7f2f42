#include <zint/osc.hpp>
#include <zint/propsuite.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zint::props {

namespace {

const char* status_name(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::diverged: return "diverged";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

PropertyOutcome skipped(std::string name, std::string why) {
  PropertyOutcome out;
  out.name = std::move(name);
  out.skipped = true;
  out.passed = false;
  out.details = std::move(why);
  return out;
}

PropertyOutcome compared(std::string name, double lhs, double rhs, double tol,
                         std::string details) {
  PropertyOutcome out;
  out.name = std::move(name);
  out.lhs = lhs;
  out.rhs = rhs;
  out.tolerance = tol;
  out.passed = std::abs(lhs - rhs) <= tol;
  out.details = std::move(details);
  return out;
}

std::optional<double> run_finite(const Integrand& g, double beta, const InitializationFn& w,
                                 const LimitSchedule& sched, std::string* note) {
  EvalRequest req;
  req.integrand = g;
  req.bounds = finite_bounds(0.0, beta);
  req.regularizer = w;
  const ZResult res = z_integral_finite(req, sched);
  if (res.status != Status::converged) {
    if (note) *note += std::string(" [") + status_name(res.status) + " after " +
                       std::to_string(res.trace.size()) + " levels]";
    return std::nullopt;
  }
  return res.value;
}

// Fixed-panel Gauss-Kronrod for outer integrals whose integrand carries engine
// noise; adaptivity would chase that noise.
double fixed_panels(const std::function<double(double)>& f, double a, double b, int panels) {
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels;
    const double hi = a + (b - a) * (i + 1) / panels;
    Integrand seg;
    seg.eval = f;
    sum += integrate_proper(seg, lo, hi, 1e9).value;
  }
  return sum;
}

// Geometric delta schedule that is forced down to delta_floor before the
// Cauchy test may fire; raw-sequence stopping.
LimitSchedule osc_finite_sched(double beta, double delta_floor, double tol_raw) {
  LimitSchedule s;
  s.start = 0.5 * beta;
  s.ratio = 0.5;
  int k = 0;
  double d = s.start;
  while (d > delta_floor && k < 60) {
    d *= 0.5;
    ++k;
  }
  s.min_levels = k + 1;
  s.max_levels = std::max(40, s.min_levels + 8);
  s.tol = tol_raw;
  s.tol_extrapolated = 1e-13;
  s.extrapolation = Extrapolation::none;
  s.quad_tol = 1e-12;
  s.eval_budget = 4'000'000'000LL;
  return s;
}

LimitSchedule smooth_finite_sched() {
  LimitSchedule s = default_finite_schedule();
  s.eval_budget = 1'000'000'000LL;
  return s;
}

LimitSchedule infinite_sched() {
  LimitSchedule s = default_infinite_schedule();
  s.tol_extrapolated = 1e-8;
  s.quad_tol = 1e-12;
  s.eval_budget = 1'000'000'000LL;
  return s;
}

}  // namespace

PropertyOutcome check_uniqueness(const Integrand& g, double beta,
                                 const std::vector<InitializationFn>& ws, double tol,
                                 const LimitSchedule& sched) {
  if (ws.size() < 2) throw Error("check_uniqueness: need at least two initialization functions");
  std::string note;
  std::vector<double> values;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    std::string local = "w" + std::to_string(i);
    const auto v = run_finite(g, beta, ws[i], sched, &local);
    if (!v) return skipped("uniqueness", "run " + local + " did not converge");
    values.push_back(*v);
    note += local + "=" + std::to_string(*v) + " ";
  }
  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  return compared("uniqueness", vmax, vmin, tol, note);
}

PropertyOutcome check_linearity(const Integrand& g, const Integrand& h, double a_coef,
                                double b_coef, double beta, const InitializationFn& w, double tol,
                                const LimitSchedule& sched) {
  std::string note;
  const auto zg = run_finite(g, beta, w, sched, &note);
  if (!zg) return skipped("linearity", "Z(g) did not converge" + note);
  const auto zh = run_finite(h, beta, w, sched, &note);
  if (!zh) return skipped("linearity", "Z(h) did not converge" + note);

  Integrand comb;
  auto ge = g.eval;
  auto he = h.eval;
  comb.eval = [ge, he, a_coef, b_coef](double u) { return a_coef * ge(u) + b_coef * he(u); };
  comb.domain = g.domain;
  comb.breakpoints = g.breakpoints;
  comb.breakpoints.insert(comb.breakpoints.end(), h.breakpoints.begin(), h.breakpoints.end());
  std::sort(comb.breakpoints.begin(), comb.breakpoints.end());
  if (g.oscillation_hint && h.oscillation_hint) {
    auto hg = g.oscillation_hint;
    auto hh = h.oscillation_hint;
    comb.oscillation_hint = [hg, hh](double u) { return std::max(hg(u), hh(u)); };
  } else if (g.oscillation_hint) {
    comb.oscillation_hint = g.oscillation_hint;
  } else if (h.oscillation_hint) {
    comb.oscillation_hint = h.oscillation_hint;
  }

  const auto zc = run_finite(comb, beta, w, sched, &note);
  if (!zc) return skipped("linearity", "Z(a g + b h) did not converge" + note);

  return compared("linearity", a_coef * *zg + b_coef * *zh, *zc, tol,
                  "a=" + std::to_string(a_coef) + " b=" + std::to_string(b_coef));
}

PropertyOutcome check_change_of_variable(const Integrand& f, double a,
                                         const ChangeOfVariable& cov, const InitializationFn& w,
                                         double tol, const LimitSchedule& finite_sched,
                                         const LimitSchedule& inf_sched, double alpha_ref) {
  EvalRequest inf_req;
  inf_req.integrand = f;
  inf_req.bounds = infinite_upper(a);
  inf_req.regularizer = z_from_w(w, alpha_ref);
  const ZResult lhs = z_integral_infinite(inf_req, inf_sched);
  if (lhs.status != Status::converged)
    return skipped("change-of-variable",
                   std::string("infinite-limit side ") + status_name(lhs.status));

  const Integrand g = transform_integrand_to_finite(f, a, cov);
  const double beta = cov.psi(a);
  std::string note = "map=" + cov.id;
  const auto rhs = run_finite(g, beta, w, finite_sched, &note);
  if (!rhs) return skipped("change-of-variable", "finite-limit side did not converge" + note);

  return compared("change-of-variable", lhs.value, *rhs, tol, note);
}

PropertyOutcome check_diff_under_integral(const DiffFamily& family, double beta,
                                          const InitializationFn& w, double y0, double step,
                                          double tol, const LimitSchedule& sched) {
  auto z_at = [&](double y, std::string* note) {
    Integrand gy;
    gy.eval = [&family, y](double u) { return family.g(u, y); };
    gy.domain = {0.0, beta, true, false};
    gy.breakpoints = family.breakpoints;
    gy.oscillation_hint = family.oscillation_hint;
    return run_finite(gy, beta, w, sched, note);
  };

  std::string note;
  const auto zp1 = z_at(y0 + step, &note);
  const auto zm1 = z_at(y0 - step, &note);
  const auto zp2 = z_at(y0 + 0.5 * step, &note);
  const auto zm2 = z_at(y0 - 0.5 * step, &note);
  if (!zp1 || !zm1 || !zp2 || !zm2)
    return skipped("diff-under-integral", "a shifted run did not converge" + note);

  const double d_h = (*zp1 - *zm1) / (2.0 * step);
  const double d_h2 = (*zp2 - *zm2) / step;
  const double lhs = (4.0 * d_h2 - d_h) / 3.0;  // quadratic Richardson refinement

  Integrand dg;
  dg.eval = [&family, y0](double u) { return family.dg_dy(u, y0); };
  dg.domain = {0.0, beta, true, false};
  dg.breakpoints = family.breakpoints;
  dg.oscillation_hint = family.oscillation_hint;
  const auto rhs = z_at(y0, &note), rhs_d = run_finite(dg, beta, w, sched, &note);
  (void)rhs;
  if (!rhs_d) return skipped("diff-under-integral", "derivative run did not converge" + note);

  return compared("diff-under-integral", lhs, *rhs_d, tol,
                  "y0=" + std::to_string(y0) + " step=" + std::to_string(step));
}

PropertyOutcome check_interchange(const InterchangeSpec& spec, double tol,
                                  const LimitSchedule& sched) {
  bool premature = false;
  std::string note;
  auto z_of_y = [&](double y) -> double {
    Integrand gy;
    gy.eval = [&spec, y](double u) { return spec.g(u, y); };
    gy.domain = {0.0, spec.beta, true, false};
    gy.oscillation_hint = spec.oscillation_hint;
    const auto v = run_finite(gy, spec.beta, spec.w, sched, &note);
    if (!v) {
      premature = true;
      return 0.0;
    }
    return *v;
  };
  const double lhs = fixed_panels([&](double y) { return spec.s(y) * z_of_y(y); }, spec.y_lo,
                                  spec.y_hi, spec.outer_panels);
  if (premature) return skipped("interchange", "an inner Z-run did not converge" + note);

  Integrand h;
  if (spec.sg_integral) {
    h.eval = spec.sg_integral;
  } else {
    auto g = spec.g;
    auto s = spec.s;
    const double ylo = spec.y_lo;
    const double yhi = spec.y_hi;
    h.eval = [g, s, ylo, yhi](double u) {
      Integrand inner;
      inner.eval = [&](double y) { return s(y) * g(u, y); };
      return integrate_proper(inner, ylo, yhi, 1e-10).value;
    };
  }
  h.domain = {0.0, spec.beta, true, false};
  h.oscillation_hint = spec.oscillation_hint;
  const auto rhs = run_finite(h, spec.beta, spec.w, sched, &note);
  if (!rhs) return skipped("interchange", "outer Z-run did not converge" + note);

  return compared("interchange", lhs, *rhs, tol,
                  "y in [" + std::to_string(spec.y_lo) + ", " + std::to_string(spec.y_hi) + "]");
}

PropertyOutcome check_round_trip(const InitializationFn& w, double alpha, double tol) {
  const InitializationFn back = w_from_z(z_from_w(w, alpha), alpha);
  const double eps = w.epsilon();
  double sup = 0.0;
  constexpr int kGrid = 512;
  for (int i = 0; i < kGrid; ++i) {
    const double v = eps + (1.0 - eps) * (i + 0.5) / kGrid;
    sup = std::max(sup, std::abs(w.w(v) - back.w(v)));
  }
  return compared("round-trip", sup, 0.0, tol, "alpha=" + std::to_string(alpha));
}

namespace {

Integrand example1_integrand() {
  Integrand g;
  g.eval = [](double u) { return osc::sin_recip(u) / (u * u); };
  g.domain = {0.0, 1.0, true, false};
  g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  return g;
}

Integrand example2_integrand() {
  Integrand g;
  g.eval = [](double u) { return osc::cos_recip(u) / (u * u * u); };
  g.domain = {0.0, 1.0, true, false};
  g.oscillation_hint = [](double u) { return 1.0 / (u * u); };
  return g;
}

Integrand inverse_sqrt_integrand() {
  Integrand g;
  g.eval = [](double u) { return 1.0 / std::sqrt(u); };
  g.domain = {0.0, 1.0, true, false};
  return g;
}

}  // namespace

std::vector<PropertyOutcome> run_default_suite(std::ostream* log) {
  std::vector<PropertyOutcome> out;
  const InitializationFn ramp = make_linear_ramp();
  const InitializationFn smooth = make_smoothstep();
  const InitializationFn ramp_smooth = combine_init(ramp, smooth);

  auto emit = [&](PropertyOutcome o, const std::string& label) {
    o.name = label;
    if (log)
      *log << (o.skipped ? "[skip] " : (o.passed ? "[pass] " : "[FAIL] ")) << o.name
           << "  lhs=" << o.lhs << " rhs=" << o.rhs << " tol=" << o.tolerance
           << (o.details.empty() ? "" : "  (" + o.details + ")") << "\n";
    out.push_back(std::move(o));
  };

  // --- uniqueness -----------------------------------------------------------
  emit(check_uniqueness(example1_integrand(), 1.0, {ramp, smooth}, 1e-5,
                        osc_finite_sched(1.0, 2.0e-6, 4e-5)),
       "uniqueness: sin(1/u)/u^2, {ramp, smoothstep}");
  emit(check_uniqueness(example2_integrand(), 1.0, {smooth, ramp_smooth}, 1e-5,
                        osc_finite_sched(1.0, 1.3e-7, 4e-5)),
       "uniqueness: cos(1/u)/u^3, {smoothstep, ramp (.) smoothstep}");
  emit(check_uniqueness(inverse_sqrt_integrand(), 1.0, {ramp, smooth}, 1e-9,
                        smooth_finite_sched()),
       "uniqueness: u^(-1/2), {ramp, smoothstep}");

  // --- linearity -------------------------------------------------------------
  emit(check_linearity(example1_integrand(), example2_integrand(), 1.0, 1.0, 1.0, smooth, 1e-5,
                       osc_finite_sched(1.0, 1.2e-7, 4e-5)),
       "linearity: 1*Ex1 + 1*Ex2 under smoothstep");
  emit(check_linearity(example1_integrand(), example2_integrand(), 3.0, -2.0, 1.0, smooth, 1e-5,
                       osc_finite_sched(1.0, 7.0e-8, 4e-5)),
       "linearity: 3*Ex1 - 2*Ex2 under smoothstep");
  emit(check_linearity(example1_integrand(), example2_integrand(), 0.0, 1.0, 1.0, smooth, 1e-9,
                       osc_finite_sched(1.0, 1.0e-5, 1e-3)),
       "linearity: 0*Ex1 + 1*Ex2 (trivial)");

  // --- change of variable ----------------------------------------------------
  {
    Integrand f;
    f.eval = [](double x) { return std::cos(x); };
    f.domain = {1.0, std::numeric_limits<double>::infinity(), false, true};
    f.oscillation_hint = [](double) { return 1.0; };
    emit(check_change_of_variable(f, 1.0, make_power_map(1.0), smooth, 1e-5,
                                  osc_finite_sched(1.0, 2.5e-7, 4e-6), infinite_sched()),
         "change of variable: cos(x), power map r=1");
  }
  {
    Integrand f;
    f.eval = [](double x) { return x * std::cos(x); };
    f.domain = {1.0, std::numeric_limits<double>::infinity(), false, true};
    f.oscillation_hint = [](double) { return 1.0; };
    emit(check_change_of_variable(f, 1.0, make_power_map(1.0), smooth, 1e-5,
                                  osc_finite_sched(1.0, 1.3e-7, 2e-5), infinite_sched()),
         "change of variable: x cos(x), power map r=1");
  }
  {
    Integrand f;
    f.eval = [](double x) { return std::exp(-x); };
    f.domain = {0.0, std::numeric_limits<double>::infinity(), false, true};
    emit(check_change_of_variable(f, 0.0, make_exp_map(1.0), smooth, 1e-8, smooth_finite_sched(),
                                  infinite_sched()),
         "change of variable: exp(-x), exp map alpha=1");
  }
  {
    Integrand f;
    f.eval = [](double x) { return std::exp(-x); };
    f.domain = {1.0, std::numeric_limits<double>::infinity(), false, true};
    emit(check_change_of_variable(f, 1.0, make_power_map(2.0), smooth, 1e-8, smooth_finite_sched(),
                                  infinite_sched()),
         "change of variable: exp(-x), power map r=2");
  }

  // --- differentiation under the integral ------------------------------------
  {
    DiffFamily fam;
    fam.g = [](double u, double y) { return osc::sin_ratio(y, u) / (u * u); };
    fam.dg_dy = [](double u, double y) { return osc::cos_ratio(y, u) / (u * u * u); };
    fam.oscillation_hint = [](double u) { return 2.0 / (u * u); };
    // Central differences divide the O(delta) window residue by the step, so
    // the tolerance is pinned by that noise amplification, not by truncation.
    emit(check_diff_under_integral(fam, 1.0, smooth, 1.0, 1e-3, 2e-2,
                                   osc_finite_sched(1.0, 1.3e-7, 4e-5)),
         "diff under integral: sin(y/u)/u^2 at y0=1");
  }
  {
    DiffFamily fam;
    fam.g = [](double u, double y) { return y / std::sqrt(u); };
    fam.dg_dy = [](double u, double) { return 1.0 / std::sqrt(u); };
    emit(check_diff_under_integral(fam, 1.0, smooth, 2.0, 1e-3, 1e-6, smooth_finite_sched()),
         "diff under integral: y u^(-1/2) at y0=2");
  }
  {
    DiffFamily fam;
    fam.g = [](double u, double y) { return y * y * osc::sin_recip(u) / (u * u); };
    fam.dg_dy = [](double u, double y) { return 2.0 * y * osc::sin_recip(u) / (u * u); };
    fam.oscillation_hint = [](double u) { return 1.0 / (u * u); };
    emit(check_diff_under_integral(fam, 1.0, smooth, 1.0, 1e-3, 1e-5,
                                   osc_finite_sched(1.0, 2.5e-7, 4e-6)),
         "diff under integral: y^2 sin(1/u)/u^2 at y0=1");
  }

  // --- interchange of iterated integration ------------------------------------
  {
    InterchangeSpec spec;
    spec.g = [](double u, double y) { return osc::sin_ratio(y, u) / (u * u); };
    spec.s = [](double) { return 1.0; };
    spec.y_lo = 1.0;
    spec.y_hi = 2.0;
    spec.beta = 1.0;
    spec.w = smooth;
    spec.sg_integral = [](double u) {
      return (osc::cos_recip(u) - osc::cos_ratio(2.0, u)) / u;
    };
    spec.oscillation_hint = [](double u) { return 2.0 / (u * u); };
    emit(check_interchange(spec, 1e-4, osc_finite_sched(1.0, 1.0e-6, 1e-4)),
         "interchange: sin(y/u)/u^2 over y in [1,2]");
  }
  {
    InterchangeSpec spec;
    spec.g = [](double u, double y) { return y / std::sqrt(u); };
    spec.s = [](double) { return 1.0; };
    spec.y_lo = 0.0;
    spec.y_hi = 1.0;
    spec.beta = 1.0;
    spec.w = smooth;
    spec.sg_integral = [](double u) { return 0.5 / std::sqrt(u); };
    emit(check_interchange(spec, 1e-8, smooth_finite_sched()),
         "interchange: y u^(-1/2) over y in [0,1]");
  }
  {
    InterchangeSpec spec;
    spec.g = [](double u, double y) { return std::exp(y) * osc::cos_recip(u) / (u * u * u); };
    spec.s = [](double) { return 1.0; };
    spec.y_lo = 0.0;
    spec.y_hi = 1.0;
    spec.beta = 1.0;
    spec.w = smooth;
    spec.sg_integral = [](double u) {
      return (std::exp(1.0) - 1.0) * osc::cos_recip(u) / (u * u * u);
    };
    spec.oscillation_hint = [](double u) { return 1.0 / (u * u); };
    PropertyOutcome o = check_interchange(spec, 0.0, osc_finite_sched(1.0, 5.0e-7, 4e-5));
    if (!o.skipped) {
      // The sides are compared relatively: |lhs - rhs| <= 1e-4 max(|lhs|,|rhs|).
      o.tolerance = 1e-4 * std::max(std::abs(o.lhs), std::abs(o.rhs));
      o.passed = std::abs(o.lhs - o.rhs) <= o.tolerance;
    }
    emit(std::move(o), "interchange: e^y cos(1/u)/u^3 over y in [0,1]");
  }

  // --- w <-> z round trips -----------------------------------------------------
  emit(check_round_trip(ramp, 1.0, 1e-9), "round trip: ramp, alpha=1");
  emit(check_round_trip(smooth, 0.5, 1e-9), "round trip: smoothstep, alpha=0.5");
  emit(check_round_trip(combine_init(ramp, ramp), 2.0, 1e-6),
       "round trip: ramp (.) ramp (tabulated), alpha=2");

  return out;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string json_num(double v) {
  if (std::isnan(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string outcomes_to_json(const std::vector<PropertyOutcome>& outcomes) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const PropertyOutcome& o = outcomes[i];
    if (i) os << ",";
    os << "{\"check\":\"" << json_escape(o.name) << "\",\"lhs\":" << json_num(o.lhs)
       << ",\"rhs\":" << json_num(o.rhs) << ",\"tol\":" << json_num(o.tolerance)
       << ",\"passed\":" << (o.passed ? "true" : "false")
       << ",\"skipped\":" << (o.skipped ? "true" : "false") << ",\"trace_refs\":\""
       << json_escape(o.details) << "\"}";
  }
  os << "]";
  return os.str();
}

}  // namespace zint::props
