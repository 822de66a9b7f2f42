#include <zint/zlimit.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <thread>

namespace zint {

LimitSchedule default_finite_schedule() { return {}; }

LimitSchedule default_infinite_schedule() {
  LimitSchedule s;
  s.progression = Progression::arithmetic;
  s.ratio = 2.0;
  return s;
}

namespace {

double none_value(const std::vector<std::pair<double, double>>& seq, ExtrapolationResult& out) {
  const std::size_t n = seq.size();
  out.value = seq.back().second;
  out.error_estimate = n >= 2 ? std::abs(seq[n - 1].second - seq[n - 2].second) : 0.0;
  return out.value;
}

ExtrapolationResult richardson(const std::vector<std::pair<double, double>>& seq) {
  ExtrapolationResult out;
  const std::size_t n = seq.size();
  if (n < 3) {
    none_value(seq, out);
    return out;
  }
  const double x0 = seq[n - 3].second;
  const double x1 = seq[n - 2].second;
  const double x2 = seq[n - 1].second;
  const double d0 = x1 - x0;
  const double d1 = x2 - x1;
  const double scale = std::max({std::abs(x0), std::abs(x1), std::abs(x2), 1e-300});
  // Degenerate fit: successive differences at machine noise.
  if (std::abs(d1) <= 8.0 * std::numeric_limits<double>::epsilon() * scale) {
    out.value = x2;
    out.error_estimate = std::abs(d1);
    return out;
  }
  if (std::abs(d0) <= 8.0 * std::numeric_limits<double>::epsilon() * scale) {
    out.value = x2;
    out.error_estimate = std::abs(d1);
    return out;
  }
  const double r = d1 / d0;
  if (!(std::abs(r) < 1.0)) {  // not contracting; no model to fit
    out.value = x2;
    out.error_estimate = std::abs(d1);
    return out;
  }
  const double correction = d1 * r / (1.0 - r);
  out.value = x2 + correction;
  out.error_estimate = std::abs(correction);
  const double h1 = seq[n - 2].first;
  const double h2 = seq[n - 1].first;
  if (h1 > 0.0 && h2 > 0.0 && h1 != h2) {
    const double rho = h2 / h1;
    if (rho > 0.0 && rho != 1.0) out.fitted_order = std::log(std::abs(r)) / std::log(rho);
  }
  return out;
}

ExtrapolationResult wynn_epsilon(const std::vector<std::pair<double, double>>& seq) {
  ExtrapolationResult out;
  const std::size_t n = seq.size();
  if (n < 3) {
    none_value(seq, out);
    return out;
  }
  // eps[i][j], defined for i + j <= n - 1; column 0 is the raw sequence.
  std::vector<std::vector<double>> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i].assign(n - i, 0.0);
    e[i][0] = seq[i].second;
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i + j < n; ++i) {
      const double prev = (j >= 2) ? e[i + 1][j - 2] : 0.0;
      const double diff = e[i + 1][j - 1] - e[i][j - 1];
      if (std::abs(diff) <= std::numeric_limits<double>::min())
        e[i][j] = prev + 1.0 / std::numeric_limits<double>::max();
      else
        e[i][j] = prev + 1.0 / diff;
    }
  }
  // Even columns along the newest counter-diagonal; pick the most settled one.
  out.value = seq.back().second;
  out.error_estimate = std::abs(seq[n - 1].second - seq[n - 2].second);
  double best = out.error_estimate;
  double prev_col = seq[n - 1].second;
  for (std::size_t j = 2; j < n; j += 2) {
    const double v = e[n - 1 - j][j];
    if (!std::isfinite(v)) break;
    const double delta = std::abs(v - prev_col);
    if (delta <= best) {
      best = delta;
      out.value = v;
      out.error_estimate = delta;
    }
    prev_col = v;
  }
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  LineFit f;
  if (denom == 0.0) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// Divergence test: monotone |raw| growth plus a credible unbounded model over
// the last min(8, n) levels.
bool fits_unbounded_growth(const std::vector<TracePoint>& trace, bool shrinking) {
  const std::size_t n = trace.size();
  const std::size_t m = std::min<std::size_t>(8, n);
  std::vector<double> lh(m), raw(m), labs(m);
  bool same_sign = true;
  for (std::size_t i = 0; i < m; ++i) {
    const TracePoint& tp = trace[n - m + i];
    lh[i] = std::log(tp.param);
    raw[i] = tp.raw;
    labs[i] = std::log(std::max(std::abs(tp.raw), 1e-300));
    if (tp.raw * trace[n - 1].raw <= 0.0) same_sign = false;
  }
  double rmin = raw[0], rmax = raw[0];
  for (double v : raw) {
    rmin = std::min(rmin, v);
    rmax = std::max(rmax, v);
  }
  const double range = rmax - rmin;
  if (!(range > 0.0)) return false;

  // Model A: raw = c0 + c1 ln h.
  const LineFit a = fit_line(lh, raw);
  if (a.rms < 0.10 * range && std::abs(a.slope) * 1.0 > 1e-3 * range) return true;

  // Model B: |raw| = C h^s with s in the unbounded direction.
  if (same_sign) {
    const LineFit b = fit_line(lh, labs);
    const bool unbounded_dir = shrinking ? (b.slope < -0.1) : (b.slope > 0.1);
    if (unbounded_dir) {
      double ss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double pred = std::copysign(std::exp(b.intercept + b.slope * lh[i]), raw[i]);
        const double r = raw[i] - pred;
        ss += r * r;
      }
      if (std::sqrt(ss / m) < 0.10 * range) return true;
    }
  }
  return false;
}

bool monotone_abs_growth(const std::vector<TracePoint>& trace) {
  const std::size_t n = trace.size();
  if (n < 5) return false;
  for (std::size_t i = n - 5; i + 1 < n; ++i)
    if (!(std::abs(trace[i + 1].raw) > std::abs(trace[i].raw))) return false;
  return true;
}

}  // namespace

ExtrapolationResult extrapolate(const std::vector<std::pair<double, double>>& seq,
                                Extrapolation method) {
  if (seq.empty()) throw Error("extrapolate: empty sequence");
  ExtrapolationResult out;
  switch (method) {
    case Extrapolation::none:
      none_value(seq, out);
      return out;
    case Extrapolation::richardson:
      return richardson(seq);
    case Extrapolation::epsilon_algorithm:
      return wynn_epsilon(seq);
  }
  none_value(seq, out);
  return out;
}

Status classify(const std::vector<TracePoint>& trace, const LimitSchedule& sched) {
  if (trace.empty()) throw Error("classify: empty trace");
  const std::size_t n = trace.size();
  const std::size_t need = static_cast<std::size_t>(std::max(3, sched.min_levels));
  if (n < need) return Status::inconclusive;

  const double raw_d1 = std::abs(trace[n - 1].raw - trace[n - 2].raw);
  const double raw_d2 = std::abs(trace[n - 2].raw - trace[n - 3].raw);
  if (raw_d1 <= sched.tol && raw_d2 <= sched.tol) return Status::converged;

  if (sched.extrapolation != Extrapolation::none && n >= 3) {
    const double e1 = trace[n - 1].abs_diff;
    const double e2 = trace[n - 2].abs_diff;
    if (e1 <= sched.tol_extrapolated && e2 <= sched.tol_extrapolated) return Status::converged;
  }

  const bool shrinking = n >= 2 && trace[1].param < trace[0].param;
  if (monotone_abs_growth(trace) && fits_unbounded_growth(trace, shrinking))
    return Status::diverged;

  return Status::inconclusive;
}

namespace {

std::vector<double> schedule_params(const LimitSchedule& sched, double start, int count) {
  std::vector<double> params(count);
  double param = start;
  for (int k = 0; k < count; ++k) {
    if (k > 0)
      param = (sched.progression == Progression::geometric) ? param * sched.ratio
                                                            : param + sched.step;
    params[k] = param;
  }
  return params;
}

ZResult run_schedule(const LimitSchedule& sched, double start,
                     const std::function<double(int, double)>& raw_at) {
  if (sched.max_levels < 3) throw Error("schedule: max_levels must be at least 3");
  if (!(sched.tol > 0.0)) throw Error("schedule: tol must be positive");
  if (sched.progression == Progression::geometric && !(sched.ratio > 0.0) )
    throw Error("schedule: geometric ratio must be positive");
  if (sched.progression == Progression::arithmetic && !(sched.step > 0.0))
    throw Error("schedule: arithmetic step must be positive");

  const std::vector<double> params =
      schedule_params(sched, start, sched.max_levels);

  // No stop decision can fire before min_levels, so that prefix is evaluated
  // concurrently (levels are independent); the gather is ordered, keeping the
  // trace identical to a sequential run.
  const int prefix = std::min(sched.max_levels, std::max(3, sched.min_levels));
  std::vector<double> prefix_raw(prefix);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (prefix >= 8 && hw > 1) {
    std::vector<std::future<double>> futs;
    futs.reserve(prefix);
    for (int k = 0; k < prefix; ++k)
      futs.push_back(std::async(std::launch::async, [&raw_at, &params, k] {
        return raw_at(k, params[k]);
      }));
    for (int k = 0; k < prefix; ++k) prefix_raw[k] = futs[k].get();
  } else {
    for (int k = 0; k < prefix; ++k) prefix_raw[k] = raw_at(k, params[k]);
  }

  ZResult res;
  std::vector<std::pair<double, double>> seq;
  for (int k = 0; k < sched.max_levels; ++k) {
    const double param = params[k];
    const double raw = k < prefix ? prefix_raw[k] : raw_at(k, param);
    seq.emplace_back(param, raw);
    const ExtrapolationResult ext = extrapolate(seq, sched.extrapolation);
    TracePoint tp;
    tp.level = k;
    tp.param = param;
    tp.raw = raw;
    tp.extrapolated = ext.value;
    tp.abs_diff = res.trace.empty() ? 0.0 : std::abs(ext.value - res.trace.back().extrapolated);
    res.trace.push_back(tp);

    const Status st = classify(res.trace, sched);
    if (st == Status::converged) {
      res.status = st;
      const std::size_t n = res.trace.size();
      const double raw_d1 = std::abs(res.trace[n - 1].raw - res.trace[n - 2].raw);
      const double raw_d2 = std::abs(res.trace[n - 2].raw - res.trace[n - 3].raw);
      if (raw_d1 <= sched.tol && raw_d2 <= sched.tol) {
        res.value = res.trace.back().raw;
        res.error_estimate = raw_d1;
      } else {
        res.value = res.trace.back().extrapolated;
        res.error_estimate = res.trace.back().abs_diff;
      }
      return res;
    }
    if (st == Status::diverged) {
      res.status = st;
      res.value = res.trace.back().extrapolated;
      res.error_estimate = res.trace.back().abs_diff;
      return res;
    }
  }
  res.status = Status::inconclusive;
  res.value = res.trace.back().extrapolated;
  res.error_estimate = res.trace.back().abs_diff;
  return res;
}

// Shift/reflect so the critical endpoint sits at 0 and the integral runs over
// (0, L].
struct NormalizedProblem {
  Integrand g;
  std::optional<Antiderivative> G;  // same base-point convention as Eq. 19
  double length = 0.0;
};

NormalizedProblem normalize_finite(const EvalRequest& req) {
  const double lo = req.bounds.lo;
  const double hi = req.bounds.hi;
  if (req.bounds.hi_infinite || !(hi > lo))
    throw Error("z_integral_finite: requires finite bounds with hi > lo");
  const bool mirror = req.critical_side == CriticalSide::upper;

  NormalizedProblem np;
  np.length = hi - lo;
  const Integrand& f = req.integrand;
  auto feval = f.eval;
  if (mirror)
    np.g.eval = [feval, hi](double t) { return feval(hi - t); };
  else if (lo == 0.0)
    np.g.eval = feval;
  else
    np.g.eval = [feval, lo](double t) { return feval(lo + t); };
  np.g.domain = {0.0, np.length, true, false};
  for (double bp : f.breakpoints) {
    const double t = mirror ? hi - bp : bp - lo;
    if (t > 0.0 && t < np.length) np.g.breakpoints.push_back(t);
  }
  std::sort(np.g.breakpoints.begin(), np.g.breakpoints.end());
  if (f.oscillation_hint) {
    auto hint = f.oscillation_hint;
    if (mirror)
      np.g.oscillation_hint = [hint, hi](double t) { return hint(hi - t); };
    else if (lo == 0.0)
      np.g.oscillation_hint = hint;
    else
      np.g.oscillation_hint = [hint, lo](double t) { return hint(lo + t); };
  }
  if (req.antiderivative && req.antiderivative->valid()) {
    const Antiderivative& G = *req.antiderivative;
    if (mirror) {
      np.G = Antiderivative::closed_form(0.0, [G, hi](double t) { return -G(hi - t); });
    } else if (lo != 0.0) {
      np.G = Antiderivative::closed_form(0.0, [G, lo](double t) { return G(lo + t); });
    } else {
      np.G = G;
    }
  }
  return np;
}

}  // namespace

ZResult z_integral_finite(const EvalRequest& req, const LimitSchedule& sched) {
  if (!std::holds_alternative<InitializationFn>(req.regularizer))
    throw Error("z_integral_finite: finite bounds require an initialization function");
  const InitializationFn& w = std::get<InitializationFn>(req.regularizer);
  if (!w.valid_handle()) throw Error("z_integral_finite: invalid initialization function");

  NormalizedProblem np = normalize_finite(req);
  const double L = np.length;
  const double eps = w.epsilon();

  LimitSchedule s = sched;
  s.progression = Progression::geometric;
  if (s.start <= 0.0) s.start = 0.5 * L;
  if (!(s.ratio > 0.0 && s.ratio < 1.0))
    throw Error("z_integral_finite: delta schedule needs ratio in (0,1)");
  if (!(s.start < L)) s.start = 0.5 * L;

  if (np.G) {
    // Eq. 19 path: G(beta) - int_eps^1 G(delta v) w'(v) dv.
    const Antiderivative G = *np.G;
    const double g_beta = G(L);
    auto hint = np.g.oscillation_hint;
    const std::vector<double> wbps = w.breakpoints();
    return run_schedule(s, s.start, [&, G, g_beta, hint, wbps](int, double delta) {
      Integrand win;
      win.eval = [&G, &w, delta](double v) { return G(delta * v) * w.w_prime(v); };
      win.breakpoints = wbps;
      if (hint) win.oscillation_hint = [hint, delta](double v) { return delta * hint(delta * v); };
      const double window = integrate_proper(win, eps, 1.0, s.quad_tol, s.eval_budget).value;
      return g_beta - window;
    });
  }

  // Direct two-integral path with a memoized numeric tail: phi = beta, so the
  // tail int_delta^beta g is -G(delta).
  const Antiderivative tailG = cumulative(np.g, L, s.quad_tol, s.eval_budget);
  {
    // Warm the anchor chain down to the deepest forced level; concurrent level
    // evaluation then reads instead of duplicating the fill.
    const int prefix = std::min(s.max_levels, std::max(3, s.min_levels));
    double d = s.start;
    for (int k = 1; k < prefix; ++k) d *= s.ratio;
    (void)tailG(d);
  }
  return run_schedule(s, s.start, [&, tailG](int, double delta) {
    const double tail = -tailG(delta);
    Integrand win;
    win.eval = [&](double u) { return np.g.eval(u) * w.w(u / delta); };
    win.breakpoints = np.g.breakpoints;
    for (double bp : w.breakpoints()) win.breakpoints.push_back(delta * bp);
    win.oscillation_hint = np.g.oscillation_hint;
    const double window = integrate_proper(win, eps * delta, delta, s.quad_tol, s.eval_budget).value;
    return tail + window;
  });
}

ZResult z_integral_infinite(const EvalRequest& req, const LimitSchedule& sched) {
  if (!req.bounds.hi_infinite)
    throw Error("z_integral_infinite: requires an infinite upper bound");
  if (!std::holds_alternative<TerminationFn>(req.regularizer))
    throw Error("z_integral_infinite: requires a first-type termination function");
  const TerminationFn& z = std::get<TerminationFn>(req.regularizer);
  if (!z.valid_handle()) throw Error("z_integral_infinite: invalid termination function");

  const double a = req.bounds.lo;
  const double c = z.c();
  const Integrand& f = req.integrand;
  if (!f.eval) throw Error("z_integral_infinite: integrand has no eval function");

  LimitSchedule s = sched;
  if (s.start <= 0.0) s.start = 2.0 * std::abs(a) + 1.0;
  if (s.progression == Progression::geometric && !(s.ratio > 1.0))
    throw Error("z_integral_infinite: geometric b schedule needs ratio > 1");

  auto window_bps = z.breakpoints();
  auto hint = f.oscillation_hint;

  if (req.antiderivative && req.antiderivative->valid()) {
    const Antiderivative F = *req.antiderivative;
    const double f_a = F(a);
    return run_schedule(s, s.start, [&, F, f_a](int, double b) {
      Integrand win;
      win.eval = [&F, &z, b](double x) { return F(x + b) * z.z_prime(x); };
      win.breakpoints = window_bps;
      if (hint) win.oscillation_hint = [hint, b](double x) { return hint(x + b); };
      const double limit_term = integrate_proper(win, 0.0, c, s.quad_tol, s.eval_budget).value;
      return -f_a - limit_term;
    });
  }

  // Eq. 1 two-integral form: int_a^b f + int_0^c f(x+b) z(x) dx.
  const Antiderivative F = cumulative(f, a, s.quad_tol, s.eval_budget);
  {
    const int prefix = std::min(s.max_levels, std::max(3, s.min_levels));
    const std::vector<double> params = schedule_params(s, s.start, prefix);
    (void)F(params.back());
  }
  return run_schedule(s, s.start, [&, F](int, double b) {
    Integrand win;
    win.eval = [&](double x) { return f.eval(x + b) * z.z(x); };
    win.breakpoints = window_bps;
    if (hint) win.oscillation_hint = [hint, b](double x) { return hint(x + b); };
    const double tail = F(b);
    return tail + integrate_proper(win, 0.0, c, s.quad_tol, s.eval_budget).value;
  });
}

ZResult xi_integral_infinite(const EvalRequest& req, const LimitSchedule& sched) {
  if (!req.bounds.hi_infinite)
    throw Error("xi_integral_infinite: requires an infinite upper bound");
  if (!std::holds_alternative<ZetaPair>(req.regularizer))
    throw Error("xi_integral_infinite: requires an (initialization fn, change of variable) pair");
  const ZetaPair& pair = std::get<ZetaPair>(req.regularizer);
  if (!pair.w.valid_handle()) throw Error("xi_integral_infinite: invalid initialization function");
  const SecondTypeTermination zeta = zeta_from_w(pair.w, pair.cov);

  const double a = req.bounds.lo;
  const Integrand& f = req.integrand;
  if (!f.eval) throw Error("xi_integral_infinite: integrand has no eval function");

  LimitSchedule s = sched;
  if (s.start <= 0.0) {
    s.start = 2.0 * std::abs(a) + 1.0;
    if (std::isfinite(pair.cov.domain_floor))
      s.start = std::max(s.start, pair.cov.domain_floor + 1.0);
  }
  if (s.start <= pair.cov.domain_floor)
    throw Error("xi_integral_infinite: b schedule starts below the map's domain floor");
  if (s.progression == Progression::geometric && !(s.ratio > 1.0))
    throw Error("xi_integral_infinite: geometric b schedule needs ratio > 1");

  Antiderivative F;
  if (req.antiderivative && req.antiderivative->valid()) {
    F = *req.antiderivative;
  } else {
    F = cumulative(f, a, s.quad_tol, s.eval_budget);
    const int prefix = std::min(s.max_levels, std::max(3, s.min_levels));
    const std::vector<double> params = schedule_params(s, s.start, prefix);
    (void)F(params.back());
  }
  const double f_a = F(a);
  auto hint = f.oscillation_hint;

  return run_schedule(s, s.start, [&, F, f_a](int, double b) {
    const double e = zeta.e_of(b);
    Integrand win;
    win.eval = [&F, &zeta, b](double x) { return F(x + b) * zeta.zeta_prime(x, b); };
    win.breakpoints = zeta.breakpoints(b);
    if (hint) win.oscillation_hint = [hint, b](double x) { return hint(x + b); };
    const double limit_term = integrate_proper(win, 0.0, e, s.quad_tol, s.eval_budget).value;
    return -f_a - limit_term;
  });
}

namespace {

std::string fmt_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::string out = "level,param,raw_estimate,extrapolated,abs_diff\n";
  for (const TracePoint& tp : trace) {
    out += std::to_string(tp.level);
    out += ',';
    out += fmt_shortest(tp.param);
    out += ',';
    out += fmt_shortest(tp.raw);
    out += ',';
    out += fmt_shortest(tp.extrapolated);
    out += ',';
    out += fmt_shortest(tp.abs_diff);
    out += '\n';
  }
  return out;
}

}  // namespace zint
