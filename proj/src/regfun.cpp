#include <zint/quad.hpp>
#include <zint/regfun.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace zint {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Integrand wrap(std::function<double(double)> f, std::vector<double> bps) {
  Integrand g;
  g.eval = std::move(f);
  g.breakpoints = std::move(bps);
  return g;
}

}  // namespace

InitializationFn InitializationFn::closed(double epsilon, std::function<double(double)> w,
                                          std::function<double(double)> w_prime,
                                          std::vector<double> breakpoints) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error("initialization function requires 0 < epsilon < 1");
  auto impl = std::make_shared<Impl>();
  impl->epsilon = epsilon;
  impl->repr = FnRepr::closed_form;
  impl->w = std::move(w);
  impl->w_prime = std::move(w_prime);
  breakpoints.push_back(epsilon);
  breakpoints.push_back(1.0);
  impl->breakpoints = sorted_unique(std::move(breakpoints));
  InitializationFn out;
  out.impl_ = std::move(impl);
  return out;
}

InitializationFn InitializationFn::tabulated(double epsilon, std::vector<double> nodes,
                                             std::vector<double> w_prime_values) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error("initialization function requires 0 < epsilon < 1");
  auto impl = std::make_shared<Impl>();
  impl->epsilon = epsilon;
  impl->repr = FnRepr::tabulated_grid;
  impl->table = detail::Pchip(std::move(nodes), std::move(w_prime_values));
  // Every grid node is a (mild) kink of the interpolant; declaring them lets
  // quadrature integrate each cubic segment exactly.
  impl->breakpoints = impl->table.xs();
  InitializationFn out;
  out.impl_ = std::move(impl);
  return out;
}

double InitializationFn::w(double v) const {
  const Impl& im = *impl_;
  if (im.repr == FnRepr::closed_form) return im.w(v);
  if (v <= im.epsilon) return 0.0;
  if (v >= 1.0) return 1.0;
  return im.table.integral_from_lo(v);
}

double InitializationFn::w_prime(double v) const {
  const Impl& im = *impl_;
  if (im.repr == FnRepr::closed_form) return im.w_prime(v);
  if (v < im.epsilon || v > 1.0) return 0.0;
  return im.table.value(v);
}

const std::vector<double>& InitializationFn::nodes() const {
  return impl_->repr == FnRepr::tabulated_grid ? impl_->table.xs() : impl_->empty;
}

const std::vector<double>& InitializationFn::values() const {
  return impl_->repr == FnRepr::tabulated_grid ? impl_->table.ys() : impl_->empty;
}

TerminationFn TerminationFn::closed(double c, std::function<double(double)> z,
                                    std::function<double(double)> z_prime,
                                    std::vector<double> breakpoints) {
  if (!(c > 0.0)) throw Error("termination function requires c > 0");
  auto impl = std::make_shared<Impl>();
  impl->c = c;
  impl->z = std::move(z);
  impl->z_prime = std::move(z_prime);
  breakpoints.push_back(0.0);
  breakpoints.push_back(c);
  impl->breakpoints = sorted_unique(std::move(breakpoints));
  TerminationFn out;
  out.impl_ = std::move(impl);
  return out;
}

InitializationFn make_linear_ramp() {
  return InitializationFn::closed(
      0.5,
      [](double v) {
        if (v <= 0.5) return 0.0;
        if (v >= 1.0) return 1.0;
        return 2.0 * v - 1.0;
      },
      [](double v) {
        if (v < 0.5 || v > 1.0) return 0.0;
        return 2.0;
      },
      {});
}

InitializationFn make_smoothstep() {
  return InitializationFn::closed(
      0.5,
      [](double v) {
        if (v <= 0.5) return 0.0;
        if (v >= 1.0) return 1.0;
        const double s = 2.0 * v - 1.0;
        return s * s * (3.0 - 2.0 * s);
      },
      [](double v) {
        if (v < 0.5 || v > 1.0) return 0.0;
        return 12.0 * (2.0 * v - 1.0) * (2.0 - 2.0 * v);
      },
      {});
}

namespace {

ValidationCheck check_max_abs(const std::string& name, double measured, double tol) {
  return {name, measured, tol, measured <= tol};
}

double grid_max(const std::function<double(double)>& f, double lo, double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / n;
    worst = std::max(worst, std::abs(f(x)));
  }
  return worst;
}

bool all_finite(const std::function<double(double)>& f, double lo, double hi, int n) {
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    if (!std::isfinite(f(x))) return false;
  }
  return true;
}

}  // namespace

ValidationReport validate_initialization(const InitializationFn& w, double tol) {
  if (!(tol > 0.0)) throw Error("validate_initialization: tol must be positive");
  ValidationReport rep;
  const double eps = w.epsilon();
  const double qtol = std::max(tol * 1e-2, 1e-14);

  rep.checks.push_back(check_max_abs(
      "w zero below epsilon", grid_max([&](double v) { return w.w(v); }, 0.0, eps, 64), tol));
  rep.checks.push_back(check_max_abs(
      "w one above 1", grid_max([&](double v) { return w.w(v) - 1.0; }, 1.0, 2.0, 64), tol));
  const double support_lo = grid_max([&](double v) { return w.w_prime(v); }, 0.0, eps, 64);
  const double support_hi = grid_max([&](double v) { return w.w_prime(v); }, 1.0, 2.0, 64);
  rep.checks.push_back(
      check_max_abs("w' zero outside [epsilon, 1]", std::max(support_lo, support_hi), tol));

  const Integrand wp = wrap([&](double v) { return w.w_prime(v); }, w.breakpoints());
  const double mass = integrate_proper(wp, eps, 1.0, qtol, 4'000'000).value;
  rep.checks.push_back(check_max_abs("normalization: integral of w' is 1",
                                     std::abs(mass - 1.0), tol));

  double recon = 0.0;
  for (int i = 0; i < 17; ++i) {
    const double v = eps + (1.2 - eps) * (i + 0.5) / 17;
    const double integral = integrate_proper(wp, eps, std::min(v, 1.0), qtol, 4'000'000).value;
    recon = std::max(recon, std::abs(w.w(v) - integral));
  }
  rep.checks.push_back(check_max_abs("w equals integral of w'", recon, tol));

  const bool finite = all_finite([&](double v) { return w.w(v); }, 0.0, 1.5, 257) &&
                      all_finite([&](double v) { return w.w_prime(v); }, 0.0, 1.5, 257);
  rep.checks.push_back({"finite everywhere", finite ? 0.0 : 1.0, 0.5, finite});

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const ValidationCheck& c) { return c.passed; });
  return rep;
}

ValidationReport validate_termination(const TerminationFn& z, double tol) {
  if (!(tol > 0.0)) throw Error("validate_termination: tol must be positive");
  ValidationReport rep;
  const double c = z.c();
  const double qtol = std::max(tol * 1e-2, 1e-14);

  rep.checks.push_back(check_max_abs("z(0) is 1", std::abs(z.z(0.0) - 1.0), tol));
  rep.checks.push_back(check_max_abs("z one for x <= 0",
                                     grid_max([&](double x) { return z.z(x) - 1.0; }, -c, 0.0, 64),
                                     tol));
  rep.checks.push_back(check_max_abs(
      "z zero beyond c", grid_max([&](double x) { return z.z(x); }, c, 2.0 * c, 64), tol));
  const double sup_lo = grid_max([&](double x) { return z.z_prime(x); }, -c, 0.0, 64);
  const double sup_hi = grid_max([&](double x) { return z.z_prime(x); }, c, 2.0 * c, 64);
  rep.checks.push_back(check_max_abs("z' zero outside (0, c)", std::max(sup_lo, sup_hi), tol));

  const Integrand zp = wrap([&](double x) { return z.z_prime(x); }, z.breakpoints());
  const double mass = integrate_proper(zp, 0.0, c, qtol, 4'000'000).value;
  rep.checks.push_back(
      check_max_abs("normalization: integral of z' is -1", std::abs(mass + 1.0), tol));

  const bool finite = all_finite([&](double x) { return z.z(x); }, -c, 2.0 * c, 257) &&
                      all_finite([&](double x) { return z.z_prime(x); }, -c, 2.0 * c, 257);
  rep.checks.push_back({"finite everywhere", finite ? 0.0 : 1.0, 0.5, finite});

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const ValidationCheck& c2) { return c2.passed; });
  return rep;
}

InitializationFn combine_init(const InitializationFn& w1, const InitializationFn& w2,
                              std::size_t n_nodes, double node_tol) {
  if (n_nodes < 9) throw Error("combine_init: need at least 9 nodes");
  const double e1 = w1.epsilon();
  const double e2 = w2.epsilon();
  const double eps = e1 * e2;

  std::vector<double> nodes(n_nodes);
  std::vector<double> vals(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i)
    nodes[i] = eps + (1.0 - eps) * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
  nodes.back() = 1.0;

  auto conv_at = [&](double v) {
    const double lo = std::max(e2, v);
    const double hi = std::min(1.0, v / e1);
    if (!(lo < hi)) return 0.0;
    std::vector<double> bps;
    for (double b : w2.breakpoints())
      if (b > lo && b < hi) bps.push_back(b);
    for (double b : w1.breakpoints()) {
      const double vp = v / b;
      if (vp > lo && vp < hi) bps.push_back(vp);
    }
    const Integrand inner = wrap(
        [&](double vp) { return w1.w_prime(v / vp) * w2.w_prime(vp) / vp; }, std::move(bps));
    return integrate_proper(inner, lo, hi, node_tol, 1'000'000).value;
  };
  for (std::size_t i = 0; i < n_nodes; ++i) vals[i] = conv_at(nodes[i]);

  // The normalization defect is measured on the combination itself, by nested
  // quadrature; interpolation error in the stored grid is handled separately
  // by rescaling the representation to unit mass.
  std::vector<double> kink_products;
  for (double b1 : w1.breakpoints())
    for (double b2 : w2.breakpoints()) {
      const double p = b1 * b2;
      if (p > eps && p < 1.0) kink_products.push_back(p);
    }
  const Integrand conv = wrap(conv_at, std::move(kink_products));
  const double mass = integrate_proper(conv, eps, 1.0, 1e-10, 4'000'000).value;
  const double defect = std::abs(mass - 1.0);
  if (defect > 1e-8) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "combine_init: normalization defect %.3e exceeds 1e-8",
                  defect);
    throw QuadratureError(msg, 0);
  }

  detail::Pchip probe(nodes, vals);
  const double scale = 1.0 / probe.total_integral();
  for (auto& v : vals) v *= scale;
  return InitializationFn::tabulated(eps, std::move(nodes), std::move(vals));
}

TerminationFn z_from_w(const InitializationFn& w, double alpha) {
  if (!(alpha > 0.0)) throw Error("z_from_w: alpha must be positive");
  const double c = -std::log(w.epsilon()) / alpha;
  std::vector<double> bps;
  for (double v : w.breakpoints())
    if (v > 0.0 && v <= 1.0) bps.push_back(-std::log(v) / alpha);
  InitializationFn wc = w;
  auto z = [wc, alpha](double x) {
    if (x <= 0.0) return 1.0;
    return wc.w(std::exp(-alpha * x));
  };
  auto zp = [wc, alpha, c](double x) {
    if (x < 0.0 || x > c) return 0.0;
    const double u = std::exp(-alpha * x);
    return -alpha * wc.w_prime(u) * u;
  };
  return TerminationFn::closed(c, std::move(z), std::move(zp), std::move(bps));
}

InitializationFn w_from_z(const TerminationFn& z, double alpha) {
  if (!(alpha > 0.0)) throw Error("w_from_z: alpha must be positive");
  const double eps = std::exp(-alpha * z.c());
  std::vector<double> bps;
  for (double x : z.breakpoints())
    if (x >= 0.0) bps.push_back(std::exp(-alpha * x));
  TerminationFn zc = z;
  auto w = [zc, alpha](double v) { return zc.z(-std::log(v) / alpha); };
  auto wp = [zc, alpha, eps](double u) {
    if (u == 0.0) throw DomainError("w_from_z: w' is defined for u > 0 only");
    if (u < eps || u > 1.0) return 0.0;
    return -zc.z_prime(-std::log(u) / alpha) / (alpha * u);
  };
  return InitializationFn::closed(eps, std::move(w), std::move(wp), std::move(bps));
}

std::string to_json(const InitializationFn& w) {
  if (w.repr() != FnRepr::tabulated_grid)
    throw Error("to_json: only tabulated initialization functions serialize");
  nlohmann::json j;
  j["epsilon"] = w.epsilon();
  j["nodes"] = w.nodes();
  j["values"] = w.values();
  return j.dump();
}

InitializationFn initialization_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return InitializationFn::tabulated(j.at("epsilon").get<double>(),
                                     j.at("nodes").get<std::vector<double>>(),
                                     j.at("values").get<std::vector<double>>());
}

}  // namespace zint
