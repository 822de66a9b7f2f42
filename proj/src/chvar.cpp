#include <zint/chvar.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace zint {

double ChangeOfVariable::inverse(double u) const {
  if (psi_inverse) return psi_inverse(u);
  if (!(u > 0.0)) throw DomainError("psi_inverse: u must be positive");

  // psi is strictly decreasing toward 0; bracket and bisect.
  double lo = std::max(domain_floor, -1.0);
  if (std::isfinite(domain_floor)) lo = domain_floor + 1e-8 * std::max(1.0, std::abs(domain_floor));
  double hi = std::max(lo + 1.0, 1.0);
  int guard = 0;
  while (psi(hi) > u) {
    hi = lo + 2.0 * (hi - lo);
    if (++guard > 200) throw DomainError("psi_inverse: failed to bracket from above");
  }
  guard = 0;
  while (psi(lo) < u) {
    const double span = hi - lo;
    lo = std::isfinite(domain_floor) ? domain_floor + 0.5 * (lo - domain_floor) : lo - 2.0 * span;
    if (++guard > 2000) throw DomainError("psi_inverse: failed to bracket from below");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) >= u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

double ChangeOfVariable::ratio(double x, double b) const {
  if (psi_ratio) return psi_ratio(x, b);
  return psi(x + b) / psi(b);
}

ChangeOfVariable make_exp_map(double alpha) {
  if (!(alpha > 0.0)) throw Error("make_exp_map: alpha must be positive");
  ChangeOfVariable cov;
  cov.id = "exp:" + std::to_string(alpha);
  cov.domain_floor = -std::numeric_limits<double>::infinity();
  cov.psi = [alpha](double x) { return std::exp(-alpha * x); };
  cov.psi_prime = [alpha](double x) { return -alpha * std::exp(-alpha * x); };
  cov.psi_inverse = [alpha](double u) {
    if (!(u > 0.0)) throw DomainError("exp map: psi_inverse requires u > 0");
    return -std::log(u) / alpha;
  };
  cov.psi_ratio = [alpha](double x, double) { return std::exp(-alpha * x); };
  return cov;
}

ChangeOfVariable make_power_map(double r) {
  if (!(r > 0.0)) throw Error("make_power_map: r must be positive");
  ChangeOfVariable cov;
  cov.id = "power:" + std::to_string(r);
  cov.domain_floor = 0.0;
  cov.psi = [r](double x) {
    if (!(x > 0.0)) throw DomainError("power map: psi requires x > 0");
    return std::pow(x, -r);
  };
  cov.psi_prime = [r](double x) {
    if (!(x > 0.0)) throw DomainError("power map: psi_prime requires x > 0");
    return -r * std::pow(x, -r - 1.0);
  };
  cov.psi_inverse = [r](double u) {
    if (!(u > 0.0)) throw DomainError("power map: psi_inverse requires u > 0");
    return std::pow(u, -1.0 / r);
  };
  cov.psi_ratio = [r](double x, double b) { return std::pow(b / (x + b), r); };
  return cov;
}

ChangeOfVariable make_custom_map(std::string id, std::function<double(double)> psi,
                                 std::function<double(double)> psi_prime,
                                 std::function<double(double)> psi_inverse, double domain_floor) {
  ChangeOfVariable cov;
  cov.id = std::move(id);
  cov.domain_floor = domain_floor;
  cov.psi = std::move(psi);
  cov.psi_prime = std::move(psi_prime);
  cov.psi_inverse = std::move(psi_inverse);
  return cov;
}

double SecondTypeTermination::direct_prime(const Impl& im, double x, double b) {
  if (x < 0.0) return 0.0;
  const double v = im.cov.ratio(x, b);
  if (v < im.epsilon || v > 1.0) return 0.0;
  return im.w.w_prime(v) * im.cov.psi_prime(x + b) / im.cov.psi(b);
}

const detail::Pchip& SecondTypeTermination::slice(const Impl& im, double b) {
  {
    std::shared_lock lk(im.mu);
    auto it = im.slices.find(b);
    if (it != im.slices.end()) return it->second;
  }

  // Support of the combined derivative: x in [0, e(eps1*eps2, b)].
  const double e_comb = im.cov.inverse(im.epsilon * im.cov.psi(b)) - b;
  constexpr std::size_t kNodes = 1025;
  std::vector<double> xs(kNodes), ys(kNodes);
  SecondTypeTermination t1, t2;
  t1.impl_ = im.lhs;
  t2.impl_ = im.rhs;
  const double e2 = t2.e_of(b);
  const std::vector<double> rhs_kinks = t2.breakpoints(b);
  for (std::size_t i = 0; i < kNodes; ++i)
    xs[i] = e_comb * static_cast<double>(i) / static_cast<double>(kNodes - 1);
  for (std::size_t i = 0; i < kNodes; ++i) {
    const double x = xs[i];
    if (x <= 0.0) {
      ys[i] = 0.0;
      continue;
    }
    const double hi = std::min(x, e2);
    std::vector<double> bps;
    for (double bp : rhs_kinks)
      if (bp > 0.0 && bp < hi) bps.push_back(bp);
    // kinks of the shifted first factor: ratio1(x - x', x' + b) crosses a w1 kink
    if (!im.lhs->combined) {
      for (double vbp : im.lhs->w.breakpoints()) {
        if (!(vbp > 0.0 && vbp < 1.0)) continue;
        const double xp = im.cov.inverse(im.cov.psi(x + b) / vbp) - b;
        if (xp > 0.0 && xp < hi) bps.push_back(xp);
      }
    }
    Integrand inner;
    inner.eval = [&](double xp) { return t1.zeta_prime(x - xp, xp + b) * t2.zeta_prime(xp, b); };
    inner.breakpoints = std::move(bps);
    ys[i] = -integrate_proper(inner, 0.0, hi, 1e-10, 4'000'000).value;
  }

  detail::Pchip built(std::move(xs), std::move(ys));
  std::unique_lock lk(im.mu);
  auto [it, inserted] = im.slices.emplace(b, std::move(built));
  (void)inserted;
  return it->second;
}

double SecondTypeTermination::zeta_prime(double x, double b) const {
  const Impl& im = *impl_;
  if (b <= im.cov.domain_floor) throw DomainError("zeta_prime: b must exceed the map's domain floor");
  if (!im.combined) return direct_prime(im, x, b);
  if (x < 0.0) return 0.0;
  const double e = e_of(b);
  if (x > e) return 0.0;
  return slice(im, b).value(x);
}

double SecondTypeTermination::e_of(double b) const {
  const Impl& im = *impl_;
  if (b <= im.cov.domain_floor) throw DomainError("e_of: b must exceed the map's domain floor");
  return im.cov.inverse(im.epsilon * im.cov.psi(b)) - b;
}

std::vector<double> SecondTypeTermination::breakpoints(double b) const {
  const Impl& im = *impl_;
  std::vector<double> out{0.0, e_of(b)};
  if (!im.combined) {
    for (double v : im.w.breakpoints())
      if (v > 0.0 && v < 1.0) out.push_back(im.cov.inverse(v * im.cov.psi(b)) - b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SecondTypeTermination zeta_from_w(const InitializationFn& w, const ChangeOfVariable& cov) {
  auto impl = std::make_shared<SecondTypeTermination::Impl>();
  impl->cov = cov;
  impl->epsilon = w.epsilon();
  impl->w = w;
  impl->combined = false;
  SecondTypeTermination out;
  out.impl_ = std::move(impl);
  return out;
}

SecondTypeTermination combine_zeta(const SecondTypeTermination& z1,
                                   const SecondTypeTermination& z2) {
  if (!z1.valid_handle() || !z2.valid_handle())
    throw Error("combine_zeta: invalid termination function");
  if (z1.cov().id != z2.cov().id)
    throw MismatchedMapError("combine_zeta: sources use different changes of variable (" +
                             z1.cov().id + " vs " + z2.cov().id + ")");
  auto impl = std::make_shared<SecondTypeTermination::Impl>();
  impl->cov = z1.cov();
  impl->epsilon = z1.epsilon() * z2.epsilon();
  impl->combined = true;
  impl->lhs = z1.impl_;
  impl->rhs = z2.impl_;
  SecondTypeTermination out;
  out.impl_ = std::move(impl);
  return out;
}

Integrand transform_integrand(const Integrand& g, const ChangeOfVariable& cov) {
  if (!g.eval) throw Error("transform_integrand: integrand has no eval function");
  Integrand f;
  auto geval = g.eval;
  auto psi = cov.psi;
  auto psip = cov.psi_prime;
  f.eval = [geval, psi, psip](double t) { return -geval(psi(t)) * psip(t); };
  const double beta = g.domain.hi;
  f.domain = {cov.inverse(beta), std::numeric_limits<double>::infinity(), false, true};
  for (double bp : g.breakpoints)
    if (bp > 0.0 && bp <= beta) f.breakpoints.push_back(cov.inverse(bp));
  std::sort(f.breakpoints.begin(), f.breakpoints.end());
  if (g.oscillation_hint) {
    auto hint = g.oscillation_hint;
    f.oscillation_hint = [hint, psi, psip](double t) { return hint(psi(t)) * std::abs(psip(t)); };
  }
  return f;
}

Integrand transform_integrand_to_finite(const Integrand& f, double a,
                                        const ChangeOfVariable& cov) {
  if (!f.eval) throw Error("transform_integrand_to_finite: integrand has no eval function");
  Integrand g;
  auto feval = f.eval;
  ChangeOfVariable c = cov;
  g.eval = [feval, c](double u) {
    const double x = c.inverse(u);
    return -feval(x) / c.psi_prime(x);
  };
  g.domain = {0.0, cov.psi(a), true, false};
  for (double bp : f.breakpoints)
    if (bp >= a) g.breakpoints.push_back(cov.psi(bp));
  std::sort(g.breakpoints.begin(), g.breakpoints.end());
  if (f.oscillation_hint) {
    auto hint = f.oscillation_hint;
    g.oscillation_hint = [hint, c](double u) {
      const double x = c.inverse(u);
      return hint(x) / std::abs(c.psi_prime(x));
    };
  }
  return g;
}

}  // namespace zint
