#include <zint/quad.hpp>
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace zint {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (positive half).
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct RuleOut {
  double value = 0.0;
  double err = 0.0;
  double resabs = 0.0;
};

RuleOut gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  double fv1[7];
  double fv2[7];
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    resk += kWgk[j] * (fv1[j] + fv2[j]);
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
  }
  for (int j = 0; j < 3; ++j) resg += kWg[j] * (fv1[2 * j + 1] + fv2[2 * j + 1]);

  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  RuleOut out;
  out.value = resk * h;
  out.resabs = resabs * std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  out.err = err;
  return out;
}

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

constexpr int kMaxDepth = 64;
constexpr double kHalfPi = 1.5707963267948966;

struct AdaptCtx {
  const Integrand* f = nullptr;
  double tol = 0.0;
  double total_len = 0.0;
  std::int64_t budget = 0;
  std::int64_t evals = 0;
  Kahan value;
  double err_sum = 0.0;

  void charge(std::int64_t n, double a, double b) {
    evals += n;
    if (evals > budget) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "quadrature evaluation budget exceeded near [%g, %g]", a,
                    b);
      throw QuadratureError(msg, evals);
    }
  }
};

bool width_below_grain(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return (b - a) <= 32.0 * std::numeric_limits<double>::epsilon() * scale;
}

void integrate_segment(AdaptCtx& ctx, double a, double b, int depth) {
  ctx.charge(1, a, b);

  // Oscillation cap: never let a panel span more than a quarter local period.
  if (ctx.f->oscillation_hint && depth < kMaxDepth && !width_below_grain(a, b)) {
    const double m = 0.5 * (a + b);
    const auto& hint = ctx.f->oscillation_hint;
    const double hmax =
        std::max({std::abs(hint(a)), std::abs(hint(m)), std::abs(hint(b))});
    if (hmax > 0.0 && (b - a) > kHalfPi / hmax) {
      integrate_segment(ctx, a, m, depth + 1);
      integrate_segment(ctx, m, b, depth + 1);
      return;
    }
  }

  ctx.charge(15, a, b);
  const RuleOut r = gk15(ctx.f->eval, a, b);
  const double tol_local = ctx.tol * ((b - a) / ctx.total_len);
  // The G7-vs-K15 estimate bottoms out near 1e-12 relative on resolved panels;
  // refining past that floor burns budget without gaining accuracy.
  const double floor = 1e-12 * r.resabs;
  if (r.err <= std::max(tol_local, floor) || depth >= kMaxDepth || width_below_grain(a, b)) {
    ctx.value.add(r.value);
    ctx.err_sum += r.err;
    return;
  }
  const double m = 0.5 * (a + b);
  integrate_segment(ctx, a, m, depth + 1);
  integrate_segment(ctx, m, b, depth + 1);
}

}  // namespace

QuadResult integrate_proper(const Integrand& f, double a, double b, double tol,
                            std::int64_t eval_budget) {
  if (!f.eval) throw Error("integrate_proper: integrand has no eval function");
  if (!(tol > 0.0)) throw Error("integrate_proper: tolerance must be positive");
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate_proper: NaN bound");
  if (std::isinf(a) || std::isinf(b))
    throw DomainError("integrate_proper: bounds must be finite");

  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  if (a == b) return {};

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double bp : f.breakpoints)
    if (bp > a && bp < b) cuts.push_back(bp);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  AdaptCtx ctx;
  ctx.f = &f;
  ctx.tol = tol;
  ctx.total_len = b - a;
  ctx.budget = eval_budget;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    integrate_segment(ctx, cuts[i], cuts[i + 1], 0);

  return {sign * ctx.value.sum, ctx.err_sum, ctx.evals};
}

Antiderivative Antiderivative::closed_form(double base_point,
                                           std::function<double(double)> eval) {
  Antiderivative out;
  out.phi_ = base_point;
  out.source_ = AntiderivativeSource::closed_form;
  out.eval_ = std::move(eval);
  return out;
}

namespace {

// Anchor ladder at x = 2^{m/4}.  Anchor values are chained from the anchor
// nearest the base point, so they are identical no matter which queries arrive
// first; concurrent fills may duplicate work but write the same doubles.
class LadderCache {
 public:
  LadderCache(Integrand f, double phi, double tol, std::int64_t budget)
      : f_(std::move(f)), phi_(phi), tol_(tol), budget_(budget) {
    if (phi_ > 0.0) {
      m_seed_ = index_at_or_below(phi_);
    } else {
      m_seed_ = 0;  // anchor at 1.0
    }
  }

  double eval(double x) const {
    if (x == phi_) return 0.0;
    if (!(x > 0.0)) {
      // Outside the ladder's domain: integrate directly, unmemoized.
      return integrate_proper(f_, phi_, x, tol_, budget_).value;
    }
    int m = index_at_or_below(x);
    const double a = anchor_pos(m);
    return anchor_value(m) + integrate_proper(f_, a, x, tol_ * 0.25, budget_).value;
  }

 private:
  static double anchor_pos(int m) { return std::exp2(0.25 * static_cast<double>(m)); }

  static int index_at_or_below(double x) {
    int m = static_cast<int>(std::floor(4.0 * std::log2(x)));
    while (anchor_pos(m) > x) --m;
    while (anchor_pos(m + 1) <= x) ++m;
    return m;
  }

  double anchor_value(int m) const {
    {
      std::shared_lock lk(mu_);
      auto it = anchors_.find(m);
      if (it != anchors_.end()) return it->second;
    }
    if (std::abs(m - m_seed_) > 4000)
      throw DomainError("cumulative antiderivative query too far from base point");

    // Walk from the seed anchor toward m, filling gaps.
    double v = seed_value();
    int cur = m_seed_;
    store(cur, v);
    const int dir = (m > m_seed_) ? 1 : -1;
    while (cur != m) {
      const int next = cur + dir;
      double nv;
      {
        std::shared_lock lk(mu_);
        auto it = anchors_.find(next);
        if (it != anchors_.end()) {
          cur = next;
          v = it->second;
          continue;
        }
      }
      nv = v + integrate_proper(f_, anchor_pos(cur), anchor_pos(next), tol_ * 0.25, budget_).value;
      store(next, nv);
      cur = next;
      v = nv;
    }
    return v;
  }

  double seed_value() const {
    {
      std::shared_lock lk(mu_);
      auto it = anchors_.find(m_seed_);
      if (it != anchors_.end()) return it->second;
    }
    const double v = integrate_proper(f_, phi_, anchor_pos(m_seed_), tol_ * 0.25, budget_).value;
    store(m_seed_, v);
    return v;
  }

  void store(int m, double v) const {
    std::unique_lock lk(mu_);
    anchors_.emplace(m, v);
  }

  Integrand f_;
  double phi_;
  double tol_;
  std::int64_t budget_;
  int m_seed_ = 0;
  mutable std::map<int, double> anchors_;
  mutable std::shared_mutex mu_;
};

}  // namespace

Antiderivative cumulative(const Integrand& f, double phi, double tol, std::int64_t eval_budget) {
  if (!f.eval) throw Error("cumulative: integrand has no eval function");
  auto cache = std::make_shared<LadderCache>(f, phi, tol, eval_budget);
  Antiderivative out;
  out.phi_ = phi;
  out.source_ = AntiderivativeSource::cumulative_numeric;
  out.eval_ = [cache](double x) { return cache->eval(x); };
  return out;
}

}  // namespace zint
