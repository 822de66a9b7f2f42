#include <zint/exprparse.hpp>
#include <zint/propsuite.hpp>
#include <zint/zlimit.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* status_name(zint::Status s) {
  switch (s) {
    case zint::Status::converged: return "converged";
    case zint::Status::diverged: return "diverged";
    case zint::Status::inconclusive: return "inconclusive";
  }
  return "?";
}

int status_exit_code(zint::Status s) {
  switch (s) {
    case zint::Status::converged: return 0;
    case zint::Status::diverged: return 2;
    case zint::Status::inconclusive: return 3;
  }
  return 1;
}

zint::InitializationFn parse_init(const std::string& spec) {
  using namespace zint;
  if (spec == "ramp") return make_linear_ramp();
  if (spec == "smoothstep") return make_smoothstep();
  if (spec.rfind("combine:", 0) == 0) {
    const std::string rest = spec.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw Error("--init combine:<a>,<b> needs two component names");
    return combine_init(parse_init(rest.substr(0, comma)), parse_init(rest.substr(comma + 1)));
  }
  if (spec.rfind("from-z:", 0) == 0) {
    const double alpha = std::stod(spec.substr(7));
    return w_from_z(z_from_w(make_linear_ramp(), alpha), alpha);
  }
  throw Error("unknown initialization function '" + spec +
              "' (expected ramp | smoothstep | combine:<a>,<b> | from-z:<alpha>)");
}

zint::ChangeOfVariable parse_map(const std::string& spec) {
  using namespace zint;
  if (spec.rfind("exp:", 0) == 0) return make_exp_map(std::stod(spec.substr(4)));
  if (spec.rfind("power:", 0) == 0) return make_power_map(std::stod(spec.substr(6)));
  throw Error("unknown map '" + spec + "' (expected exp:<alpha> | power:<r>)");
}

struct Options {
  std::string g_expr;
  std::string f_expr;
  std::string hint_expr;
  double beta = 1.0;
  double a = 1.0;
  std::string critical = "lower";
  std::string init = "smoothstep";
  double z_alpha = 1.0;
  std::string map;
  double tol = -1.0;
  double tol_ext = -1.0;
  int levels = -1;
  int min_levels = -1;
  double ratio = -1.0;
  double step = -1.0;
  std::string format;
};

zint::Integrand integrand_from_expr(const std::string& text, const std::string& var,
                                    const std::string& hint_text) {
  using namespace zint;
  const expr::Expr e = expr::parse(text);
  Integrand g;
  g.eval = [e, var](double x) {
    return expr::eval_expr(e, {{var, x}});
  };
  if (!hint_text.empty()) {
    const expr::Expr h = expr::parse(hint_text);
    g.oscillation_hint = [h, var](double x) {
      return expr::eval_expr(h, {{var, x}});
    };
  }
  return g;
}

void apply_schedule_overrides(zint::LimitSchedule& s, const Options& opt) {
  if (opt.tol > 0.0) {
    s.tol = opt.tol;
    if (opt.tol_ext <= 0.0) s.tol_extrapolated = opt.tol * 1e-2;
  }
  if (opt.tol_ext > 0.0) s.tol_extrapolated = opt.tol_ext;
  if (opt.levels > 0) s.max_levels = opt.levels;
  if (opt.min_levels > 0) s.min_levels = opt.min_levels;
  if (opt.ratio > 0.0) s.ratio = opt.ratio;
  if (opt.step > 0.0) {
    s.step = opt.step;
    s.progression = zint::Progression::arithmetic;
  }
}

void print_result(const zint::ZResult& res, const std::string& format, const std::string& command) {
  using zint::TracePoint;
  if (format == "json") {
    std::string out = "{\"version\":\"";
    out += kVersion;
    out += "\",\"command\":\"" + command + "\"";
    out += ",\"value\":" + fmt17(res.value);
    out += ",\"status\":\"" + std::string(status_name(res.status)) + "\"";
    out += ",\"error_estimate\":" + fmt17(res.error_estimate);
    out += ",\"levels\":" + std::to_string(res.trace.size());
    out += ",\"trace\":[";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      const TracePoint& tp = res.trace[i];
      if (i) out += ",";
      out += "{\"level\":" + std::to_string(tp.level) + ",\"param\":" + fmt17(tp.param) +
             ",\"raw_estimate\":" + fmt17(tp.raw) + ",\"extrapolated\":" + fmt17(tp.extrapolated) +
             ",\"abs_diff\":" + fmt17(tp.abs_diff) + "}";
    }
    out += "]}";
    std::cout << out << "\n";
  } else if (format == "csv") {
    std::cout << zint::trace_to_csv(res.trace);
    std::cerr << "# value=" << fmt17(res.value) << " status=" << status_name(res.status) << "\n";
  } else {
    std::cout << "value          = " << fmt17(res.value) << "\n"
              << "status         = " << status_name(res.status) << "\n"
              << "error_estimate = " << fmt17(res.error_estimate) << "\n"
              << "levels         = " << res.trace.size() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace zint;
  CLI::App app{"zint: regularized improper integrals (finite and infinite critical limits)"};
  app.require_subcommand(1);

  Options opt;
  const char* env_format = std::getenv("ZINT_FORMAT");
  std::string default_format = env_format ? env_format : "text";

  auto add_common = [&](CLI::App* cmd, bool finite) {
    if (finite) {
      cmd->add_option("--g", opt.g_expr, "integrand g(u) as an expression in u")->required();
      cmd->add_option("--beta", opt.beta, "noncritical bound beta (> 0)");
      cmd->add_option("--critical", opt.critical, "which endpoint is critical: lower|upper")
          ->check(CLI::IsMember({"lower", "upper"}));
    } else {
      cmd->add_option("--f", opt.f_expr, "integrand f(x) as an expression in x")->required();
      cmd->add_option("--a", opt.a, "finite lower bound a");
      cmd->add_option("--z-alpha", opt.z_alpha, "alpha for the first-type z built from --init");
      cmd->add_option("--map", opt.map, "change of variable: exp:<alpha> | power:<r>");
    }
    cmd->add_option("--init", opt.init,
                    "initialization function: ramp | smoothstep | combine:<a>,<b> | from-z:<alpha>");
    cmd->add_option("--hint", opt.hint_expr,
                    "oscillation hint: local phase derivative as an expression");
    cmd->add_option("--tol", opt.tol, "raw-sequence Cauchy tolerance");
    cmd->add_option("--tol-extrapolated", opt.tol_ext, "extrapolated-sequence tolerance");
    cmd->add_option("--levels", opt.levels, "maximum schedule levels");
    cmd->add_option("--min-levels", opt.min_levels, "minimum levels before convergence may fire");
    cmd->add_option("--ratio", opt.ratio, "geometric schedule ratio");
    cmd->add_option("--step", opt.step, "arithmetic b-schedule step (infinite limits)");
    cmd->add_option("--format", opt.format, "output format: json | csv | text");
  };

  CLI::App* eval = app.add_subcommand("eval", "finite-limit regularized integral");
  add_common(eval, true);
  CLI::App* eval_inf = app.add_subcommand("eval-inf", "infinite-limit regularized integral");
  add_common(eval_inf, false);
  CLI::App* sweep = app.add_subcommand("sweep", "emit the level trace as CSV");
  add_common(sweep, true);
  CLI::App* props = app.add_subcommand("props", "run the property-check suite");
  props->add_option("--format", opt.format, "output format: json | text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const std::string format = opt.format.empty() ? default_format : opt.format;

  try {
    if (props->parsed()) {
      const auto outcomes = props::run_default_suite(format == "text" ? &std::cout : nullptr);
      std::size_t failures = 0;
      for (const auto& o : outcomes)
        if (!o.passed && !o.skipped) ++failures;
      if (format == "json") {
        std::cout << props::outcomes_to_json(outcomes) << "\n";
      } else {
        std::cout << outcomes.size() << " checks, " << failures << " failures\n";
      }
      return failures == 0 ? 0 : 2;
    }

    if (eval->parsed() || sweep->parsed()) {
      if (!(opt.beta > 0.0)) throw Error("--beta must be positive");
      EvalRequest req;
      req.integrand = integrand_from_expr(opt.g_expr, "u", opt.hint_expr);
      req.integrand.domain = {0.0, opt.beta, true, false};
      req.bounds = finite_bounds(0.0, opt.beta);
      req.critical_side = opt.critical == "upper" ? CriticalSide::upper : CriticalSide::lower;
      req.regularizer = parse_init(opt.init);
      LimitSchedule sched = default_finite_schedule();
      apply_schedule_overrides(sched, opt);
      const ZResult res = z_integral_finite(req, sched);
      print_result(res, sweep->parsed() ? "csv" : format, sweep->parsed() ? "sweep" : "eval");
      return status_exit_code(res.status);
    }

    if (eval_inf->parsed()) {
      EvalRequest req;
      req.integrand = integrand_from_expr(opt.f_expr, "x", opt.hint_expr);
      req.integrand.domain = {opt.a, std::numeric_limits<double>::infinity(), false, true};
      req.bounds = infinite_upper(opt.a);
      LimitSchedule sched = default_infinite_schedule();
      apply_schedule_overrides(sched, opt);
      ZResult res;
      if (!opt.map.empty()) {
        req.regularizer = ZetaPair{parse_init(opt.init), parse_map(opt.map)};
        res = xi_integral_infinite(req, sched);
      } else {
        req.regularizer = z_from_w(parse_init(opt.init), opt.z_alpha);
        res = z_integral_infinite(req, sched);
      }
      print_result(res, format, "eval-inf");
      return status_exit_code(res.status);
    }
  } catch (const expr::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
