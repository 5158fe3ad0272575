#include "perturbmap/concentration.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "perturbmap/gumbel.hpp"
#include "perturbmap/quadrature.hpp"

namespace perturbmap {

namespace {

void check_bound_params(const BoundParams& p) {
  if (!(p.a_squared >= 0.0) || !std::isfinite(p.a_squared)) {
    throw std::invalid_argument("bound: a_squared must be finite and non-negative");
  }
  if (!(p.b > 0.0) || !std::isfinite(p.b)) {
    throw std::invalid_argument("bound: b must be finite and positive");
  }
  if (p.sample_count < 1) {
    throw std::invalid_argument("bound: sample_count must be at least 1");
  }
  if (!(p.delta > 0.0 && p.delta < 1.0)) {
    throw std::invalid_argument("bound: delta must lie in (0,1)");
  }
}

}  // namespace

double corollary2_bound(const BoundParams& params) {
  check_bound_params(params);
  const double log_term = std::log(1.0 / params.delta);
  const double m = static_cast<double>(params.sample_count);
  const double linear = 20.0 * params.b * log_term / m;
  const double quadratic = std::sqrt(20.0 * params.a_squared * log_term / m);
  return std::max(linear, quadratic);
}

double two_sided_bound(int n, int sample_count, double delta) {
  if (n < 1) throw std::invalid_argument("two_sided_bound: n must be at least 1");
  return corollary2_bound(BoundParams{.a_squared = static_cast<double>(n),
                                      .b = 1.0,
                                      .sample_count = sample_count,
                                      .delta = delta / 2.0});
}

double exp_moment_bound(double a_squared, double b, double lambda) {
  check_bound_params(BoundParams{.a_squared = a_squared, .b = b, .sample_count = 1,
                                 .delta = 0.5});
  if (!(std::abs(lambda) <= 1.0 / (10.0 * b))) {
    throw std::invalid_argument("exp_moment_bound: |lambda| must be <= 1/(10 b)");
  }
  return std::exp(5.0 * a_squared * lambda * lambda);
}

std::vector<std::int64_t> epsilon_delta_plan(int n, double epsilon, double delta) {
  if (n < 1) throw std::invalid_argument("epsilon_delta_plan: n must be at least 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon_delta_plan: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("epsilon_delta_plan: delta must lie in (0,1)");
  }
  // Two-sided radius per step at failure budget delta/n, i.e. delta/(2n) per
  // tail: require max(20 L / M, sqrt(20 a^2 L / M)) <= epsilon with
  // L = log(2n/delta), solved for the smallest integer M.
  const double log_term = std::log(2.0 * n / delta);
  std::vector<std::int64_t> plan(n);
  for (int j = 1; j <= n; ++j) {
    const double a_squared = static_cast<double>(n - j + 1);
    const double linear = 20.0 * log_term / epsilon;
    const double quadratic = 20.0 * a_squared * log_term / (epsilon * epsilon);
    plan[j - 1] = static_cast<std::int64_t>(std::ceil(std::max(linear, quadratic)));
  }
  return plan;
}

double log_sobolev_prefactor(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("log_sobolev_prefactor: rho must lie in (0,1)");
  }
  const double shape = (1.0 + rho) / (1.0 - rho);
  return 2.0 * shape * shape * std::exp(2.0 * std::sqrt(5.0) * rho);
}

LogConcaveDensitySpec gumbel_density_spec() {
  LogConcaveDensitySpec spec;
  spec.name = "gumbel";
  // phi(y) = z + exp(-z) with z = y + kEulerGamma; the mode sits at z = 0.
  spec.phi = [](double y) {
    const double z = y + kEulerGamma;
    return z + std::exp(-z);
  };
  spec.dphi = [](double y) { return 1.0 - std::exp(-(y + kEulerGamma)); };
  spec.ddphi = [](double y) { return std::exp(-(y + kEulerGamma)); };
  spec.minimizer = -kEulerGamma;
  spec.lower = -15.0;
  spec.upper = 35.0;
  spec.normalization_tol = 1e-6;
  return spec;
}

LogConcaveDensitySpec gaussian_density_spec() {
  LogConcaveDensitySpec spec;
  spec.name = "gaussian";
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
  spec.phi = [log_norm](double y) { return 0.5 * y * y + log_norm; };
  spec.dphi = [](double y) { return y; };
  spec.ddphi = [](double) { return 1.0; };
  spec.minimizer = 0.0;
  spec.lower = -12.0;
  spec.upper = 12.0;
  spec.normalization_tol = 1e-6;
  return spec;
}

LogConcaveDensitySpec laplace_density_spec() {
  LogConcaveDensitySpec spec;
  spec.name = "laplace";
  spec.phi = [](double y) { return std::abs(y) + std::log(2.0); };
  spec.dphi = [](double y) { return y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0); };
  spec.ddphi = [](double) { return 0.0; };
  spec.minimizer = 0.0;
  spec.lower = -12.0;
  spec.upper = 12.0;
  // The window drops the exp(-12) tails, so the truncated mass is 1 - e^{-12}
  // (about 6.1e-6 short); the tolerance reflects that.
  spec.normalization_tol = 1e-5;
  return spec;
}

LogConcaveDensitySpec density_from_name(const std::string& name) {
  if (name == "gumbel") return gumbel_density_spec();
  if (name == "gaussian") return gaussian_density_spec();
  if (name == "laplace") return laplace_density_spec();
  throw std::invalid_argument("unknown density '" + name +
                              "' (expected gumbel|gaussian|laplace)");
}

const std::vector<ScalarFunctionSpec>& test_function_suite() {
  static const std::vector<ScalarFunctionSpec> suite = [] {
    std::vector<ScalarFunctionSpec> fns;
    fns.push_back({"identity", [](double y) { return y; }, [](double) { return 1.0; },
                   1.0});
    fns.push_back({"tanh", [](double y) { return std::tanh(y); },
                   [](double y) {
                     const double t = std::tanh(y);
                     return 1.0 - t * t;
                   },
                   1.0});
    fns.push_back({"sin", [](double y) { return std::sin(y); },
                   [](double y) { return std::cos(y); }, 1.0});
    fns.push_back({"half_cos2", [](double y) { return 0.5 * std::cos(2.0 * y); },
                   [](double y) { return -std::sin(2.0 * y); }, 1.0});
    fns.push_back({"atan", [](double y) { return std::atan(y); },
                   [](double y) { return 1.0 / (1.0 + y * y); }, 1.0});
    fns.push_back({"log_cosh", [](double y) { return std::log(std::cosh(y)); },
                   [](double y) { return std::tanh(y); }, 1.0});
    fns.push_back({"softplus", [](double y) { return y > 30.0 ? y : std::log1p(std::exp(y)); },
                   [](double y) { return 1.0 / (1.0 + std::exp(-y)); }, 1.0});
    fns.push_back({"gauss_bump", [](double y) { return std::exp(-0.5 * y * y); },
                   [](double y) { return -y * std::exp(-0.5 * y * y); },
                   std::exp(-0.5)});
    fns.push_back({"sigmoid", [](double y) { return 1.0 / (1.0 + std::exp(-y)); },
                   [](double y) {
                     const double s = 1.0 / (1.0 + std::exp(-y));
                     return s * (1.0 - s);
                   },
                   0.25});
    fns.push_back({"third_sin3", [](double y) { return std::sin(3.0 * y) / 3.0; },
                   [](double y) { return std::cos(3.0 * y); }, 1.0});
    return fns;
  }();
  return suite;
}

const ScalarFunctionSpec& test_function(const std::string& name) {
  for (const auto& fn : test_function_suite()) {
    if (fn.name == name) return fn;
  }
  throw std::invalid_argument("unknown test function '" + name + "'");
}

nlohmann::json report_to_json(const InequalityReport& report) {
  nlohmann::json doc;
  doc["inequality"] = report.inequality;
  doc["parameters"] = report.parameters;
  doc["lhs"] = report.lhs;
  doc["rhs"] = report.rhs;
  doc["ratio"] = report.ratio;
  doc["quadrature_error"] = report.quadrature_error;
  doc["verdict"] = report.verdict;
  return doc;
}

namespace {

constexpr double kQuadTol = 1e-8;
constexpr std::size_t kQuadBudget = 1000000;

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Integrate across the window in two pieces split at the density's minimizer,
// so kinked potentials (laplace) are never sampled at the kink.
Integral integrate_against(const LogConcaveDensitySpec& density,
                           const std::function<double(double)>& integrand) {
  auto weighted = [&](double y) { return integrand(y) * std::exp(-density.phi(y)); };
  Integral total;
  const bool split = density.lower < density.minimizer && density.minimizer < density.upper;
  const double pieces[2][2] = {{density.lower, split ? density.minimizer : density.upper},
                               {split ? density.minimizer : density.upper, density.upper}};
  const int count = split ? 2 : 1;
  for (int i = 0; i < count; ++i) {
    const QuadratureResult r =
        integrate(weighted, pieces[i][0], pieces[i][1], kQuadTol / 2.0, kQuadBudget);
    total.value += r.value;
    total.error += r.error_estimate;
    total.converged = total.converged && r.converged;
  }
  return total;
}

std::string verdict_for(double lhs, double rhs, double quad_error, bool converged) {
  if (!converged || !std::isfinite(lhs) || !std::isfinite(rhs)) return "inconclusive";
  const double slack = 10.0 * quad_error + 1e-12;
  return lhs <= rhs + slack ? "holds" : "violated";
}

// lhs/rhs with the 0/0 case pinned to 0; "zero" on the lhs means within the
// same numerical slack the verdict uses, since quadrature never returns an
// exact zero variance.
double safe_ratio(double lhs, double rhs, double quad_error) {
  if (rhs == 0.0) {
    return std::abs(lhs) <= 10.0 * quad_error + 1e-12
               ? 0.0
               : std::numeric_limits<double>::infinity();
  }
  return lhs / rhs;
}

// Positivity probe for the weight denominator: samples midpoints within each
// half-window, so the minimizer itself — a possible kink where one-sided
// derivatives disagree — is never tested.
bool denominator_positive(const LogConcaveDensitySpec& density, double eta) {
  const bool split =
      density.lower < density.minimizer && density.minimizer < density.upper;
  const double edges[3] = {density.lower, split ? density.minimizer : density.upper,
                           density.upper};
  const int pieces = split ? 2 : 1;
  for (int i = 0; i < pieces; ++i) {
    for (int k = 0; k < 500; ++k) {
      const double y = edges[i] + (edges[i + 1] - edges[i]) * (k + 0.5) / 500.0;
      const double denom = density.ddphi(y) + eta * density.dphi(y) * density.dphi(y);
      if (!(denom > 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

InequalityReport check_poincare(const LogConcaveDensitySpec& density,
                                const ScalarFunctionSpec& fn, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw std::invalid_argument("check_poincare: eta must lie in [0,1)");
  }
  InequalityReport report;
  report.inequality = "poincare";
  report.parameters["eta"] = eta;

  const Integral mean = integrate_against(density, fn.h);
  const Integral second =
      integrate_against(density, [&](double y) { return fn.h(y) * fn.h(y); });

  // Denominator phi'' + eta (phi')^2 must stay positive away from the
  // minimizer; probe before integrating so a vanishing denominator yields a
  // verdict instead of a meaningless integral.
  const bool positive = denominator_positive(density, eta);

  const double lhs = second.value - mean.value * mean.value;
  report.lhs = lhs;
  const double lhs_error = second.error + 2.0 * std::abs(mean.value) * mean.error;

  if (!positive) {
    report.rhs = std::numeric_limits<double>::quiet_NaN();
    report.ratio = std::numeric_limits<double>::quiet_NaN();
    report.quadrature_error = lhs_error;
    report.verdict = "inconclusive";
    return report;
  }

  const Integral energy = integrate_against(density, [&](double y) {
    const double d = fn.dh(y);
    const double denom = density.ddphi(y) + eta * density.dphi(y) * density.dphi(y);
    return d * d / denom;
  });
  const double rhs = energy.value / (1.0 - eta);
  report.rhs = rhs;
  report.quadrature_error = lhs_error + energy.error / (1.0 - eta);
  report.ratio = safe_ratio(lhs, rhs, report.quadrature_error);
  report.verdict = verdict_for(lhs, rhs, report.quadrature_error,
                               mean.converged && second.converged && energy.converged);
  return report;
}

InequalityReport check_gumbel_poincare(const ScalarFunctionSpec& fn) {
  const LogConcaveDensitySpec density = gumbel_density_spec();
  InequalityReport report;
  report.inequality = "gumbel-poincare";
  report.parameters["constant"] = 4.0;

  const Integral mean = integrate_against(density, fn.h);
  const Integral second =
      integrate_against(density, [&](double y) { return fn.h(y) * fn.h(y); });
  const Integral energy =
      integrate_against(density, [&](double y) { return fn.dh(y) * fn.dh(y); });

  report.lhs = second.value - mean.value * mean.value;
  report.rhs = 4.0 * energy.value;
  report.quadrature_error =
      second.error + 2.0 * std::abs(mean.value) * mean.error + 4.0 * energy.error;
  report.ratio = safe_ratio(report.lhs, report.rhs, report.quadrature_error);
  report.verdict = verdict_for(report.lhs, report.rhs, report.quadrature_error,
                               mean.converged && second.converged && energy.converged);
  return report;
}

InequalityReport check_modified_log_sobolev(const ScalarFunctionSpec& fn, double lambda,
                                            double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("check_modified_log_sobolev: rho must lie in (0,1)");
  }
  if (!(std::abs(lambda) * fn.grad_sup <= rho)) {
    throw std::invalid_argument(
        "check_modified_log_sobolev: need |lambda| * sup|h'| <= rho");
  }
  const LogConcaveDensitySpec density = gumbel_density_spec();
  InequalityReport report;
  report.inequality = "log-sobolev";
  report.parameters["lambda"] = lambda;
  report.parameters["rho"] = rho;
  report.parameters["prefactor"] = log_sobolev_prefactor(rho);

  const Integral moment =
      integrate_against(density, [&](double y) { return std::exp(lambda * fn.h(y)); });
  const Integral weighted_h = integrate_against(density, [&](double y) {
    return lambda * fn.h(y) * std::exp(lambda * fn.h(y));
  });
  const Integral energy = integrate_against(density, [&](double y) {
    const double d = fn.dh(y);
    return d * d * std::exp(lambda * fn.h(y));
  });

  // Ent(e^{lambda h}) = E[lambda h e^{lambda h}] - E[e^{lambda h}] log E[e^{lambda h}].
  const double ent = weighted_h.value - moment.value * std::log(moment.value);
  report.lhs = ent;
  report.rhs = log_sobolev_prefactor(rho) * lambda * lambda * energy.value;
  report.quadrature_error =
      weighted_h.error + (std::abs(std::log(moment.value)) + 1.0) * moment.error +
      log_sobolev_prefactor(rho) * lambda * lambda * energy.error;
  report.ratio = safe_ratio(report.lhs, report.rhs, report.quadrature_error);
  report.verdict = verdict_for(report.lhs, report.rhs, report.quadrature_error,
                               moment.converged && weighted_h.converged && energy.converged);
  return report;
}

}  // namespace perturbmap
