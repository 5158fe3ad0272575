#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace perturbmap {

// Parameters of the deviation bound for a sample mean of perturbed maxima:
// a_squared is the squared Lipschitz radius (the number of perturbed
// variables), b the per-coordinate gradient bound (1 for maxima of sums).
struct BoundParams {
  double a_squared = 1.0;
  double b = 1.0;
  int sample_count = 1;
  double delta = 0.05;
};

// One-sided deviation radius at confidence delta for a mean of sample_count
// independent perturbed maxima:
//   max( 20 b log(1/delta) / M , sqrt( 20 a^2 log(1/delta) / M ) ).
double corollary2_bound(const BoundParams& params);

// Two-sided radius for an n-variable model: union bound over both tails, each
// at delta/2, with a^2 = n and b = 1.
double two_sided_bound(int n, int sample_count, double delta);

// Bound on E[exp(lambda (F - E F))] for a single perturbed max:
// exp(5 a^2 lambda^2), valid for |lambda| <= 1/(10 b); outside that range the
// bound does not apply and the call throws std::invalid_argument.
double exp_moment_bound(double a_squared, double b, double lambda);

// Per-step sample counts M_1..M_n so that every step's estimate in an
// n-variable sequential run stays within epsilon of its expectation with
// probability at least 1 - delta: the failure budget is split delta/n per
// step (two-sided), and the radius at step j uses a^2 = n - j + 1, b = 1.
std::vector<std::int64_t> epsilon_delta_plan(int n, double epsilon, double delta);

// 2 ((1+rho)/(1-rho))^2 exp(2 sqrt(5) rho), the constant in the modified
// log-Sobolev bound; rho must lie in (0,1).
double log_sobolev_prefactor(double rho);

// Test function for the functional inequalities: h with derivative dh and a
// certified sup-norm bound on dh.
struct ScalarFunctionSpec {
  std::string name;
  std::function<double(double)> h;
  std::function<double(double)> dh;
  double grad_sup = 1.0;
};

// Log-concave density q = exp(-phi) on a truncation window that carries all
// but at most normalization_tol of the mass. The minimizer splits the window
// so quadrature never evaluates at a potential's kink.
struct LogConcaveDensitySpec {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> ddphi;
  double minimizer = 0.0;
  double lower = -12.0;
  double upper = 12.0;
  double normalization_tol = 1e-6;
};

LogConcaveDensitySpec gumbel_density_spec();
LogConcaveDensitySpec gaussian_density_spec();
LogConcaveDensitySpec laplace_density_spec();
LogConcaveDensitySpec density_from_name(const std::string& name);

// The ten fixed functions used by the validators; every grad_sup is <= 1.
const std::vector<ScalarFunctionSpec>& test_function_suite();
const ScalarFunctionSpec& test_function(const std::string& name);

struct InequalityReport {
  std::string inequality;
  std::map<std::string, double> parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
  double quadrature_error = 0.0;
  std::string verdict;  // "holds" | "violated" | "inconclusive"
};

nlohmann::json report_to_json(const InequalityReport& report);

// Weighted Poincare inequality for a log-concave density:
//   Var_q(h) <= 1/(1-eta) * Int (h')^2 / (phi'' + eta (phi')^2) dq,
// checked by quadrature for eta in [0,1). A denominator that is not strictly
// positive on the window makes the check inconclusive.
InequalityReport check_poincare(const LogConcaveDensitySpec& density,
                                const ScalarFunctionSpec& fn, double eta);

// Specialization to the zero-mean Gumbel with the fixed constant 4:
//   Var(h) <= 4 Int (h')^2 dq.
InequalityReport check_gumbel_poincare(const ScalarFunctionSpec& fn);

// Modified log-Sobolev inequality for the zero-mean Gumbel:
//   Ent(e^{lambda h}) <= prefactor(rho) lambda^2 Int (h')^2 e^{lambda h} dq,
// valid for |lambda| * grad_sup <= rho < 1.
InequalityReport check_modified_log_sobolev(const ScalarFunctionSpec& fn, double lambda,
                                            double rho);

}  // namespace perturbmap
