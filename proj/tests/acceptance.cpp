// Acceptance gate: one timed check per shipped guarantee. Every criterion
// runs even when an earlier one fails; the exit code is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "perturbmap/bench.hpp"
#include "perturbmap/concentration.hpp"
#include "perturbmap/gumbel.hpp"
#include "perturbmap/model.hpp"
#include "perturbmap/perturbation.hpp"
#include "perturbmap/sampler.hpp"
#include "perturbmap/solvers.hpp"

using namespace perturbmap;

namespace {

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// Binary model with uniform[-1,1] unaries and full pairwise tables.
DiscreteModel random_model(int n, RngStream& rng) {
  DiscreteModel m(std::vector<std::vector<double>>(n, {0.0, 1.0}));
  for (int i = 0; i < n; ++i) {
    for (std::int32_t l = 0; l < 2; ++l) {
      m.add_unary(i, l, -1.0 + 2.0 * rng.next_unit_open());
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (std::int32_t a = 0; a < 2; ++a) {
        for (std::int32_t b = 0; b < 2; ++b) {
          m.add_pairwise(i, j, a, b, -1.0 + 2.0 * rng.next_unit_open());
        }
      }
    }
  }
  return m;
}

double tv_to_gibbs(const DiscreteModel& model, const std::map<Configuration, int>& counts,
                   int total) {
  double tv = 0.0;
  Configuration x = first_configuration(model);
  do {
    const auto it = counts.find(x);
    const double freq = it == counts.end() ? 0.0 : it->second / static_cast<double>(total);
    tv += std::abs(freq - gibbs_probability(model, x));
  } while (next_configuration(model, x));
  return tv / 2.0;
}

DiscreteModel attractive_chain() {
  DiscreteModel m(std::vector<std::vector<double>>{{-1.0, 1.0}, {-1.0, 1.0}});
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      m.add_pairwise(0, 1, a, b, (a == 0 ? -1.0 : 1.0) * (b == 0 ? -1.0 : 1.0));
    }
  }
  return m;
}

// --- criterion bodies, each returning pass/fail plus a measurement note ----

bool criterion_logz_identity(std::string& note) {
  RngStream master(101);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    RngStream model_rng = master.stream(k);
    const DiscreteModel model = random_model(1 + k % 4, model_rng);
    const double logz = log_partition_exact(model);
    RngStream noise = master.stream(100 + k);
    double acc = 0.0;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
      const PerturbationTable table =
          draw_perturbation(model, PerturbationTable::Kind::kFull, noise);
      acc += map_bruteforce(model, &table).value;
    }
    worst = std::max(worst, std::abs(acc / samples - logz));
  }
  note = fmt("max |sample mean - log Z| = %.4f over 5 models (tol 0.03)", worst);
  return worst < 0.03;
}

bool criterion_exact_sampler(std::string& note) {
  RngStream model_rng = RngStream(202).stream(0);
  const DiscreteModel model = generate_spin_glass({2, 2, 1.0, 202}, model_rng);
  RngStream rng = RngStream(202).stream(1);
  std::map<Configuration, int> counts;
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) ++counts[sample_exact(model, rng)];
  const double tv = tv_to_gibbs(model, counts, draws);
  note = fmt("TV(100k draws, Gibbs) = %.4f (tol 0.02)", tv);
  return tv < 0.02;
}

bool criterion_solver_equivalence(std::string& note) {
  RngStream master(303);
  double worst = 0.0;
  int agreed = 0;
  for (int k = 0; k < 100; ++k) {
    RngStream inst = master.stream(k);
    const double coupling = 0.5 + 3.5 * inst.next_unit_open();
    const DiscreteModel model = generate_spin_glass({3, 3, coupling, 303}, inst);
    const PerturbationTable table =
        draw_perturbation(model, PerturbationTable::Kind::kLowDim, inst);
    const double brute = map_bruteforce(model, &table).value;
    const double cut = map_mincut(model, &table).value;
    const double gap = std::abs(brute - cut);
    worst = std::max(worst, gap);
    if (gap <= 1e-9) ++agreed;
  }
  note = fmt("%d/100 instances agree, max value gap %.2e (tol 1e-9)", agreed, worst);
  return agreed == 100;
}

bool criterion_sequential_sampler(std::string& note) {
  const DiscreteModel model = attractive_chain();
  EstimatorConfig config;
  config.m_schedule = {10000};
  RngStream rng(404);
  std::map<Configuration, int> counts;
  int accepted = 0;
  bool restart_mass_seen = false;
  for (int attempt = 0; accepted < 10000 && attempt < 11000; ++attempt) {
    const SamplerTrace trace = sample_sequential(model, config, rng);
    for (const auto& step : trace.steps) {
      restart_mass_seen = restart_mass_seen || step.restart_prob > 0.0 || step.clamped;
    }
    if (!trace.sample.has_value()) continue;
    ++counts[*trace.sample];
    ++accepted;
  }
  if (accepted < 10000) {
    note = fmt("only %d/10000 samples accepted", accepted);
    return false;
  }
  const double tv = tv_to_gibbs(model, counts, accepted);
  note = fmt("TV(10k accepted, Gibbs) = %.4f (tol 0.05), restart mass %s", tv,
             restart_mass_seen ? "observed" : "never observed");
  return tv < 0.05 && restart_mass_seen;
}

bool criterion_deviation_bound(std::string& note) {
  const RngStream base = RngStream(505).stream(0);
  RngStream model_rng = base.stream(~std::uint64_t{0} - 1);
  const DiscreteModel model = generate_spin_glass({10, 10, 1.0, 505}, model_rng);
  const std::vector<int> m_values{10};
  const DeviationExperiment dev = deviation_experiment(
      model, m_values, 1000, 100000, SolverKind::kMinCut, base);
  const double radius = corollary2_bound(
      {.a_squared = 100.0, .b = 1.0, .sample_count = 10, .delta = 0.05});
  int exceeded = 0;
  for (const auto& s : dev.per_m[0]) {
    if (std::abs(s.deviation) > radius) ++exceeded;
  }
  note = fmt("%d/1000 replicates beyond radius %.4f (allowed 50)", exceeded, radius);
  return exceeded <= 50;
}

bool criterion_error_vs_samples(std::string& note) {
  const double radius = two_sided_bound(100, 10, 0.05);
  const std::vector<int> m_values{1, 10};
  RngStream master(606);
  double worst_m10 = 0.0;
  double smallest_gap = std::numeric_limits<double>::infinity();
  bool ordered = true;
  for (int ci = 0; ci <= 8; ++ci) {
    const double c = 0.5 * ci;
    const RngStream base = master.stream(ci);
    RngStream model_rng = base.stream(~std::uint64_t{0} - 1);
    const DiscreteModel model = generate_spin_glass({10, 10, c, 606}, model_rng);
    const DeviationExperiment dev =
        deviation_experiment(model, m_values, 100, 1000, SolverKind::kMinCut, base);
    double mean_abs[2] = {0.0, 0.0};
    for (int mi = 0; mi < 2; ++mi) {
      for (const auto& s : dev.per_m[mi]) mean_abs[mi] += std::abs(s.deviation);
      mean_abs[mi] /= dev.per_m[mi].size();
    }
    ordered = ordered && mean_abs[1] < mean_abs[0];
    smallest_gap = std::min(smallest_gap, mean_abs[0] - mean_abs[1]);
    worst_m10 = std::max(worst_m10, mean_abs[1]);
  }
  note = fmt("M=10 below M=1 at all 9 couplings (min gap %.3f); max M=10 error %.3f "
             "(radius %.4f)",
             smallest_gap, worst_m10, radius);
  return ordered && worst_m10 < radius;
}

bool criterion_tail_decay(std::string& note) {
  ExperimentPlan plan;
  plan.rows = 10;
  plan.cols = 10;
  plan.histogram_coupling = 1.0;
  plan.m_values = {1, 5, 10};
  plan.replicates = 500;
  plan.reference_samples = 1000;
  plan.histogram_buckets = 24;
  plan.seed = 707;
  plan.solver = SolverKind::kMinCut;
  const std::string csv = run_deviation_histogram(plan);

  std::map<int, std::vector<double>> radii;
  std::map<int, std::vector<int>> counts;
  std::stringstream ss(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    const int m = std::stoi(fields[0]);
    radii[m].push_back(std::stod(fields[1]));
    counts[m].push_back(std::stoi(fields[2]));
  }

  double worst_r2 = 1.0;
  double worst_slope = -std::numeric_limits<double>::infinity();
  for (const auto& [m, rs] : radii) {
    const auto& cs = counts.at(m);
    for (std::size_t k = 1; k < cs.size(); ++k) {
      if (cs[k] > cs[k - 1]) {
        note = fmt("M=%d exceed counts rise at r=%.4f", m, rs[k]);
        return false;
      }
    }
    const TailFit fit = fit_exceedance_tail(rs, cs, plan.replicates);
    if (fit.points < 2) {
      note = fmt("M=%d tail has %d informative points", m, fit.points);
      return false;
    }
    worst_r2 = std::min(worst_r2, fit.r_squared);
    worst_slope = std::max(worst_slope, fit.slope);
  }
  note = fmt("counts nonincreasing for all M; tail fits slope <= %.4f, R^2 >= %.3f "
             "(need < 0, >= 0.8)",
             worst_slope, worst_r2);
  return worst_slope < 0.0 && worst_r2 >= 0.8;
}

bool criterion_gumbel_poincare(std::string& note) {
  double worst = 0.0;
  for (const auto& fn : test_function_suite()) {
    const InequalityReport report = check_gumbel_poincare(fn);
    if (report.verdict != "holds") {
      note = fmt("%s: verdict %s", fn.name.c_str(), report.verdict.c_str());
      return false;
    }
    worst = std::max(worst, report.ratio);
  }
  const double id_ratio = check_gumbel_poincare(test_function("identity")).ratio;
  const double expected = std::numbers::pi * std::numbers::pi / 24.0;
  note = fmt("all 10 ratios <= %.4f; identity ratio %.6f vs %.6f (tol 1e-4)", worst,
             id_ratio, expected);
  return worst <= 1.0 && std::abs(id_ratio - expected) <= 1e-4;
}

bool criterion_weighted_poincare(std::string& note) {
  const double gauss_ratio =
      check_poincare(gaussian_density_spec(), test_function("identity"), 0.0).ratio;
  double worst = 0.0;
  for (const auto& fn : test_function_suite()) {
    const InequalityReport report = check_poincare(laplace_density_spec(), fn, 0.5);
    if (report.verdict != "holds") {
      note = fmt("laplace %s: verdict %s", fn.name.c_str(), report.verdict.c_str());
      return false;
    }
    worst = std::max(worst, report.ratio);
  }
  note = fmt("Gaussian identity ratio %.8f (tol 1e-6 around 1); Laplace eta=1/2 "
             "ratios <= %.4f",
             gauss_ratio, worst);
  return std::abs(gauss_ratio - 1.0) <= 1e-6 && worst <= 1.0;
}

bool criterion_log_sobolev(std::string& note) {
  const double prefactor = log_sobolev_prefactor(0.1);
  if (!(std::abs(prefactor - 4.672) <= 1e-3 && prefactor < 5.0)) {
    note = fmt("prefactor %.6f out of 4.672 +/- 1e-3 or >= 5", prefactor);
    return false;
  }
  double worst = 0.0;
  for (const auto& fn : test_function_suite()) {
    const InequalityReport report = check_modified_log_sobolev(fn, 0.01, 0.1);
    if (!(report.lhs <= report.rhs) || report.verdict != "holds") {
      note = fmt("%s: lhs %.3e > rhs %.3e", fn.name.c_str(), report.lhs, report.rhs);
      return false;
    }
    worst = std::max(worst, report.ratio);
  }
  note = fmt("prefactor %.6f < 5; all 10 checks hold with ratio <= %.4f", prefactor,
             worst);
  return true;
}

bool criterion_gradient_indicator(std::string& note) {
  RngStream master(909);
  const double h = 1e-6;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    RngStream inst = master.stream(t);
    const DiscreteModel model = random_model(1 + t % 4, inst);
    PerturbationTable table =
        draw_perturbation(model, PerturbationTable::Kind::kLowDim, inst);
    const std::size_t k =
        static_cast<std::size_t>(inst.next_unit_open() * table.values.size());
    int var = 0;
    while (table.offsets[var + 1] <= k) ++var;
    const std::int32_t label = static_cast<std::int32_t>(k - table.offsets[var]);

    const Configuration argmax = map_bruteforce(model, &table).argmax;
    const double indicator = argmax[var] == label ? 1.0 : 0.0;
    table.values[k] += h;
    const double up = map_bruteforce(model, &table).value;
    table.values[k] -= 2.0 * h;
    const double down = map_bruteforce(model, &table).value;
    table.values[k] += h;
    const double grad = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(grad - indicator));
  }
  note = fmt("max |finite difference - argmax indicator| = %.2e over 50 triples "
             "(tol 1e-6)",
             worst);
  return worst <= 1e-6;
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_seconds;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "full-perturbation sample mean recovers log Z", 30, criterion_logz_identity},
      {2, "exact sampler matches the Gibbs distribution", 60, criterion_exact_sampler},
      {3, "min-cut agrees with brute force on attractive grids", 10,
       criterion_solver_equivalence},
      {4, "sequential sampler matches the Gibbs distribution", 300,
       criterion_sequential_sampler},
      {5, "sample-mean deviations respect the concentration radius", 600,
       criterion_deviation_bound},
      {6, "ten samples beat one sample under the radius at every coupling", 600,
       criterion_error_vs_samples},
      {7, "deviation tails decay exponentially", 600, criterion_tail_decay},
      {8, "Gumbel Poincare inequality across the function suite", 10,
       criterion_gumbel_poincare},
      {9, "weighted Poincare specializations are tight and hold", 10,
       criterion_weighted_poincare},
      {10, "modified log-Sobolev constant and suite checks", 10, criterion_log_sobolev},
      {11, "perturbation gradients are argmax indicators", 5,
       criterion_gradient_indicator},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
      ok = criterion.run(note);
    } catch (const std::exception& e) {
      ok = false;
      note = fmt("exception: %s", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && seconds > criterion.time_limit_seconds) {
      ok = false;
      note += fmt(" [over the %.0fs time limit]", criterion.time_limit_seconds);
    }
    std::printf("[%s] criterion %2d: %s — %s [%.1fs]\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.title, note.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  std::printf("%d/%d criteria passed\n", static_cast<int>(criteria.size()) - failures,
              static_cast<int>(criteria.size()));
  return failures == 0 ? 0 : 1;
}
