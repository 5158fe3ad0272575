#include "perturbmap/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace perturbmap {

namespace {

// Dedicated child-stream ids; replicate streams use 0,1,2,... so high ids
// stay collision-free.
constexpr std::uint64_t kModelStreamId = ~std::uint64_t{0} - 1;
constexpr std::uint64_t kHistogramStreamId = ~std::uint64_t{0} - 2;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void check_plan(const ExperimentPlan& plan) {
  if (plan.rows < 1 || plan.cols < 1) {
    throw std::invalid_argument("plan: rows and cols must be positive");
  }
  if (plan.coupling_grid.empty()) {
    throw std::invalid_argument("plan: coupling_grid must be non-empty");
  }
  for (double c : plan.coupling_grid) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("plan: couplings must be finite and non-negative");
    }
  }
  if (!(plan.histogram_coupling >= 0.0) || !std::isfinite(plan.histogram_coupling)) {
    throw std::invalid_argument("plan: histogram_coupling must be finite and non-negative");
  }
  if (plan.m_values.empty()) {
    throw std::invalid_argument("plan: m_values must be non-empty");
  }
  for (int m : plan.m_values) {
    if (m <= 0) throw std::invalid_argument("plan: m_values must be positive");
  }
  if (plan.replicates <= 0 || plan.reference_samples <= 0) {
    throw std::invalid_argument("plan: replicates and reference_samples must be positive");
  }
  if (plan.histogram_buckets < 1) {
    throw std::invalid_argument("plan: histogram_buckets must be positive");
  }
  if (!(plan.delta > 0.0 && plan.delta < 1.0)) {
    throw std::invalid_argument("plan: delta must lie in (0,1)");
  }
}

}  // namespace

DiscreteModel generate_spin_glass(const SpinGlassConfig& config, RngStream& rng) {
  if (config.rows < 1 || config.cols < 1) {
    throw std::invalid_argument("generate_spin_glass: rows and cols must be positive");
  }
  if (!(config.coupling >= 0.0) || !std::isfinite(config.coupling)) {
    throw std::invalid_argument("generate_spin_glass: coupling must be finite and non-negative");
  }
  const int n = config.rows * config.cols;
  DiscreteModel model(std::vector<std::vector<double>>(n, {-1.0, 1.0}));

  for (int i = 0; i < n; ++i) {
    const double theta = -1.0 + 2.0 * rng.next_unit_open();
    model.add_unary(i, 0, -theta);
    model.add_unary(i, 1, theta);
  }
  auto add_edge = [&](int i, int j) {
    const double w = config.coupling * rng.next_unit_open();
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double si = a == 0 ? -1.0 : 1.0;
        const double sj = b == 0 ? -1.0 : 1.0;
        model.add_pairwise(i, j, a, b, w * si * sj);
      }
    }
  };
  for (int r = 0; r < config.rows; ++r) {
    for (int c = 0; c < config.cols; ++c) {
      const int i = r * config.cols + c;
      if (c + 1 < config.cols) add_edge(i, i + 1);
      if (r + 1 < config.rows) add_edge(i, i + config.cols);
    }
  }
  return model;
}

ExperimentPlan plan_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("plan: expected a JSON object");
  ExperimentPlan plan;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "rows") {
        plan.rows = value.get<int>();
      } else if (key == "cols") {
        plan.cols = value.get<int>();
      } else if (key == "coupling_grid") {
        plan.coupling_grid = value.get<std::vector<double>>();
      } else if (key == "histogram_coupling") {
        plan.histogram_coupling = value.get<double>();
      } else if (key == "m_values") {
        plan.m_values = value.get<std::vector<int>>();
      } else if (key == "replicates") {
        plan.replicates = value.get<int>();
      } else if (key == "reference_samples") {
        plan.reference_samples = value.get<int>();
      } else if (key == "histogram_buckets") {
        plan.histogram_buckets = value.get<int>();
      } else if (key == "delta") {
        plan.delta = value.get<double>();
      } else if (key == "seed") {
        plan.seed = value.get<std::uint64_t>();
      } else if (key == "solver") {
        plan.solver = solver_from_name(value.get<std::string>());
      } else {
        throw std::invalid_argument("plan: unknown field '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("plan: bad value for '" + key + "': " + e.what());
    }
  }
  check_plan(plan);
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open plan file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cannot parse plan file " + path + ": " + e.what());
  }
  return plan_from_json(doc);
}

std::string run_error_vs_coupling(const ExperimentPlan& plan) {
  check_plan(plan);
  const RngStream master(plan.seed);
  std::string csv = "# perturbmap error-vs-coupling rows=" + std::to_string(plan.rows) +
                    " cols=" + std::to_string(plan.cols) +
                    " seed=" + std::to_string(plan.seed) + "\n";
  csv += "c,M,mean_abs_error,std_error,replicates,seed\n";

  for (std::size_t ci = 0; ci < plan.coupling_grid.size(); ++ci) {
    const double c = plan.coupling_grid[ci];
    const RngStream base = master.stream(ci);
    RngStream model_rng = base.stream(kModelStreamId);
    SpinGlassConfig sg{plan.rows, plan.cols, c, plan.seed};
    const DiscreteModel model = generate_spin_glass(sg, model_rng);
    const DeviationExperiment dev = deviation_experiment(
        model, plan.m_values, plan.replicates, plan.reference_samples, plan.solver, base);

    for (std::size_t mi = 0; mi < dev.m_values.size(); ++mi) {
      const auto& samples = dev.per_m[mi];
      double sum = 0.0;
      for (const auto& s : samples) sum += std::abs(s.deviation);
      const double mean_abs = sum / samples.size();
      double ss = 0.0;
      for (const auto& s : samples) {
        const double d = std::abs(s.deviation) - mean_abs;
        ss += d * d;
      }
      const double std_error =
          samples.size() > 1
              ? std::sqrt(ss / (samples.size() - 1.0) / samples.size())
              : 0.0;
      csv += format_number(c) + "," + std::to_string(dev.m_values[mi]) + "," +
             format_number(mean_abs) + "," + format_number(std_error) + "," +
             std::to_string(plan.replicates) + "," + std::to_string(plan.seed) + "\n";
    }
  }
  return csv;
}

std::string run_deviation_histogram(const ExperimentPlan& plan) {
  check_plan(plan);
  const RngStream master(plan.seed);
  const RngStream base = master.stream(kHistogramStreamId);
  RngStream model_rng = base.stream(kModelStreamId);
  SpinGlassConfig sg{plan.rows, plan.cols, plan.histogram_coupling, plan.seed};
  const DiscreteModel model = generate_spin_glass(sg, model_rng);
  const DeviationExperiment dev = deviation_experiment(
      model, plan.m_values, plan.replicates, plan.reference_samples, plan.solver, base);

  double r_max = 0.0;
  for (const auto& samples : dev.per_m) {
    for (const auto& s : samples) r_max = std::max(r_max, std::abs(s.deviation));
  }

  std::string csv = "# perturbmap deviation-histogram coupling=" +
                    format_number(plan.histogram_coupling) +
                    " seed=" + std::to_string(plan.seed) + "\n";
  csv += "M,r,exceed_count,replicates\n";
  for (std::size_t mi = 0; mi < dev.m_values.size(); ++mi) {
    const auto& samples = dev.per_m[mi];
    for (int k = 0; k <= plan.histogram_buckets; ++k) {
      const double r = r_max * k / plan.histogram_buckets;
      int count = 0;
      for (const auto& s : samples) {
        if (std::abs(s.deviation) >= r) ++count;
      }
      csv += std::to_string(dev.m_values[mi]) + "," + format_number(r) + "," +
             std::to_string(count) + "," + std::to_string(plan.replicates) + "\n";
    }
  }
  return csv;
}

TailFit fit_exceedance_tail(std::span<const double> radii, std::span<const int> counts,
                            int replicates) {
  if (radii.size() != counts.size()) {
    throw std::invalid_argument("fit_exceedance_tail: mismatched lengths");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] <= 0.0 || counts[i] <= 0 || counts[i] >= replicates) continue;
    xs.push_back(radii[i] * radii[i]);
    ys.push_back(std::log(static_cast<double>(counts[i])));
  }
  TailFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= fit.points;
  my /= fit.points;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace perturbmap
