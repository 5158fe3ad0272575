#include "perturbmap/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "perturbmap/errors.hpp"

namespace perturbmap {

Configuration sample_exact(const DiscreteModel& model, RngStream& rng,
                           std::uint64_t cap) {
  const PerturbationTable table =
      draw_perturbation(model, PerturbationTable::Kind::kFull, rng, cap);
  return map_bruteforce(model, &table, cap).argmax;
}

int EstimatorConfig::samples_for_step(int step) const {
  if (m_schedule.empty()) {
    throw std::invalid_argument("EstimatorConfig: empty sample-count schedule");
  }
  const std::size_t i = std::min<std::size_t>(step, m_schedule.size() - 1);
  const int m = m_schedule[i];
  if (m <= 0) {
    throw std::invalid_argument("EstimatorConfig: sample counts must be positive");
  }
  return m;
}

double ratio_from_estimates(double mean_next, double mean_curr) {
  if (is_neg_inf(mean_next)) return 0.0;
  if (is_neg_inf(mean_curr)) return 1.0;  // unreachable when estimates are consistent
  return std::min(1.0, std::exp(mean_next - mean_curr));
}

SequentialStepDistribution finalize_step_distribution(int step,
                                                      std::vector<double> ratios) {
  SequentialStepDistribution dist;
  dist.step = step;
  dist.probs = std::move(ratios);
  double total = 0.0;
  for (double& p : dist.probs) {
    if (!std::isfinite(p)) throw std::invalid_argument("step ratios must be finite");
    if (p > 1.0 || p < 0.0) dist.clamped = true;
    p = std::clamp(p, 0.0, 1.0);
    total += p;
  }
  if (total > 1.0) {
    for (double& p : dist.probs) p /= total;
    dist.restart_prob = 0.0;
    dist.clamped = true;
  } else {
    dist.restart_prob = 1.0 - total;
  }
  return dist;
}

SequentialStepDistribution step_distribution(const DiscreteModel& model,
                                             std::span<const std::int32_t> prefix,
                                             const EstimatorConfig& config,
                                             RngStream& rng, SamplerTrace* trace) {
  const int n = model.num_variables();
  const int step = static_cast<int>(prefix.size());
  if (step >= n) {
    throw std::invalid_argument("step_distribution: every variable is already pinned");
  }
  const int m = config.samples_for_step(step);

  auto record = [&](const EstimateReport& report) {
    if (trace != nullptr) {
      trace->estimates.push_back(report);
      trace->solver_calls += static_cast<std::uint64_t>(report.sample_count);
    }
  };

  const EstimateReport current = estimate_expected_vj(
      model, prefix, m, config.delta, config.solver, rng, false, config.enumeration_cap);
  record(current);

  Configuration extended(prefix.begin(), prefix.end());
  extended.push_back(0);
  std::vector<double> ratios(model.domain_size(step));
  for (std::int32_t label = 0; label < model.domain_size(step); ++label) {
    extended.back() = label;
    const EstimateReport next =
        estimate_expected_vj(model, extended, m, config.delta, config.solver, rng, false,
                             config.enumeration_cap);
    record(next);
    ratios[label] = ratio_from_estimates(next.sample_mean, current.sample_mean);
  }

  SequentialStepDistribution dist = finalize_step_distribution(step, std::move(ratios));
  if (trace != nullptr) trace->steps.push_back(dist);
  return dist;
}

SamplerTrace sample_sequential(const DiscreteModel& model, const EstimatorConfig& config,
                               RngStream& rng, int max_restarts) {
  if (max_restarts < 0) {
    throw std::invalid_argument("sample_sequential: max_restarts must be non-negative");
  }
  SamplerTrace trace;
  const int n = model.num_variables();
  if (n == 0) {
    trace.sample = Configuration{};
    return trace;
  }

  Configuration prefix;
  prefix.reserve(n);
  for (;;) {
    const SequentialStepDistribution dist =
        step_distribution(model, prefix, config, rng, &trace);

    const double u = rng.next_unit_open();
    double acc = 0.0;
    int chosen = -1;
    for (std::size_t label = 0; label < dist.probs.size(); ++label) {
      acc += dist.probs[label];
      if (u <= acc) {
        chosen = static_cast<int>(label);
        break;
      }
    }
    if (chosen < 0 && dist.restart_prob == 0.0) {
      // Rounding left a sliver of unassigned mass; fold it into the last
      // label that carries probability.
      for (int label = static_cast<int>(dist.probs.size()) - 1; label >= 0; --label) {
        if (dist.probs[label] > 0.0) {
          chosen = label;
          break;
        }
      }
    }

    if (chosen < 0) {
      if (trace.restart_count >= max_restarts) {
        trace.budget_exhausted = true;
        return trace;
      }
      ++trace.restart_count;
      prefix.clear();
      continue;
    }

    prefix.push_back(chosen);
    if (static_cast<int>(prefix.size()) == n) {
      trace.sample = prefix;
      return trace;
    }
  }
}

}  // namespace perturbmap
