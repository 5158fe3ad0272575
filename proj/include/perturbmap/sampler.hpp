#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perturbmap/model.hpp"
#include "perturbmap/perturbation.hpp"
#include "perturbmap/solvers.hpp"

namespace perturbmap {

// One exact Gibbs draw: a fresh full-table perturbation's argmax follows the
// Gibbs distribution of the model. Enumerates X, so the cap applies.
Configuration sample_exact(const DiscreteModel& model, RngStream& rng,
                           std::uint64_t cap = kDefaultEnumerationCap);

// Distribution the sequential sampler draws from at one step: a probability
// per label of the step's variable plus a restart probability.
struct SequentialStepDistribution {
  int step = 0;  // variable index being sampled
  std::vector<double> probs;
  double restart_prob = 0.0;
  // Set when the raw ratios needed correction: an individual ratio exceeded 1,
  // or their total exceeded 1 and the whole vector was renormalized.
  bool clamped = false;
};

// How the per-step estimates are produced. The schedule lists sample counts
// per step; the last entry repeats for any deeper steps.
struct EstimatorConfig {
  std::vector<int> m_schedule = {100};
  double delta = 0.05;
  SolverKind solver = SolverKind::kBruteForce;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;

  int samples_for_step(int step) const;
};

struct SamplerTrace {
  // Unset when the restart budget ran out before a full configuration.
  std::optional<Configuration> sample;
  int restart_count = 0;
  bool budget_exhausted = false;
  std::vector<SequentialStepDistribution> steps;  // every step of every attempt
  std::vector<EstimateReport> estimates;          // every estimator call, in order
  // Restricted-max evaluations: one per estimator sample, so each executed
  // step adds (1 + domain size) * M_step.
  std::uint64_t solver_calls = 0;
};

// exp(mean_next - mean_curr) clamped into [0,1]; -inf estimates (infeasible
// extensions) give probability 0.
double ratio_from_estimates(double mean_next, double mean_curr);

// Clamps each raw ratio into [0,1]; if the clamped ratios sum past 1 they are
// rescaled to a proper distribution (restart probability 0), otherwise the
// shortfall becomes the restart probability.
SequentialStepDistribution finalize_step_distribution(int step,
                                                      std::vector<double> ratios);

// The step distribution for the next unpinned variable: estimates the
// expected restricted max once for the prefix and once per candidate label
// (fresh noise each estimate, all at the step's sample count), then forms
// clamped ratios. Appends estimates/steps/solver_calls to trace when given.
SequentialStepDistribution step_distribution(const DiscreteModel& model,
                                             std::span<const std::int32_t> prefix,
                                             const EstimatorConfig& config,
                                             RngStream& rng,
                                             SamplerTrace* trace = nullptr);

// Sequential sampler with restarts: walks variables in order drawing from
// step distributions; drawing the restart outcome abandons the attempt and
// starts over. Stops with budget_exhausted after max_restarts restarts.
SamplerTrace sample_sequential(const DiscreteModel& model, const EstimatorConfig& config,
                               RngStream& rng, int max_restarts = 1000);

}  // namespace perturbmap
