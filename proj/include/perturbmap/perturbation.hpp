#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perturbmap/gumbel.hpp"
#include "perturbmap/model.hpp"
#include "perturbmap/solvers.hpp"

namespace perturbmap {

// Gumbel noise attached to a model. FULL holds one value per configuration
// (indexed by lexicographic rank); LOWDIM holds one value per (variable,
// label) and gamma(x) is the sum of the selected entries.
struct PerturbationTable {
  enum class Kind { kFull, kLowDim };

  Kind kind = Kind::kLowDim;
  std::vector<double> values;
  // LOWDIM only: values[offsets[i] + label] is variable i's entry; size n+1.
  std::vector<std::size_t> offsets;

  double low_dim_entry(int var, std::int32_t label_index) const {
    return values[offsets[var] + static_cast<std::size_t>(label_index)];
  }
};

// Fresh i.i.d. zero-mean Gumbel entries, drawn in deterministic order (FULL:
// lexicographic configuration rank; LOWDIM: by variable, then label). FULL
// respects the enumeration cap.
PerturbationTable draw_perturbation(const DiscreteModel& model,
                                    PerturbationTable::Kind kind, RngStream& rng,
                                    std::uint64_t cap = kDefaultEnumerationCap);

// Throws std::logic_error when the table's shape does not match the model.
void validate_table(const DiscreteModel& model, const PerturbationTable& table);

// gamma(x). Throws std::logic_error if the table's shape does not match the
// model (a corrupt table is a programming error, not bad input).
double perturbation_value(const DiscreteModel& model, const PerturbationTable& table,
                          std::span<const std::int32_t> x);

// theta(x) + gamma(x); kNegInf exactly when x is forbidden.
double perturbed_value(const DiscreteModel& model, const PerturbationTable& table,
                       std::span<const std::int32_t> x);

// Max of the perturbed model over all configurations extending a pinned
// prefix (an empty prefix maxes over everything; a full prefix evaluates one
// configuration). The table covers the full model; only suffix-variable
// entries (LOWDIM) or prefix-compatible configurations (FULL) participate.
// The returned argmax is a full configuration beginning with the prefix.
MapResult restricted_perturbed_map(const DiscreteModel& model,
                                   std::span<const std::int32_t> prefix,
                                   const PerturbationTable& table, SolverKind solver,
                                   std::uint64_t cap = kDefaultEnumerationCap);

// Sample-mean estimate of the expected restricted perturbed max after a
// pinned prefix: each of the sample_count samples draws a fresh LOWDIM suffix
// perturbation and solves the restricted MAP. The radius is the one-sided
// concentration bound at confidence delta with a^2 = number of unpinned
// variables and b = 1.
struct EstimateReport {
  Configuration prefix;
  double sample_mean = 0.0;
  int sample_count = 0;
  double delta = 0.0;
  double radius = 0.0;
  std::vector<double> samples;  // filled only when retain_samples is set
};

EstimateReport estimate_expected_vj(const DiscreteModel& model,
                                    std::span<const std::int32_t> prefix,
                                    int sample_count, double delta, SolverKind solver,
                                    RngStream& rng, bool retain_samples = false,
                                    std::uint64_t cap = kDefaultEnumerationCap);

// One replicate's deviation of a sample mean from the pooled reference mean.
struct DeviationSample {
  int m = 0;            // samples averaged in this replicate
  double mean = 0.0;    // replicate's sample mean of V_1
  double deviation = 0.0;  // mean - reference_mean
};

struct DeviationExperiment {
  double reference_mean = 0.0;
  double reference_std_error = 0.0;  // sample std of reference draws / sqrt(count)
  int reference_samples = 0;
  std::vector<int> m_values;
  std::vector<std::vector<DeviationSample>> per_m;  // parallel to m_values
};

// Stream id reserved for the reference estimate inside deviation_experiment;
// replicate indices use 0, 1, 2, ... and can never collide with it.
inline constexpr std::uint64_t kReferenceStreamId = ~std::uint64_t{0};

// Replicated estimates of E[V_1] (empty prefix) against a high-sample
// reference mean. Replicate k draws from rng.stream(k); within a replicate
// draws are sequential, so the mean at a smaller M is a prefix of the mean at
// a larger M. The reference uses its own dedicated stream.
DeviationExperiment deviation_experiment(const DiscreteModel& model,
                                         std::span<const int> m_values, int replicates,
                                         int reference_samples, SolverKind solver,
                                         const RngStream& rng,
                                         std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace perturbmap
