#include "perturbmap/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "perturbmap/concentration.hpp"
#include "perturbmap/errors.hpp"

namespace perturbmap {

PerturbationTable draw_perturbation(const DiscreteModel& model,
                                    PerturbationTable::Kind kind, RngStream& rng,
                                    std::uint64_t cap) {
  PerturbationTable table;
  table.kind = kind;
  if (kind == PerturbationTable::Kind::kFull) {
    model.require_enumerable(cap);
    const std::uint64_t count = model.configuration_count(cap);
    table.values.resize(count);
    for (std::uint64_t k = 0; k < count; ++k) table.values[k] = sample_gumbel(rng);
  } else {
    const int n = model.num_variables();
    table.offsets.resize(n + 1);
    table.offsets[0] = 0;
    for (int i = 0; i < n; ++i) {
      table.offsets[i + 1] = table.offsets[i] + model.domain_size(i);
    }
    table.values.resize(table.offsets[n]);
    for (double& v : table.values) v = sample_gumbel(rng);
  }
  return table;
}

void validate_table(const DiscreteModel& model, const PerturbationTable& table) {
  if (table.kind == PerturbationTable::Kind::kFull) {
    const std::uint64_t clamp = std::max<std::uint64_t>(table.values.size(), 1);
    if (model.configuration_count(clamp) != table.values.size()) {
      throw std::logic_error("perturbation table does not match model: full table has " +
                             std::to_string(table.values.size()) + " entries");
    }
    return;
  }
  const int n = model.num_variables();
  if (static_cast<int>(table.offsets.size()) != n + 1 || table.offsets[0] != 0) {
    throw std::logic_error("perturbation table does not match model: bad offsets");
  }
  for (int i = 0; i < n; ++i) {
    if (table.offsets[i + 1] - table.offsets[i] !=
        static_cast<std::size_t>(model.domain_size(i))) {
      throw std::logic_error(
          "perturbation table does not match model: wrong block size at variable " +
          std::to_string(i));
    }
  }
  if (table.values.size() != table.offsets[n]) {
    throw std::logic_error("perturbation table does not match model: wrong value count");
  }
}

double perturbation_value(const DiscreteModel& model, const PerturbationTable& table,
                          std::span<const std::int32_t> x) {
  validate_table(model, table);
  if (table.kind == PerturbationTable::Kind::kFull) {
    return table.values[configuration_rank(model, x)];
  }
  if (static_cast<int>(x.size()) != model.num_variables()) {
    throw std::invalid_argument("perturbation_value: wrong configuration length");
  }
  double total = 0.0;
  for (int i = 0; i < model.num_variables(); ++i) {
    if (x[i] < 0 || x[i] >= model.domain_size(i)) {
      throw std::invalid_argument("perturbation_value: label index out of range");
    }
    total += table.low_dim_entry(i, x[i]);
  }
  return total;
}

double perturbed_value(const DiscreteModel& model, const PerturbationTable& table,
                       std::span<const std::int32_t> x) {
  const double theta = model.potential(x);
  if (is_neg_inf(theta)) return kNegInf;
  return theta + perturbation_value(model, table, x);
}

namespace {

// Restriction of a full-model table to the suffix after a pinned prefix.
// FULL: configurations extending the prefix occupy a contiguous rank range
// whose order equals the slice's own enumeration order. LOWDIM: the suffix
// variables' blocks, so pinned variables contribute no noise.
PerturbationTable restrict_table(const DiscreteModel& model,
                                 std::span<const std::int32_t> prefix,
                                 const PerturbationTable& table,
                                 const DiscreteModel& slice) {
  PerturbationTable sub;
  sub.kind = table.kind;
  const int n = model.num_variables();
  const int p = static_cast<int>(prefix.size());
  if (table.kind == PerturbationTable::Kind::kFull) {
    std::uint64_t suffix_count = 1;
    for (int i = p; i < n; ++i) suffix_count *= model.domain_size(i);
    std::uint64_t base = 0;
    for (int i = 0; i < p; ++i) base = base * model.domain_size(i) + prefix[i];
    base *= suffix_count;
    sub.values.assign(table.values.begin() + base,
                      table.values.begin() + base + suffix_count);
    return sub;
  }
  const int m = slice.num_variables();
  sub.offsets.resize(m + 1);
  sub.offsets[0] = 0;
  for (int i = 0; i < m; ++i) {
    sub.offsets[i + 1] = sub.offsets[i] + slice.domain_size(i);
  }
  sub.values.assign(table.values.begin() + table.offsets[p], table.values.end());
  return sub;
}

}  // namespace

MapResult restricted_perturbed_map(const DiscreteModel& model,
                                   std::span<const std::int32_t> prefix,
                                   const PerturbationTable& table, SolverKind solver,
                                   std::uint64_t cap) {
  validate_table(model, table);
  DiscreteModel slice = conditional_slice(model, prefix);
  const PerturbationTable sub = restrict_table(model, prefix, table, slice);
  const MapResult inner = solver == SolverKind::kBruteForce
                              ? map_bruteforce(slice, &sub, cap)
                              : map_mincut(slice, &sub);
  MapResult out;
  out.value = inner.value;
  out.solver_tag = inner.solver_tag;
  out.argmax.assign(prefix.begin(), prefix.end());
  out.argmax.insert(out.argmax.end(), inner.argmax.begin(), inner.argmax.end());
  return out;
}

namespace {

// Feasible configurations of a slice, enumerated once so each estimator
// sample only sums fresh noise entries: with S configurations over m
// variables a sample costs O(S m) adds instead of a full slice + solve.
struct EnumeratedSlice {
  int n = 0;
  std::vector<std::size_t> offsets;   // per-variable block start, size n+1
  std::vector<double> scores;         // potential per feasible configuration
  std::vector<std::int32_t> labels;   // n label indices per configuration

  static EnumeratedSlice build(const DiscreteModel& slice, std::uint64_t cap) {
    slice.require_enumerable(cap);
    EnumeratedSlice out;
    out.n = slice.num_variables();
    out.offsets.resize(out.n + 1);
    out.offsets[0] = 0;
    for (int i = 0; i < out.n; ++i) {
      out.offsets[i + 1] = out.offsets[i] + slice.domain_size(i);
    }
    Configuration x = first_configuration(slice);
    do {
      const double v = slice.potential(x);
      if (is_neg_inf(v)) continue;
      out.scores.push_back(v);
      out.labels.insert(out.labels.end(), x.begin(), x.end());
    } while (next_configuration(slice, x));
    return out;
  }

  bool feasible() const { return !scores.empty(); }

  double max_value(std::span<const double> gamma) const {
    double best = kNegInf;
    const std::int32_t* lab = labels.data();
    for (std::size_t k = 0; k < scores.size(); ++k, lab += n) {
      double v = scores[k];
      for (int i = 0; i < n; ++i) v += gamma[offsets[i] + lab[i]];
      if (v > best) best = v;
    }
    return best;
  }
};

}  // namespace

EstimateReport estimate_expected_vj(const DiscreteModel& model,
                                    std::span<const std::int32_t> prefix,
                                    int sample_count, double delta, SolverKind solver,
                                    RngStream& rng, bool retain_samples,
                                    std::uint64_t cap) {
  if (sample_count <= 0) {
    throw std::invalid_argument("estimate_expected_vj: sample_count must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("estimate_expected_vj: delta must lie in (0,1)");
  }
  const DiscreteModel slice = conditional_slice(model, prefix);
  const int free_vars = slice.num_variables();

  EstimateReport report;
  report.prefix.assign(prefix.begin(), prefix.end());
  report.sample_count = sample_count;
  report.delta = delta;
  report.radius = corollary2_bound(BoundParams{.a_squared = static_cast<double>(free_vars),
                                               .b = 1.0,
                                               .sample_count = sample_count,
                                               .delta = delta});

  if (free_vars == 0) {
    // Nothing left to perturb: every sample equals the pinned configuration's
    // score (the -inf sentinel included, when the prefix is forbidden).
    const double v = slice.potential({});
    report.sample_mean = v;
    if (retain_samples) report.samples.assign(sample_count, v);
    return report;
  }

  if (retain_samples) report.samples.reserve(sample_count);
  double acc = 0.0;

  if (solver == SolverKind::kBruteForce) {
    const EnumeratedSlice enumerated = EnumeratedSlice::build(slice, cap);
    if (!enumerated.feasible()) {
      // Every extension of the prefix is forbidden; the restricted max is
      // identically -inf and no noise needs to be drawn.
      report.sample_mean = kNegInf;
      if (retain_samples) report.samples.assign(sample_count, kNegInf);
      return report;
    }
    std::vector<double> gamma(enumerated.offsets.back());
    for (int m = 0; m < sample_count; ++m) {
      for (double& g : gamma) g = sample_gumbel(rng);
      const double v = enumerated.max_value(gamma);
      acc += v;
      if (retain_samples) report.samples.push_back(v);
    }
  } else {
    for (int m = 0; m < sample_count; ++m) {
      const PerturbationTable table =
          draw_perturbation(slice, PerturbationTable::Kind::kLowDim, rng, cap);
      const double v = map_mincut(slice, &table).value;
      acc += v;
      if (retain_samples) report.samples.push_back(v);
    }
  }

  report.sample_mean = acc / sample_count;
  return report;
}

DeviationExperiment deviation_experiment(const DiscreteModel& model,
                                         std::span<const int> m_values, int replicates,
                                         int reference_samples, SolverKind solver,
                                         const RngStream& rng, std::uint64_t cap) {
  if (m_values.empty()) {
    throw std::invalid_argument("deviation_experiment: need at least one M value");
  }
  for (int m : m_values) {
    if (m <= 0) throw std::invalid_argument("deviation_experiment: M values must be positive");
  }
  if (replicates <= 0 || reference_samples <= 0) {
    throw std::invalid_argument("deviation_experiment: counts must be positive");
  }

  const int max_m = *std::max_element(m_values.begin(), m_values.end());

  DeviationExperiment out;
  out.m_values.assign(m_values.begin(), m_values.end());
  out.per_m.resize(m_values.size());
  out.reference_samples = reference_samples;

  RngStream ref_rng = rng.stream(kReferenceStreamId);
  const EstimateReport ref = estimate_expected_vj(model, {}, reference_samples, 0.5,
                                                  solver, ref_rng,
                                                  /*retain_samples=*/true, cap);
  out.reference_mean = ref.sample_mean;
  if (reference_samples > 1 && std::isfinite(ref.sample_mean)) {
    double ss = 0.0;
    for (double v : ref.samples) {
      const double d = v - ref.sample_mean;
      ss += d * d;
    }
    out.reference_std_error = std::sqrt(ss / (reference_samples - 1)) /
                              std::sqrt(static_cast<double>(reference_samples));
  }

  for (int rep = 0; rep < replicates; ++rep) {
    RngStream rep_rng = rng.stream(static_cast<std::uint64_t>(rep));
    const EstimateReport draws = estimate_expected_vj(model, {}, max_m, 0.5, solver,
                                                      rep_rng, /*retain_samples=*/true, cap);
    // Sequential draws: the mean at a smaller M is a prefix mean of the same
    // replicate's draw sequence.
    double running = 0.0;
    std::vector<double> prefix_mean(max_m + 1, 0.0);
    for (int k = 1; k <= max_m; ++k) {
      running += draws.samples[k - 1];
      prefix_mean[k] = running / k;
    }
    for (std::size_t mi = 0; mi < out.m_values.size(); ++mi) {
      const int m = out.m_values[mi];
      DeviationSample s;
      s.m = m;
      s.mean = prefix_mean[m];
      s.deviation = s.mean - out.reference_mean;
      out.per_m[mi].push_back(s);
    }
  }
  return out;
}

}  // namespace perturbmap
