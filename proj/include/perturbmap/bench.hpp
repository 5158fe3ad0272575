#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "perturbmap/model.hpp"
#include "perturbmap/perturbation.hpp"
#include "perturbmap/solvers.hpp"

namespace perturbmap {

struct SpinGlassConfig {
  int rows = 10;
  int cols = 10;
  double coupling = 1.0;  // couplings drawn uniformly from [0, coupling]
  std::uint64_t seed = 1;
};

// Grid spin model with domains {-1,+1}: unary score theta_i * s_i with
// theta_i uniform on [-1,1], and theta_ij * s_i * s_j over 4-neighbour edges
// with theta_ij uniform on [0, coupling] (all couplings exactly zero when
// coupling is 0, and always attractive otherwise). Draw order: every unary
// theta in variable order, then edges cell by cell in row-major order, right
// neighbour before down neighbour. config.seed is for callers constructing
// the stream; generation itself consumes rng.
DiscreteModel generate_spin_glass(const SpinGlassConfig& config, RngStream& rng);

// Knobs of the two benchmark experiments; parsed from a JSON plan document
// with the same field names (solver given as "brute"|"mincut").
struct ExperimentPlan {
  int rows = 10;
  int cols = 10;
  std::vector<double> coupling_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  double histogram_coupling = 1.0;
  std::vector<int> m_values = {1, 5, 10};
  int replicates = 100;
  int reference_samples = 1000;
  int histogram_buckets = 24;
  double delta = 0.05;
  std::uint64_t seed = 1;
  SolverKind solver = SolverKind::kMinCut;
};

ExperimentPlan plan_from_json(const nlohmann::json& doc);
ExperimentPlan load_plan_file(const std::string& path);

// Sweeps the coupling grid; per coupling, replicated sample means of the
// expected perturbed max are compared against a pooled reference mean.
// Returns CSV text (comment line, header
// c,M,mean_abs_error,std_error,replicates,seed, LF line ends, '.' decimals)
// with rows ordered by coupling then M.
std::string run_error_vs_coupling(const ExperimentPlan& plan);

// Exceedance histogram of |sample mean - reference mean| at the plan's
// histogram_coupling: for every M and every radius r on a shared grid of
// histogram_buckets+1 points spanning [0, max |deviation|], counts replicates
// with |deviation| >= r. CSV columns M,r,exceed_count,replicates.
std::string run_deviation_histogram(const ExperimentPlan& plan);

struct TailFit {
  double slope = 0.0;      // of log(count) against r^2
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Least-squares fit of log(exceed_count) against r^2 over the informative
// buckets (0 < count < replicates, r > 0). A sub-exponential deviation tail
// shows up as a good linear fit with negative slope.
TailFit fit_exceedance_tail(std::span<const double> radii, std::span<const int> counts,
                            int replicates);

}  // namespace perturbmap
