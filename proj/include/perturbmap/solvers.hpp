#pragma once

#include <string>
#include <vector>

#include "perturbmap/model.hpp"

namespace perturbmap {

struct PerturbationTable;  // perturbation.hpp

enum class SolverKind { kBruteForce, kMinCut };

const char* solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);  // "brute" | "mincut"

struct MapResult {
  Configuration argmax;
  double value = 0.0;
  std::string solver_tag;
};

// argmax_x theta(x) + gamma(x) by exhaustive enumeration; perturb may be null
// (pure MAP), FULL, or LOWDIM. Ties break to the lexicographically smallest
// configuration. Throws ResourceLimitError over the cap and
// InfeasibleModelError when every configuration is forbidden.
MapResult map_bruteforce(const DiscreteModel& model,
                         const PerturbationTable* perturb = nullptr,
                         std::uint64_t cap = kDefaultEnumerationCap);

// Directed capacitated graph for max-flow / min-cut.
struct FlowEdge {
  int from = 0;
  int to = 0;
  double capacity = 0.0;
};

struct FlowNetwork {
  int node_count = 0;
  int source = 0;
  int sink = 0;
  std::vector<FlowEdge> edges;
};

struct MaxFlowResult {
  double flow_value = 0.0;
  // Minimum cut: nodes reachable from the source in the residual graph.
  std::vector<bool> source_side;
};

// Dinic's algorithm. Capacities must be finite and non-negative; parallel
// edges are allowed.
MaxFlowResult max_flow(const FlowNetwork& net);

// Exact MAP for binary pairwise models whose couplings all satisfy
// theta(a,a') + theta(b,b') >= theta(a,b') + theta(b,a') (attractive), via a
// single min-cut. perturb, when given, must be LOWDIM. Ties resolve to the
// same configuration map_bruteforce would return. Throws UnsupportedModelError
// for non-binary domains, repulsive couplings, forbidden lists, or FULL
// tables.
MapResult map_mincut(const DiscreteModel& model,
                     const PerturbationTable* perturb = nullptr);

}  // namespace perturbmap
