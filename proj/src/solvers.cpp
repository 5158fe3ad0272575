#include "perturbmap/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "perturbmap/errors.hpp"
#include "perturbmap/perturbation.hpp"

namespace perturbmap {

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kBruteForce: return "brute";
    case SolverKind::kMinCut: return "mincut";
  }
  return "unknown";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "brute") return SolverKind::kBruteForce;
  if (name == "mincut") return SolverKind::kMinCut;
  throw std::invalid_argument("unknown solver '" + name + "' (expected brute|mincut)");
}

MapResult map_bruteforce(const DiscreteModel& model, const PerturbationTable* perturb,
                         std::uint64_t cap) {
  model.require_enumerable(cap);
  if (perturb != nullptr) validate_table(model, *perturb);

  MapResult best;
  best.value = kNegInf;
  best.solver_tag = "brute";
  bool found = false;

  Configuration x = first_configuration(model);
  std::uint64_t rank = 0;
  do {
    const double theta = model.potential(x);
    if (!is_neg_inf(theta)) {
      double v = theta;
      if (perturb != nullptr) {
        if (perturb->kind == PerturbationTable::Kind::kFull) {
          v += perturb->values[rank];
        } else {
          for (int i = 0; i < model.num_variables(); ++i) {
            v += perturb->low_dim_entry(i, x[i]);
          }
        }
      }
      // Strict improvement only: enumeration is lexicographic, so ties keep
      // the lexicographically smallest configuration.
      if (!found || v > best.value) {
        best.value = v;
        best.argmax = x;
        found = true;
      }
    }
    ++rank;
  } while (next_configuration(model, x));

  if (!found) throw InfeasibleModelError("every configuration is forbidden");
  return best;
}

namespace {

// Residual capacities below this are treated as exhausted when classifying
// cut sides.
constexpr double kResidualEps = 1e-12;

// Couplings may violate the attractiveness inequality by at most this much
// (accumulated rounding) before the model is rejected.
constexpr double kSubmodularTol = 1e-9;

class Dinic {
 public:
  explicit Dinic(int n) : adj_(n), level_(n), iter_(n) {}

  void add_edge(int u, int v, double cap) {
    if (u == v) return;  // self-loops never cross a cut
    adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, 0.0, static_cast<int>(adj_[u].size()) - 1});
  }

  double run(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

  // Nodes reachable from s along residual capacity.
  std::vector<bool> reachable_from(int s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<int> q;
    seen[s] = true;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& a : adj_[u]) {
        if (a.cap > kResidualEps && !seen[a.to]) {
          seen[a.to] = true;
          q.push(a.to);
        }
      }
    }
    return seen;
  }

  // Nodes from which t is reachable along residual capacity. An arc u->v with
  // residual capacity appears here as v "reaching backwards" to u, which is
  // exactly the reverse arc's residual view.
  std::vector<bool> reaching(int t) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<int> q;
    seen[t] = true;
    q.push(t);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      // For each arc v->u, the paired reverse arc u->v has residual capacity
      // adj_[u][rev].cap; if positive, u reaches t through v.
      for (const auto& a : adj_[v]) {
        const int u = a.to;
        if (seen[u]) continue;
        if (adj_[u][a.rev].cap > kResidualEps) {
          seen[u] = true;
          q.push(u);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    double cap;
    int rev;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& a : adj_[u]) {
        if (a.cap > kResidualEps && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& i = iter_[u]; i < static_cast<int>(adj_[u].size()); ++i) {
      Arc& a = adj_[u][i];
      if (a.cap <= kResidualEps || level_[a.to] != level_[u] + 1) continue;
      const double pushed = dfs(a.to, t, std::min(limit, a.cap));
      if (pushed > 0.0) {
        a.cap -= pushed;
        adj_[a.to][a.rev].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace

MaxFlowResult max_flow(const FlowNetwork& net) {
  if (net.node_count <= 0) throw std::invalid_argument("max_flow: empty network");
  if (net.source < 0 || net.source >= net.node_count || net.sink < 0 ||
      net.sink >= net.node_count || net.source == net.sink) {
    throw std::invalid_argument("max_flow: bad source/sink");
  }
  Dinic dinic(net.node_count);
  for (const auto& e : net.edges) {
    if (e.from < 0 || e.from >= net.node_count || e.to < 0 || e.to >= net.node_count) {
      throw std::invalid_argument("max_flow: edge endpoint out of range");
    }
    if (!std::isfinite(e.capacity) || e.capacity < 0.0) {
      throw std::invalid_argument("max_flow: capacities must be finite and non-negative");
    }
    dinic.add_edge(e.from, e.to, e.capacity);
  }
  MaxFlowResult result;
  result.flow_value = dinic.run(net.source, net.sink);
  result.source_side = dinic.reachable_from(net.source);
  return result;
}

MapResult map_mincut(const DiscreteModel& model, const PerturbationTable* perturb) {
  const int n = model.num_variables();
  if (!model.forbidden().empty()) {
    throw UnsupportedModelError("map_mincut: forbidden configurations not supported");
  }
  for (int i = 0; i < n; ++i) {
    if (model.domain_size(i) != 2) {
      throw UnsupportedModelError("map_mincut: all domains must be binary");
    }
  }
  if (perturb != nullptr) {
    if (perturb->kind != PerturbationTable::Kind::kLowDim) {
      throw UnsupportedModelError("map_mincut: only low-dimensional perturbations");
    }
    validate_table(model, *perturb);
  }

  MapResult result;
  result.solver_tag = "mincut";
  if (n == 0) {
    result.value = model.potential({});
    return result;
  }

  // Energy minimization: E(x) = -(theta(x) + gamma(x)) up to a constant.
  // Nodes 0..n-1 are variables, n is the source, n+1 the sink; a variable on
  // the sink side of the cut takes label index 1.
  const int source = n;
  const int sink = n + 1;
  Dinic dinic(n + 2);

  std::vector<double> coef(n, 0.0);  // energy of label 1 minus energy of label 0
  for (int i = 0; i < n; ++i) {
    double e0 = -model.unary(i, 0);
    double e1 = -model.unary(i, 1);
    if (perturb != nullptr) {
      e0 -= perturb->low_dim_entry(i, 0);
      e1 -= perturb->low_dim_entry(i, 1);
    }
    coef[i] = e1 - e0;
  }

  for (const auto& f : model.pairwise_factors()) {
    const double ea = -f.score(0, 0);
    const double eb = -f.score(0, 1);
    const double ec = -f.score(1, 0);
    const double ed = -f.score(1, 1);
    // E(xi,xj) = ea + (ec-ea) xi + (ed-ec) xj + w (1-xi) xj with
    // w = eb + ec - ea - ed; attractiveness makes w >= 0.
    double w = eb + ec - ea - ed;
    if (w < -kSubmodularTol) {
      throw UnsupportedModelError("map_mincut: coupling between variables " +
                                  std::to_string(f.var_i) + " and " +
                                  std::to_string(f.var_j) + " is not attractive");
    }
    if (w < 0.0) w = 0.0;
    coef[f.var_i] += ec - ea;
    coef[f.var_j] += ed - ec;
    if (w > 0.0) dinic.add_edge(f.var_i, f.var_j, w);
  }

  for (int i = 0; i < n; ++i) {
    if (coef[i] > 0.0) {
      dinic.add_edge(source, i, coef[i]);  // cut when i takes label 1
    } else if (coef[i] < 0.0) {
      dinic.add_edge(i, sink, -coef[i]);  // cut when i takes label 0
    }
  }

  dinic.run(source, sink);

  // Among all minimum cuts, take the one whose sink side is smallest (nodes
  // that still reach the sink in the residual graph). That is the
  // coordinatewise-minimal optimal labeling, hence the lexicographically
  // smallest one -- the same tie-break map_bruteforce applies.
  const std::vector<bool> to_sink = dinic.reaching(sink);
  result.argmax.assign(n, 0);
  for (int i = 0; i < n; ++i) result.argmax[i] = to_sink[i] ? 1 : 0;

  // Recover the objective exactly from the model rather than from flow
  // arithmetic, so the reported value carries no graph-construction constants.
  result.value = model.potential(result.argmax);
  if (perturb != nullptr) {
    result.value = perturbed_value(model, *perturb, result.argmax);
  }
  return result;
}

}  // namespace perturbmap
