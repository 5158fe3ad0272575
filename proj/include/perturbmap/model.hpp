#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perturbmap/extended_real.hpp"

namespace perturbmap {

// One label index per variable, in variable order. Indices point into each
// variable's domain; the domain stores the user-facing label values.
using Configuration = std::vector<std::int32_t>;

// Default ceiling on |X| for operations that enumerate all configurations.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

// Score table attached to an ordered variable pair (var_i < var_j),
// row-major over (label_i, label_j).
struct PairwiseFactor {
  std::int32_t var_i = 0;
  std::int32_t var_j = 0;
  std::int32_t size_i = 0;
  std::int32_t size_j = 0;
  std::vector<double> table;

  double score(std::int32_t label_i, std::int32_t label_j) const {
    return table[static_cast<std::size_t>(label_i) * size_j + label_j];
  }
  double& score(std::int32_t label_i, std::int32_t label_j) {
    return table[static_cast<std::size_t>(label_i) * size_j + label_j];
  }
};

// Discrete potential function theta over X = X_1 x ... x X_n, stored as a
// constant offset plus unary and pairwise score tables, with an optional
// explicit list of forbidden configurations (score -inf). All stored scores
// are finite; the -inf sentinel only ever arises from the forbidden list.
class DiscreteModel {
 public:
  // domains[i] lists variable i's label values (at least one label each).
  explicit DiscreteModel(std::vector<std::vector<double>> domains);

  int num_variables() const { return static_cast<int>(domains_.size()); }
  int domain_size(int var) const;
  const std::vector<double>& domain(int var) const;
  double label_value(int var, std::int32_t label_index) const;
  // Index of an exactly matching label value; throws if absent.
  std::int32_t label_index(int var, double label_value) const;

  // Score mutation; repeated calls on the same cell accumulate.
  void add_constant(double score);
  void add_unary(int var, std::int32_t label_index, double score);
  void add_pairwise(int var_i, int var_j, std::int32_t label_i, std::int32_t label_j,
                    double score);
  void forbid(const Configuration& x);

  double constant() const { return constant_; }
  double unary(int var, std::int32_t label_index) const;
  const std::vector<PairwiseFactor>& pairwise_factors() const { return pairwise_; }
  const std::vector<Configuration>& forbidden() const { return forbidden_; }
  bool is_forbidden(std::span<const std::int32_t> x) const;

  // Sum of domain sizes (the length of a per-variable, per-label table).
  std::size_t total_label_count() const;

  // |X| clamped to cap+1 so callers can test "fits under cap" without overflow.
  std::uint64_t configuration_count(std::uint64_t cap = kDefaultEnumerationCap) const;
  // Throws ResourceLimitError when |X| exceeds cap.
  void require_enumerable(std::uint64_t cap = kDefaultEnumerationCap) const;

  // theta(x): constant + unary + pairwise sums, or kNegInf when x is
  // forbidden. Throws std::invalid_argument on wrong length or out-of-range
  // label indices.
  double potential(std::span<const std::int32_t> x) const;

 private:
  void check_var(int var) const;
  void check_config(std::span<const std::int32_t> x) const;

  std::vector<std::vector<double>> domains_;
  double constant_ = 0.0;
  std::vector<std::vector<double>> unary_;     // [var][label_index]
  std::vector<PairwiseFactor> pairwise_;       // ordered by insertion of new pairs
  std::vector<Configuration> forbidden_;       // sorted, unique
};

// Lexicographic enumeration of X: all-zeros start, next_configuration advances
// in place and returns false once the sequence wraps back to the start.
Configuration first_configuration(const DiscreteModel& model);
bool next_configuration(const DiscreteModel& model, Configuration& x);

// Position of x in the lexicographic enumeration.
std::uint64_t configuration_rank(const DiscreteModel& model, std::span<const std::int32_t> x);

// log Z = log sum_x exp(theta(x)) by exhaustive enumeration.
// Throws ResourceLimitError over the cap, InfeasibleModelError when every
// configuration is forbidden.
double log_partition_exact(const DiscreteModel& model,
                           std::uint64_t cap = kDefaultEnumerationCap);

// exp(theta(x)) / Z; zero for forbidden x.
double gibbs_probability(const DiscreteModel& model, const Configuration& x,
                         std::uint64_t cap = kDefaultEnumerationCap);

// Model over variables prefix.size()..n-1 whose potential of any suffix s
// equals potential(prefix ++ s) in the original model, forbidden
// configurations included. prefix may be empty (copy) or full length
// (zero-variable model whose single empty configuration scores
// potential(prefix)).
DiscreteModel conditional_slice(const DiscreteModel& model,
                                std::span<const std::int32_t> prefix);

}  // namespace perturbmap
