#include "perturbmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "perturbmap/errors.hpp"

namespace perturbmap {

namespace {

void check_finite(double score, const char* where) {
  if (!std::isfinite(score)) {
    throw std::invalid_argument(std::string(where) + ": score must be finite");
  }
}

}  // namespace

DiscreteModel::DiscreteModel(std::vector<std::vector<double>> domains)
    : domains_(std::move(domains)) {
  // A zero-variable model is legal (it arises from full-length conditional
  // slices); it has exactly one, empty, configuration.
  unary_.reserve(domains_.size());
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    const auto& dom = domains_[i];
    if (dom.empty()) {
      throw std::invalid_argument("domain " + std::to_string(i) + " is empty");
    }
    for (double v : dom) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("domain " + std::to_string(i) +
                                    " contains a non-finite label value");
      }
    }
    unary_.emplace_back(dom.size(), 0.0);
  }
}

void DiscreteModel::check_var(int var) const {
  if (var < 0 || var >= num_variables()) {
    throw std::invalid_argument("variable index " + std::to_string(var) +
                                " out of range [0," + std::to_string(num_variables()) + ")");
  }
}

int DiscreteModel::domain_size(int var) const {
  check_var(var);
  return static_cast<int>(domains_[var].size());
}

const std::vector<double>& DiscreteModel::domain(int var) const {
  check_var(var);
  return domains_[var];
}

double DiscreteModel::label_value(int var, std::int32_t label_index) const {
  check_var(var);
  if (label_index < 0 || label_index >= static_cast<std::int32_t>(domains_[var].size())) {
    throw std::invalid_argument("label index out of range for variable " +
                                std::to_string(var));
  }
  return domains_[var][label_index];
}

std::int32_t DiscreteModel::label_index(int var, double label) const {
  check_var(var);
  const auto& dom = domains_[var];
  for (std::size_t k = 0; k < dom.size(); ++k) {
    if (dom[k] == label) return static_cast<std::int32_t>(k);
  }
  throw std::invalid_argument("label " + std::to_string(label) +
                              " not in domain of variable " + std::to_string(var));
}

void DiscreteModel::add_constant(double score) {
  check_finite(score, "add_constant");
  constant_ += score;
}

void DiscreteModel::add_unary(int var, std::int32_t label_index, double score) {
  check_finite(score, "add_unary");
  check_var(var);
  if (label_index < 0 || label_index >= static_cast<std::int32_t>(domains_[var].size())) {
    throw std::invalid_argument("add_unary: label index out of range");
  }
  unary_[var][label_index] += score;
}

void DiscreteModel::add_pairwise(int var_i, int var_j, std::int32_t label_i,
                                 std::int32_t label_j, double score) {
  check_finite(score, "add_pairwise");
  check_var(var_i);
  check_var(var_j);
  if (var_i >= var_j) {
    throw std::invalid_argument("add_pairwise: requires var_i < var_j");
  }
  if (label_i < 0 || label_i >= static_cast<std::int32_t>(domains_[var_i].size()) ||
      label_j < 0 || label_j >= static_cast<std::int32_t>(domains_[var_j].size())) {
    throw std::invalid_argument("add_pairwise: label index out of range");
  }
  for (auto& f : pairwise_) {
    if (f.var_i == var_i && f.var_j == var_j) {
      f.score(label_i, label_j) += score;
      return;
    }
  }
  PairwiseFactor f;
  f.var_i = var_i;
  f.var_j = var_j;
  f.size_i = static_cast<std::int32_t>(domains_[var_i].size());
  f.size_j = static_cast<std::int32_t>(domains_[var_j].size());
  f.table.assign(static_cast<std::size_t>(f.size_i) * f.size_j, 0.0);
  f.score(label_i, label_j) = score;
  pairwise_.push_back(std::move(f));
}

void DiscreteModel::forbid(const Configuration& x) {
  check_config(x);
  auto it = std::lower_bound(forbidden_.begin(), forbidden_.end(), x);
  if (it != forbidden_.end() && *it == x) return;
  forbidden_.insert(it, x);
}

double DiscreteModel::unary(int var, std::int32_t label_index) const {
  check_var(var);
  if (label_index < 0 || label_index >= static_cast<std::int32_t>(domains_[var].size())) {
    throw std::invalid_argument("unary: label index out of range");
  }
  return unary_[var][label_index];
}

bool DiscreteModel::is_forbidden(std::span<const std::int32_t> x) const {
  if (forbidden_.empty()) return false;
  auto it = std::lower_bound(
      forbidden_.begin(), forbidden_.end(), x,
      [](const Configuration& a, std::span<const std::int32_t> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      });
  return it != forbidden_.end() && std::equal(it->begin(), it->end(), x.begin(), x.end());
}

std::size_t DiscreteModel::total_label_count() const {
  std::size_t total = 0;
  for (const auto& dom : domains_) total += dom.size();
  return total;
}

std::uint64_t DiscreteModel::configuration_count(std::uint64_t cap) const {
  std::uint64_t count = 1;
  for (const auto& dom : domains_) {
    count *= dom.size();
    if (count > cap) return cap + 1;
  }
  return count;
}

void DiscreteModel::require_enumerable(std::uint64_t cap) const {
  if (configuration_count(cap) > cap) {
    throw ResourceLimitError("configuration space exceeds enumeration cap of " +
                             std::to_string(cap));
  }
}

void DiscreteModel::check_config(std::span<const std::int32_t> x) const {
  if (x.size() != domains_.size()) {
    throw std::invalid_argument("configuration has " + std::to_string(x.size()) +
                                " entries, expected " + std::to_string(domains_.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= static_cast<std::int32_t>(domains_[i].size())) {
      throw std::invalid_argument("label index out of range at variable " +
                                  std::to_string(i));
    }
  }
}

double DiscreteModel::potential(std::span<const std::int32_t> x) const {
  check_config(x);
  if (is_forbidden(x)) return kNegInf;
  double score = constant_;
  for (std::size_t i = 0; i < x.size(); ++i) score += unary_[i][x[i]];
  for (const auto& f : pairwise_) score += f.score(x[f.var_i], x[f.var_j]);
  return score;
}

Configuration first_configuration(const DiscreteModel& model) {
  return Configuration(model.num_variables(), 0);
}

bool next_configuration(const DiscreteModel& model, Configuration& x) {
  for (int i = model.num_variables() - 1; i >= 0; --i) {
    if (x[i] + 1 < model.domain_size(i)) {
      ++x[i];
      return true;
    }
    x[i] = 0;
  }
  return false;  // wrapped past the last configuration
}

std::uint64_t configuration_rank(const DiscreteModel& model,
                                 std::span<const std::int32_t> x) {
  if (static_cast<int>(x.size()) != model.num_variables()) {
    throw std::invalid_argument("configuration_rank: wrong configuration length");
  }
  std::uint64_t rank = 0;
  for (int i = 0; i < model.num_variables(); ++i) {
    rank = rank * model.domain_size(i) + x[i];
  }
  return rank;
}

double log_partition_exact(const DiscreteModel& model, std::uint64_t cap) {
  model.require_enumerable(cap);
  // Streaming max-shifted logsumexp over feasible configurations.
  double best = kNegInf;
  double acc = 0.0;
  Configuration x = first_configuration(model);
  do {
    const double v = model.potential(x);
    if (is_neg_inf(v)) continue;
    if (is_neg_inf(best)) {
      best = v;
      acc = 1.0;
    } else if (v > best) {
      acc = acc * std::exp(best - v) + 1.0;
      best = v;
    } else {
      acc += std::exp(v - best);
    }
  } while (next_configuration(model, x));
  if (is_neg_inf(best)) {
    throw InfeasibleModelError("every configuration is forbidden");
  }
  return best + std::log(acc);
}

double gibbs_probability(const DiscreteModel& model, const Configuration& x,
                         std::uint64_t cap) {
  const double v = model.potential(x);
  if (is_neg_inf(v)) return 0.0;
  return std::exp(v - log_partition_exact(model, cap));
}

DiscreteModel conditional_slice(const DiscreteModel& model,
                                std::span<const std::int32_t> prefix) {
  const int n = model.num_variables();
  const int p = static_cast<int>(prefix.size());
  if (p > n) {
    throw std::invalid_argument("conditional_slice: prefix longer than model");
  }
  for (int i = 0; i < p; ++i) {
    if (prefix[i] < 0 || prefix[i] >= model.domain_size(i)) {
      throw std::invalid_argument("conditional_slice: label index out of range at variable " +
                                  std::to_string(i));
    }
  }

  std::vector<std::vector<double>> suffix_domains;
  suffix_domains.reserve(n - p);
  for (int i = p; i < n; ++i) suffix_domains.push_back(model.domain(i));
  DiscreteModel out(std::move(suffix_domains));

  double offset = model.constant();
  for (int i = 0; i < p; ++i) offset += model.unary(i, prefix[i]);
  for (int i = p; i < n; ++i) {
    for (std::int32_t label = 0; label < model.domain_size(i); ++label) {
      const double score = model.unary(i, label);
      if (score != 0.0) out.add_unary(i - p, label, score);
    }
  }
  for (const auto& f : model.pairwise_factors()) {
    if (f.var_j < p) {
      offset += f.score(prefix[f.var_i], prefix[f.var_j]);
    } else if (f.var_i < p) {
      // One endpoint pinned: the factor's row becomes a unary on the suffix.
      for (std::int32_t lj = 0; lj < f.size_j; ++lj) {
        out.add_unary(f.var_j - p, lj, f.score(prefix[f.var_i], lj));
      }
    } else {
      for (std::int32_t li = 0; li < f.size_i; ++li) {
        for (std::int32_t lj = 0; lj < f.size_j; ++lj) {
          out.add_pairwise(f.var_i - p, f.var_j - p, li, lj, f.score(li, lj));
        }
      }
    }
  }
  out.add_constant(offset);

  for (const auto& bad : model.forbidden()) {
    if (std::equal(bad.begin(), bad.begin() + p, prefix.begin(), prefix.end())) {
      out.forbid(Configuration(bad.begin() + p, bad.end()));
    }
  }
  return out;
}

}  // namespace perturbmap
