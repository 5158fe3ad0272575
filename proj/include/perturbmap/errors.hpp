#pragma once

#include <stdexcept>
#include <string>

namespace perturbmap {

// An operation asked for exhaustive enumeration but the configuration space
// exceeds the caller's cap, or an iteration budget ran out.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Every configuration of the model is forbidden, so distributions and maxima
// over it are undefined.
class InfeasibleModelError : public std::runtime_error {
 public:
  explicit InfeasibleModelError(const std::string& what) : std::runtime_error(what) {}
};

// The model's shape is outside what the requested solver can handle
// (non-binary domains, repulsive couplings, forbidden configurations, ...).
class UnsupportedModelError : public std::runtime_error {
 public:
  explicit UnsupportedModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perturbmap
