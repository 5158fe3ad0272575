#pragma once

#include <cstddef>
#include <functional>

namespace perturbmap {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  // False when the evaluation budget ran out before the requested tolerance;
  // the value is still the best available estimate.
  bool converged = false;
};

// Adaptive Gauss-Kronrod (G7, K15) integration of f over [lo, hi]: the
// interval with the largest error estimate is bisected until the summed
// estimate drops below abs_tol or the budget is spent. Endpoints are never
// evaluated. Throws std::invalid_argument on an empty or non-finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol = 1e-8, std::size_t max_evaluations = 1000000);

}  // namespace perturbmap
