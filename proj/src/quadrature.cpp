#include "perturbmap/quadrature.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace perturbmap {

namespace {

// Gauss-Kronrod (7,15) abscissae and weights on [-1,1]. The odd Kronrod
// points extend the embedded 7-point Gauss rule, whose nodes are the even
// entries.
constexpr int kPoints = 15;
constexpr double kNodes[kPoints] = {
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691,
    -0.7415311855993945, -0.5860872354676911, -0.4058451513773972,
    -0.2077849550078985, 0.0,                 0.2077849550078985,
    0.4058451513773972,  0.5860872354676911,  0.7415311855993945,
    0.8648644233597691,  0.9491079123427585,  0.9914553711208126};
constexpr double kKronrodWeights[kPoints] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278, 0.2044329400752989,
    0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
    0.1047900103222502, 0.0630920926299785, 0.0229353220105292};
constexpr double kGaussWeights[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
};

struct WorseError {
  bool operator()(const Segment& a, const Segment& b) const { return a.error < b.error; }
};

Segment evaluate(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double y = f(center + half * kNodes[i]);
    kronrod += kKronrodWeights[i] * y;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * y;
  }
  Segment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.value = kronrod * half;
  seg.error = std::abs((kronrod - gauss) * half);
  return seg;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol, std::size_t max_evaluations) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    throw std::invalid_argument("integrate: need a finite interval with lo < hi");
  }
  if (!(abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: abs_tol must be positive");
  }

  std::priority_queue<Segment, std::vector<Segment>, WorseError> segments;
  QuadratureResult result;
  segments.push(evaluate(f, lo, hi));
  result.evaluations = kPoints;
  double total_error = segments.top().error;

  while (total_error > abs_tol && result.evaluations + 2 * kPoints <= max_evaluations) {
    const Segment worst = segments.top();
    segments.pop();
    total_error -= worst.error;
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval narrower than double spacing; no further refinement possible.
      total_error += worst.error;
      segments.push(worst);
      break;
    }
    const Segment left = evaluate(f, worst.lo, mid);
    const Segment right = evaluate(f, mid, worst.hi);
    result.evaluations += 2 * kPoints;
    total_error += left.error + right.error;
    segments.push(left);
    segments.push(right);
  }

  double value = 0.0;
  while (!segments.empty()) {
    value += segments.top().value;
    segments.pop();
  }
  result.value = value;
  result.error_estimate = total_error;
  result.converged = total_error <= abs_tol;
  return result;
}

}  // namespace perturbmap
