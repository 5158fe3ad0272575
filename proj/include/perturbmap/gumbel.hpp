#pragma once

#include <cstdint>
#include <span>

namespace perturbmap {

// Euler-Mascheroni constant. Centering the standard Gumbel at -kEulerGamma
// makes it zero-mean; all perturbations in this library use that convention.
inline constexpr double kEulerGamma = 0.577215664901532860606512;

// Variance of the zero-mean Gumbel: pi^2 / 6.
inline constexpr double kGumbelVariance = 1.6449340668482264;

// CDF of the zero-mean Gumbel: exp(-exp(-(y + kEulerGamma))).
double gumbel_cdf(double y);

// Density of the zero-mean Gumbel: exp(-(y + kEulerGamma + exp(-(y + kEulerGamma)))).
double gumbel_pdf(double y);

// Deterministic counter-based generator. A stream is identified by
// (seed, stream id); equal identifiers always reproduce the same draw
// sequence, and child streams derived via stream() are independent of the
// parent's position, so parallel workers can each take stream(worker_index)
// without any coordination.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1): (k + 0.5) / 2^53 for a 53-bit k.
  // Never returns 0 or 1, so -log(-log(u)) is always finite.
  double next_unit_open();

  // Child stream keyed by (this stream's identity, id).
  RngStream stream(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  RngStream() = default;

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// One zero-mean Gumbel draw by inverse CDF: -log(-log(u)) - kEulerGamma.
double sample_gumbel(RngStream& rng);

// log(sum_i exp(scores[i])), max-shifted for stability. Entries equal to
// kNegInf contribute nothing. Throws std::invalid_argument on an empty span
// and InfeasibleModelError when every entry is kNegInf.
double logsumexp(std::span<const double> scores);

}  // namespace perturbmap
