#include "perturbmap/gumbel.hpp"

#include <cmath>
#include <stdexcept>

#include "perturbmap/errors.hpp"
#include "perturbmap/extended_real.hpp"

namespace perturbmap {

double gumbel_cdf(double y) { return std::exp(-std::exp(-(y + kEulerGamma))); }

double gumbel_pdf(double y) {
  const double z = y + kEulerGamma;
  return std::exp(-(z + std::exp(-z)));
}

namespace {

// SplitMix64 finalizer; full 64-bit avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  key_ = mix64(mix64(seed) ^ mix64(stream_id ^ 0xA5A5A5A5A5A5A5A5ULL));
}

std::uint64_t RngStream::next_u64() { return mix64(key_ ^ mix64(counter_++)); }

double RngStream::next_unit_open() {
  const std::uint64_t k = next_u64() >> 11;  // top 53 bits
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

RngStream RngStream::stream(std::uint64_t id) const {
  RngStream child;
  child.seed_ = seed_;
  child.stream_id_ = id;
  child.key_ = mix64(key_ ^ mix64(id ^ 0xC3C3C3C3C3C3C3C3ULL));
  child.counter_ = 0;
  return child;
}

double sample_gumbel(RngStream& rng) {
  return -std::log(-std::log(rng.next_unit_open())) - kEulerGamma;
}

double logsumexp(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("logsumexp: empty score list");
  double m = kNegInf;
  for (double s : scores) {
    if (s > m) m = s;
  }
  if (is_neg_inf(m)) {
    throw InfeasibleModelError("logsumexp: every score is -inf");
  }
  double acc = 0.0;
  for (double s : scores) {
    if (is_neg_inf(s)) continue;
    acc += std::exp(s - m);
  }
  return m + std::log(acc);
}

}  // namespace perturbmap
