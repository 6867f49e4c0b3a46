#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace noisybench {

// One SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Derives a child seed from a master seed and a (tag, index) pair. Distinct
// pairs give statistically independent streams; the mapping is pure, so any
// consumer can re-derive its stream without coordinating with the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0);

// Convenience for string tags (FNV-1a hash of the bytes).
std::uint64_t hash_tag(std::string_view tag);

// A seeded random stream. Samplers are implemented here instead of using
// <random> distributions because the standard does not pin their output;
// this way the same seed gives the same draws on every platform and stdlib.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1): 53 mantissa bits from one engine output.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n must be positive. Rejection-sampled, no
  // modulo bias.
  std::size_t pick(std::size_t n);

  // Standard normal via Box-Muller; the spare deviate is cached.
  double normal();
  double normal(double mean, double stddev);

  // Gamma(shape, scale) via Marsaglia-Tsang squeeze; shape must be positive.
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace noisybench
