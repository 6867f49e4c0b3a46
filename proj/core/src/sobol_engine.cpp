#include "sobol_engine.hpp"

#include <string>

#include "noisybench/errors.hpp"

namespace noisybench::detail {

namespace {

constexpr int kBits = 53;

struct DimSeed {
  int degree;                 // primitive polynomial degree s
  std::uint32_t poly;         // interior coefficients a_1..a_{s-1}
  std::uint32_t m[6];         // first s initial direction values (odd)
};

// Joe-Kuo D6 initial direction numbers with the matching primitive
// polynomials, in the conventional dimension order. Dimension 1 is the
// degenerate van der Corput radix-2 sequence and is handled separately.
constexpr DimSeed kSeeds[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
};

}  // namespace

std::size_t SobolEngine::max_dim() { return 1 + std::size(kSeeds); }

SobolEngine::SobolEngine(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > max_dim()) {
    throw ConfigError("sobol sequence supports 1 to " + std::to_string(max_dim()) +
                      " dimensions, got " + std::to_string(dim));
  }
  direction_.resize(dim_, std::vector<std::uint64_t>(kBits));

  for (int j = 0; j < kBits; ++j) {
    direction_[0][j] = 1ULL << (kBits - j - 1);
  }

  for (std::size_t k = 1; k < dim_; ++k) {
    const DimSeed& seed = kSeeds[k - 1];
    const int s = seed.degree;
    std::vector<std::uint64_t>& v = direction_[k];
    for (int j = 0; j < s; ++j) {
      v[j] = static_cast<std::uint64_t>(seed.m[j]) << (kBits - j - 1);
    }
    for (int l = s; l < kBits; ++l) {
      std::uint64_t n = v[l - s] >> s;
      for (int j = 1; j < s; ++j) {
        if ((seed.poly >> (s - j - 1)) & 1U) n ^= v[l - j];
      }
      n ^= v[l - s];
      v[l] = n;
    }
  }
}

std::vector<double> SobolEngine::point(std::uint64_t index) const {
  std::vector<double> out(dim_);
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t k = 0; k < dim_; ++k) {
    std::uint64_t acc = 0;
    std::uint64_t bits = gray;
    for (int b = 0; b < kBits && bits != 0; ++b, bits >>= 1) {
      if (bits & 1) acc ^= direction_[k][b];
    }
    out[k] = static_cast<double>(acc) * 0x1.0p-53;
  }
  return out;
}

}  // namespace noisybench::detail
