#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace noisybench::detail {

// Sobol low-discrepancy sequence with 53-bit resolution, Joe-Kuo direction
// numbers. point(i) is a pure function of the index (Antonov-Saleev Gray-code
// form), so consumers can jump to any position without replaying the
// sequence. Index 0 is the all-zeros corner; samplers usually start at 1.
class SobolEngine {
 public:
  explicit SobolEngine(std::size_t dim);  // ConfigError when dim = 0 or > max_dim()

  static std::size_t max_dim();

  std::size_t dim() const { return dim_; }
  std::vector<double> point(std::uint64_t index) const;

 private:
  std::size_t dim_;
  std::vector<std::vector<std::uint64_t>> direction_;  // per dim, 53 integers
};

}  // namespace noisybench::detail
