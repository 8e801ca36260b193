#pragma once

#include <cstdint>
#include <limits>

namespace lieopt {

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based 64-bit generator: the i-th output is splitmix64 applied to
/// key + (i+1)·φ, where φ is the 64-bit golden-ratio constant. A trajectory's
/// key is derived from (seed, stream) as splitmix64(seed + splitmix64(stream + 1)),
/// so independent runs get decorrelated streams from one user-facing seed.
///
/// Distributions are implemented here (not via <random>) so sequences are
/// identical across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on (0, 1].
  double uniform();
  double normal();
  // Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lieopt
