#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lieopt/matrix.hpp"
#include "lieopt/random.hpp"

namespace testing {

inline lieopt::Matrix gaussian(lieopt::Index rows, lieopt::Index cols, std::uint64_t seed) {
  lieopt::CounterRng rng(seed, 99);
  lieopt::Matrix m(rows, cols);
  for (lieopt::Index j = 0; j < cols; ++j)
    for (lieopt::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline lieopt::SymMatrix random_sym(lieopt::Index n, std::uint64_t seed) {
  return lieopt::SymMatrix(gaussian(n, n, seed));
}

inline lieopt::SkewMatrix random_skew(lieopt::Index n, std::uint64_t seed) {
  return lieopt::SkewMatrix(gaussian(n, n, seed));
}

// SPD with condition number at most `cond`, built from a random orthogonal basis.
inline lieopt::SymMatrix random_spd(lieopt::Index n, std::uint64_t seed, double cond = 100.0) {
  const lieopt::Matrix q = lieopt::cayley(random_skew(n, seed), 1.0);
  lieopt::Vector d(n);
  for (lieopt::Index i = 0; i < n; ++i)
    d(i) = n == 1 ? 1.0 : std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
  return lieopt::SymMatrix(lieopt::Matrix(q * d.asDiagonal() * q.transpose()));
}

// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace testing
