#pragma once

#include <cstddef>
#include <cstring>
#include <random>

#include "ampgemm/matrix.hpp"
#include "ampgemm/types.hpp"

namespace ampgemm::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, std::size_t pad = 0) {
  Matrix x(rows, cols, rows + pad);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) x(i, j) = dist(rng);
  return x;
}

// Cortex-A15-like cluster with the tuned blocking of the shipped profile.
inline ClusterSpec a15(std::size_t cores = 4) {
  ClusterSpec c;
  c.core_class = CoreClass::Fast;
  c.core_count = cores;
  c.l1d_bytes = 32768;
  c.l2_bytes = 2097152;
  c.cache = {4096, 952, 152, 4, 4};
  return c;
}

// Cortex-A7-like cluster.
inline ClusterSpec a7(std::size_t cores = 4, double slowdown = 1.0) {
  ClusterSpec c;
  c.core_class = CoreClass::Slow;
  c.core_count = cores;
  c.l1d_bytes = 32768;
  c.l2_bytes = 524288;
  c.cache = {4096, 352, 80, 4, 4};
  c.emulated_slowdown = slowdown;
  return c;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double x = a(i, j), y = b(i, j);
      if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
  return true;
}

}  // namespace ampgemm::test
