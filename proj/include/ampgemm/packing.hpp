#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ampgemm/matrix.hpp"

namespace ampgemm {

// A_c layout: micro-panels of m_r rows stacked in order; each micro-panel stores
// kc columns of m_r contiguous elements. Rows past mc in the last panel are zero.
struct PackedBlockA {
  std::size_t mc = 0;
  std::size_t kc = 0;
  std::size_t m_r = 0;
  std::vector<double> buffer;

  std::size_t panels() const { return m_r ? (mc + m_r - 1) / m_r : 0; }
};

// B_c layout: micro-panels of n_r columns stacked in order; each micro-panel stores
// kc rows of n_r contiguous elements. Columns past nc in the last panel are zero.
struct PackedBlockB {
  std::size_t kc = 0;
  std::size_t nc = 0;
  std::size_t n_r = 0;
  std::vector<double> buffer;

  std::size_t panels() const { return n_r ? (nc + n_r - 1) / n_r : 0; }
};

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// ceil(dim / r) * r * k
constexpr std::size_t packed_size(std::size_t dim, std::size_t r, std::size_t k) {
  return ceil_div(dim, r) * r * k;
}

// Packs micro-panels [first, last) of `a` into `dst`, which holds the whole block.
// Threads of a group may call this concurrently on disjoint panel ranges.
void pack_a_panels(ConstMatrixView a, std::size_t m_r, std::size_t first, std::size_t last,
                   std::span<double> dst);
void pack_b_panels(ConstMatrixView b, std::size_t n_r, std::size_t first, std::size_t last,
                   std::span<double> dst);

PackedBlockA pack_a(ConstMatrixView a, std::size_t m_r);
PackedBlockB pack_b(ConstMatrixView b, std::size_t n_r);

Matrix unpack_a(const PackedBlockA& p);
Matrix unpack_b(const PackedBlockB& p);

}  // namespace ampgemm
