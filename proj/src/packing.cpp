#include "ampgemm/packing.hpp"

#include <algorithm>
#include <cassert>

namespace ampgemm {

void pack_a_panels(ConstMatrixView a, std::size_t m_r, std::size_t first, std::size_t last,
                   std::span<double> dst) {
  const std::size_t kc = a.cols;
  assert(dst.size() >= packed_size(a.rows, m_r, kc));
  for (std::size_t panel = first; panel < last; ++panel) {
    const std::size_t i0 = panel * m_r;
    const std::size_t rows = std::min(m_r, a.rows - i0);
    double* out = dst.data() + panel * m_r * kc;
    for (std::size_t p = 0; p < kc; ++p) {
      const double* col = a.data + i0 + p * a.ld;
      std::size_t i = 0;
      for (; i < rows; ++i) out[i] = col[i];
      for (; i < m_r; ++i) out[i] = 0.0;
      out += m_r;
    }
  }
}

void pack_b_panels(ConstMatrixView b, std::size_t n_r, std::size_t first, std::size_t last,
                   std::span<double> dst) {
  const std::size_t kc = b.rows;
  assert(dst.size() >= packed_size(b.cols, n_r, kc));
  for (std::size_t panel = first; panel < last; ++panel) {
    const std::size_t j0 = panel * n_r;
    const std::size_t cols = std::min(n_r, b.cols - j0);
    double* out = dst.data() + panel * n_r * kc;
    for (std::size_t p = 0; p < kc; ++p) {
      const double* row = b.data + p + j0 * b.ld;
      std::size_t j = 0;
      for (; j < cols; ++j) out[j] = row[j * b.ld];
      for (; j < n_r; ++j) out[j] = 0.0;
      out += n_r;
    }
  }
}

PackedBlockA pack_a(ConstMatrixView a, std::size_t m_r) {
  PackedBlockA p{a.rows, a.cols, m_r, {}};
  if (a.empty()) return p;
  p.buffer.resize(packed_size(a.rows, m_r, a.cols));
  pack_a_panels(a, m_r, 0, p.panels(), p.buffer);
  return p;
}

PackedBlockB pack_b(ConstMatrixView b, std::size_t n_r) {
  PackedBlockB p{b.rows, b.cols, n_r, {}};
  if (b.empty()) return p;
  p.buffer.resize(packed_size(b.cols, n_r, b.rows));
  pack_b_panels(b, n_r, 0, p.panels(), p.buffer);
  return p;
}

Matrix unpack_a(const PackedBlockA& p) {
  Matrix out(p.mc, p.kc);
  if (p.buffer.empty()) return out;
  for (std::size_t i = 0; i < p.mc; ++i) {
    const double* panel = p.buffer.data() + (i / p.m_r) * p.m_r * p.kc;
    for (std::size_t j = 0; j < p.kc; ++j) out(i, j) = panel[j * p.m_r + i % p.m_r];
  }
  return out;
}

Matrix unpack_b(const PackedBlockB& p) {
  Matrix out(p.kc, p.nc);
  if (p.buffer.empty()) return out;
  for (std::size_t j = 0; j < p.nc; ++j) {
    const double* panel = p.buffer.data() + (j / p.n_r) * p.n_r * p.kc;
    for (std::size_t i = 0; i < p.kc; ++i) out(i, j) = panel[i * p.n_r + j % p.n_r];
  }
  return out;
}

}  // namespace ampgemm
