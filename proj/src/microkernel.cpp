#include "ampgemm/microkernel.hpp"

#include <cmath>
#include <stdexcept>

#include "ampgemm/validation.hpp"

namespace ampgemm {

namespace {

// Keeps the padding work observable so the optimizer cannot drop it.
thread_local volatile double g_sink = 0.0;

void store_tile_4x4(const double (&acc)[4][4], const MicroTileView& c) {
  if (c.valid_rows == 4 && c.valid_cols == 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      double* col = c.base + j * c.ld;
      col[0] += acc[j][0];
      col[1] += acc[j][1];
      col[2] += acc[j][2];
      col[3] += acc[j][3];
    }
    return;
  }
  for (std::size_t j = 0; j < c.valid_cols; ++j)
    for (std::size_t i = 0; i < c.valid_rows; ++i) c.base[i + j * c.ld] += acc[j][i];
}

inline void rank_k_4x4(const double* a, const double* b, std::size_t k, double (&acc)[4][4]) {
  for (std::size_t p = 0; p < k; ++p) {
    const double a0 = a[0], a1 = a[1], a2 = a[2], a3 = a[3];
    for (std::size_t j = 0; j < 4; ++j) {
      const double bj = b[j];
      acc[j][0] += a0 * bj;
      acc[j][1] += a1 * bj;
      acc[j][2] += a2 * bj;
      acc[j][3] += a3 * bj;
    }
    a += 4;
    b += 4;
  }
}

void rank_k_generic(const double* a, const double* b, std::size_t k, KernelShape s, double* acc) {
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < s.n_r; ++j) {
      const double bj = b[j];
      double* accj = acc + j * kMaxRegisterBlock;
      for (std::size_t i = 0; i < s.m_r; ++i) accj[i] += a[i] * bj;
    }
    a += s.m_r;
    b += s.n_r;
  }
}

// Whole repetitions of the full k loop, then the fractional remainder over a prefix of k.
template <typename Body>
void pad(double extra, std::size_t k, Body body) {
  if (!(extra > 0.0) || k == 0) return;
  const double whole = std::floor(extra);
  for (double r = 0; r < whole; r += 1.0) body(k);
  const auto tail = static_cast<std::size_t>((extra - whole) * static_cast<double>(k));
  if (tail) body(tail);
}

}  // namespace

void microkernel_4x4(const double* a, const double* b, const MicroTileView& c, std::size_t k,
                     KernelShape, double slowdown) {
  if (k == 0) return;
  double acc[4][4] = {};
  rank_k_4x4(a, b, k, acc);
  store_tile_4x4(acc, c);

  pad(slowdown - 1.0, k, [&](std::size_t kk) {
    double scratch[4][4] = {};
    rank_k_4x4(a, b, kk, scratch);
    // Every lane feeds the sink, otherwise the dead ones are optimized away.
    double sum = 0.0;
    for (const auto& col : scratch)
      for (double v : col) sum += v;
    g_sink = g_sink + sum;
  });
}

void microkernel_generic(const double* a, const double* b, const MicroTileView& c, std::size_t k,
                         KernelShape shape, double slowdown) {
  if (k == 0) return;
  double acc[kMaxRegisterBlock * kMaxRegisterBlock] = {};
  rank_k_generic(a, b, k, shape, acc);
  for (std::size_t j = 0; j < c.valid_cols; ++j)
    for (std::size_t i = 0; i < c.valid_rows; ++i) c.base[i + j * c.ld] += acc[j * kMaxRegisterBlock + i];

  pad(slowdown - 1.0, k, [&](std::size_t kk) {
    double scratch[kMaxRegisterBlock * kMaxRegisterBlock] = {};
    rank_k_generic(a, b, kk, shape, scratch);
    double sum = 0.0;
    for (std::size_t j = 0; j < shape.n_r; ++j)
      for (std::size_t i = 0; i < shape.m_r; ++i) sum += scratch[j * kMaxRegisterBlock + i];
    g_sink = g_sink + sum;
  });
}

MicroKernelFn select_microkernel(KernelShape shape) {
  if (shape.m_r == 0 || shape.n_r == 0 || shape.m_r > kMaxRegisterBlock || shape.n_r > kMaxRegisterBlock)
    throw std::invalid_argument("unsupported micro-kernel shape " + std::to_string(shape.m_r) + "x" +
                                std::to_string(shape.n_r));
  if (shape.m_r == 4 && shape.n_r == 4) return &microkernel_4x4;
  return &microkernel_generic;
}

void microkernel(std::span<const double> a_panel, std::span<const double> b_panel,
                 const MicroTileView& c, std::size_t k, KernelShape shape, double slowdown) {
  if (a_panel.size() < shape.m_r * k || b_panel.size() < k * shape.n_r)
    throw std::invalid_argument("micro-kernel panels shorter than the packing layout requires");
  if (c.valid_rows > shape.m_r || c.valid_cols > shape.n_r)
    throw std::invalid_argument("micro-tile larger than the register block");
  select_microkernel(shape)(a_panel.data(), b_panel.data(), c, k, shape, slowdown);
}

}  // namespace ampgemm
