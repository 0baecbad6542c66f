#pragma once

#include <cstddef>
#include <span>

namespace ampgemm {

// Destination tile inside C. Only the valid_rows x valid_cols corner is written.
struct MicroTileView {
  double* base = nullptr;
  std::size_t valid_rows = 0;
  std::size_t valid_cols = 0;
  std::size_t ld = 0;
};

// Register block of a kernel.
struct KernelShape {
  std::size_t m_r = 4;
  std::size_t n_r = 4;
};

// C_tile += A_r * B_r, where `a` is an m_r x k micro-panel stored column by column
// and `b` a k x n_r micro-panel stored row by row, as produced by packing.
//
// The full m_r x n_r product is accumulated from zero in order p = 0..k-1 and only
// then added to C, so the result depends on the panels and k alone.
// slowdown > 1 repeats the arithmetic (slowdown - 1) more times into a discarded
// accumulator; C is unaffected.
using MicroKernelFn = void (*)(const double* a, const double* b, const MicroTileView& c,
                               std::size_t k, KernelShape shape, double slowdown);

void microkernel_4x4(const double* a, const double* b, const MicroTileView& c, std::size_t k,
                     KernelShape shape, double slowdown);
void microkernel_generic(const double* a, const double* b, const MicroTileView& c, std::size_t k,
                         KernelShape shape, double slowdown);

// Kernel for the given register block. Throws std::invalid_argument if unsupported.
MicroKernelFn select_microkernel(KernelShape shape);

// Checked entry point: panels must hold at least m_r * k and k * n_r elements.
void microkernel(std::span<const double> a_panel, std::span<const double> b_panel,
                 const MicroTileView& c, std::size_t k, KernelShape shape = {},
                 double slowdown = 1.0);

}  // namespace ampgemm
