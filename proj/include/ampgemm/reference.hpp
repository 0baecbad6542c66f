#pragma once

#include <cstddef>
#include <limits>

#include "ampgemm/matrix.hpp"

namespace ampgemm {

// Naive triple loop: c(i,j) += a(i,p) * b(p,j) for p = 0..k-1, accumulated in place.
void reference_gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c);

// max over elements of |got - want| / |want|; an element with want == 0 contributes |got|.
double max_relative_error(ConstMatrixView got, ConstMatrixView want);

// Elementwise relative tolerance for blocked-vs-naive comparisons: 4 * k * eps.
inline double gemm_tolerance(std::size_t k) {
  return 4.0 * static_cast<double>(k) * std::numeric_limits<double>::epsilon();
}

}  // namespace ampgemm
