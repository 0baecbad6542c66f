#include "ampgemm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ampgemm {

void reference_gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  for (std::size_t j = 0; j < c.cols; ++j)
    for (std::size_t i = 0; i < c.rows; ++i) {
      double acc = c(i, j);
      for (std::size_t p = 0; p < a.cols; ++p) acc += a(i, p) * b(p, j);
      c(i, j) = acc;
    }
}

double max_relative_error(ConstMatrixView got, ConstMatrixView want) {
  double worst = 0.0;
  for (std::size_t j = 0; j < want.cols; ++j)
    for (std::size_t i = 0; i < want.rows; ++i) {
      const double w = want(i, j);
      const double diff = std::abs(got(i, j) - w);
      const double e = w == 0.0 ? diff : diff / std::abs(w);
      if (std::isnan(e)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, e);
    }
  return worst;
}

}  // namespace ampgemm
