#include "ampgemm/matrix.hpp"

#include <stdexcept>

namespace ampgemm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::size_t ld)
    : rows_(rows), cols_(cols), ld_(ld) {
  if (ld < rows) throw std::invalid_argument("Matrix: leading dimension smaller than row count");
  storage_.assign(ld * cols, 0.0);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool operator==(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t j = 0; j < a.cols_; ++j)
    for (std::size_t i = 0; i < a.rows_; ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace ampgemm
