#pragma once

#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace ampgemm {

// Column-major views. Element (i, j) lives at data[i + j * ld].
template <typename T>
struct BasicMatrixView {
  T* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  T& operator()(std::size_t i, std::size_t j) const { return data[i + j * ld]; }

  BasicMatrixView block(std::size_t i, std::size_t j, std::size_t m, std::size_t n) const {
    return {data + i + j * ld, m, n, ld};
  }

  bool empty() const { return rows == 0 || cols == 0; }

  operator BasicMatrixView<const T>() const
    requires(!std::is_const_v<T>)
  {
    return {data, rows, cols, ld};
  }
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

// Owning dense matrix, ld >= rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, rows) {}
  Matrix(std::size_t rows, std::size_t cols, std::size_t ld);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t ld() const { return ld_; }

  double& operator()(std::size_t i, std::size_t j) { return storage_[i + j * ld_]; }
  double operator()(std::size_t i, std::size_t j) const { return storage_[i + j * ld_]; }

  std::span<double> storage() { return storage_; }
  std::span<const double> storage() const { return storage_; }

  MatrixView view() { return {storage_.data(), rows_, cols_, ld_}; }
  ConstMatrixView view() const { return {storage_.data(), rows_, cols_, ld_}; }

  static Matrix identity(std::size_t n);

  // Compares the logical m x n region only; padding rows are ignored.
  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t ld_ = 0;
  std::vector<double> storage_;
};

}  // namespace ampgemm
