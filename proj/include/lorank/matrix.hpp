#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lorank {

/// Dense real matrix, row-major. The carrier for features F (n×d), labels
/// Y (n×C) and weight tensors throughout the library.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;
  /// Throws invalid_input_error naming the first non-finite entry (row, col).
  void require_finite(const char* what) const;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
/// dst += alpha * src (shapes must match).
void add_scaled(DenseMatrix& dst, const DenseMatrix& src, double alpha);
/// Gathers the given rows of a into a new |rows|×cols matrix.
DenseMatrix row_slice(const DenseMatrix& a, std::span<const std::size_t> rows);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Kernel gram matrix K_n = (1/n) F Fᵀ; symmetric positive-semidefinite n×n.
DenseMatrix gram_kernel(const DenseMatrix& f);

}  // namespace lorank
