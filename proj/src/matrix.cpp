#include "lorank/matrix.hpp"

#include <cmath>
#include <string>

#include "lorank/errors.hpp"

namespace lorank {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw shape_error("matrix data length " + std::to_string(data_.size()) +
                      " does not equal rows*cols = " + std::to_string(rows_ * cols_));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw shape_error("ragged initializer: row has " + std::to_string(r.size()) +
                        " entries, expected " + std::to_string(cols_));
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void DenseMatrix::require_finite(const char* what) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!std::isfinite((*this)(i, j))) {
        throw invalid_input_error(std::string(what) + ": non-finite value at row " +
                                  std::to_string(i) + ", col " + std::to_string(j));
      }
    }
  }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw shape_error("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                      std::to_string(b.rows()) + " do not agree");
  }
  DenseMatrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      auto crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

void add_scaled(DenseMatrix& dst, const DenseMatrix& src, double alpha) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols()) {
    throw shape_error("add_scaled: shape mismatch");
  }
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += alpha * s[i];
}

DenseMatrix row_slice(const DenseMatrix& a, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) {
      throw invalid_input_error("row_slice: index " + std::to_string(rows[i]) +
                        " out of range for " + std::to_string(a.rows()) + " rows");
    }
    auto src = a.row(rows[i]);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = src[j];
  }
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix gram_kernel(const DenseMatrix& f) {
  f.require_finite("gram_kernel");
  const std::size_t n = f.rows();
  DenseMatrix k(n, n);
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto fi = f.row(i);
    for (std::size_t j = i; j < n; ++j) {
      const auto fj = f.row(j);
      double dot = 0.0;
      for (std::size_t c = 0; c < f.cols(); ++c) dot += fi[c] * fj[c];
      k(i, j) = dot * inv_n;
      k(j, i) = k(i, j);
    }
  }
  return k;
}

}  // namespace lorank
