#include "ndmath/matrix.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "common/error.hpp"

namespace egan::nd {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    fail(ErrorKind::kShape, std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
}

using RowMajor = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<RowMajor> view(Matrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    fail(ErrorKind::kShape, "matrix data length " + std::to_string(data_.size()) + " != " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<float>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorKind::kShape, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0f;
  return m;
}

Matrix Matrix::row_vector(std::span<const float> v) {
  return Matrix(1, v.size(), std::vector<float>(v.begin(), v.end()));
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float x) { return std::isfinite(x); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorKind::kShape, "matmul: inner dimensions differ, " + shape(a) + " x " + shape(b));
  Matrix c(a.rows(), b.cols());
  if (c.size() != 0 && a.cols() != 0) view(c).noalias() = view(a) * view(b);
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    fail(ErrorKind::kShape, "matmul_at_b: row counts differ, " + shape(a) + " vs " + shape(b));
  Matrix c(a.cols(), b.cols());
  if (c.size() != 0 && a.rows() != 0) view(c).noalias() = view(a).transpose() * view(b);
  return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    fail(ErrorKind::kShape, "matmul_a_bt: column counts differ, " + shape(a) + " vs " + shape(b));
  Matrix c(a.rows(), b.rows());
  if (c.size() != 0 && a.cols() != 0) view(c).noalias() = view(a) * view(b).transpose();
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same(a, b, "add");
  Matrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += bv[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same(a, b, "sub");
  Matrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= bv[i];
  return c;
}

Matrix scale(const Matrix& a, float s) {
  Matrix c = a;
  for (auto& x : c.values()) x *= s;
  return c;
}

Matrix add_row(const Matrix& a, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    fail(ErrorKind::kShape,
         "add_row: expected 1x" + std::to_string(a.cols()) + " row, got " + shape(row));
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto r = c.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += row(0, j);
  }
  return c;
}

Matrix leaky_relu(const Matrix& a, float slope) {
  Matrix c = a;
  for (auto& x : c.values()) x = x > 0.0f ? x : x * slope;
  return c;
}

double sum(const Matrix& a) {
  double s = 0.0;
  for (float x : a.values()) s += x;
  return s;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (float x : a.values()) s += double{x} * x;
  return std::sqrt(s);
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), a.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < a.rows(), ErrorKind::kContract, "gather_rows: index out of range");
    std::copy_n(a.row(idx[i]).begin(), a.cols(), out.row(i).begin());
  }
  return out;
}

}  // namespace egan::nd
