#pragma once

#include <cstddef>
#include <vector>

#include "ndmath/matrix.hpp"

namespace egan::nd {

struct Pca {
  std::vector<float> mean;       // h
  Matrix basis;                  // h x p, orthonormal columns
  std::vector<float> variances;  // p, descending
};

// Top-p principal subspace of the rows of y (N x h) via eigendecomposition of
// the h x h sample covariance (divisor N - 1). Each basis column is signed so
// its largest-magnitude entry is positive.
Pca pca_fit(const Matrix& y, std::size_t p);

// X = (Y - mean) V.
Matrix pca_coords(const Matrix& y, std::span<const float> mean, const Matrix& basis);

struct LeastSquaresOptions {
  bool regularize = true;
  double ridge = 1e-8;
  double max_condition = 1e10;
};

// U (d x p) minimizing sum_j ||U x_j - z_j||^2 for rows x_j of x (N x p) and
// z_j of z (N x d), through the normal equations.
Matrix least_squares(const Matrix& x, const Matrix& z, const LeastSquaresOptions& opts = {});

}  // namespace egan::nd
