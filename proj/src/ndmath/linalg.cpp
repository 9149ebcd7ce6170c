#include "ndmath/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "common/error.hpp"

namespace egan::nd {

Pca pca_fit(const Matrix& y, std::size_t p) {
  const std::size_t n = y.rows(), h = y.cols();
  require(n >= 2, ErrorKind::kContract, "pca_fit: need at least 2 samples");
  require(p >= 1 && p <= std::min(n, h), ErrorKind::kContract,
          "pca_fit: p=" + std::to_string(p) + " outside [1, min(N, h)=" +
              std::to_string(std::min(n, h)) + "]");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < h; ++j) mean[j] += y(i, j);
  mean /= static_cast<double>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(h, h);
  Eigen::VectorXd c(h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < h; ++j) c[j] = double{y(i, j)} - mean[j];
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n - 1);

  const double trace = cov.trace();
  require(trace > 0.0 && std::isfinite(trace), ErrorKind::kDegenerate,
          "pca_fit: input has zero variance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  require(eig.info() == Eigen::Success, ErrorKind::kDegenerate,
          "pca_fit: eigendecomposition did not converge");
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();

  Pca out;
  out.mean.resize(h);
  for (std::size_t j = 0; j < h; ++j) out.mean[j] = static_cast<float>(mean[j]);
  out.basis = Matrix(h, p);
  out.variances.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    const Eigen::Index src = static_cast<Eigen::Index>(h - 1 - k);
    out.variances[k] = static_cast<float>(std::max(0.0, vals[src]));
    std::size_t arg = 0;
    for (std::size_t j = 1; j < h; ++j)
      if (std::abs(vecs(j, src)) > std::abs(vecs(arg, src))) arg = j;
    const double sign = vecs(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < h; ++j) out.basis(j, k) = static_cast<float>(sign * vecs(j, src));
  }
  return out;
}

Matrix pca_coords(const Matrix& y, std::span<const float> mean, const Matrix& basis) {
  require(mean.size() == y.cols() && basis.rows() == y.cols(), ErrorKind::kShape,
          "pca_coords: mean/basis do not match activation width " + std::to_string(y.cols()));
  const std::size_t n = y.rows(), h = y.cols(), p = basis.cols();
  Matrix x(n, p);
  std::vector<double> c(h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < h; ++j) c[j] = double{y(i, j)} - mean[j];
    for (std::size_t k = 0; k < p; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < h; ++j) acc += c[j] * basis(j, k);
      x(i, k) = static_cast<float>(acc);
    }
  }
  return x;
}

Matrix least_squares(const Matrix& x, const Matrix& z, const LeastSquaresOptions& opts) {
  require(x.rows() == z.rows(), ErrorKind::kShape,
          "least_squares: coordinate rows " + std::to_string(x.rows()) + " != target rows " +
              std::to_string(z.rows()));
  const std::size_t n = x.rows(), p = x.cols(), d = z.cols();
  require(p >= 1 && n >= p, ErrorKind::kContract, "least_squares: need N >= p >= 1");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(p, d);
  Eigen::VectorXd xi(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) xi[k] = x(i, k);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(xi);
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t j = 0; j < d; ++j) rhs(k, j) += xi[k] * z(i, j);
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()[0];
  const double hi = eig.eigenvalues()[p - 1];
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond <= opts.max_condition)) {
    require(opts.regularize, ErrorKind::kSingular,
            "least_squares: coordinate matrix is rank deficient (condition estimate " +
                std::to_string(cond) + ")");
    gram.diagonal().array() += opts.ridge;
  }

  const Eigen::MatrixXd sol = gram.ldlt().solve(rhs);  // p x d
  Matrix u(d, p);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < p; ++k) u(j, k) = static_cast<float>(sol(k, j));
  require(u.all_finite(), ErrorKind::kSingular, "least_squares: solution is not finite");
  return u;
}

}  // namespace egan::nd
