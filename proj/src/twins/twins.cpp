#include "twins/twins.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace egan::twins {

namespace {

struct Standardized {
  std::vector<double> z;       // n x F row-major
  std::vector<double> stddev;  // F
};

Standardized standardize(const nd::Matrix& x, const char* which) {
  const std::size_t n = x.rows(), f = x.cols();
  Standardized s{std::vector<double>(n * f), std::vector<double>(f)};
  for (std::size_t j = 0; j < f; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) {
      fail(ErrorKind::kDegenerate, std::string("barlow_twins_loss: batch ") + which +
                                       " has zero variance in dimension " + std::to_string(j));
    }
    s.stddev[j] = sd;
    for (std::size_t i = 0; i < n; ++i) s.z[i * f + j] = (x(i, j) - mean) / sd;
  }
  return s;
}

// Backpropagates dL/dz through z = (x - mean) / sd, column by column.
nd::Matrix unstandardize_grad(const std::vector<double>& gz, const Standardized& s, std::size_t n,
                              std::size_t f) {
  nd::Matrix g(n, f);
  for (std::size_t j = 0; j < f; ++j) {
    double mg = 0.0, mgz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mg += gz[i * f + j];
      mgz += gz[i * f + j] * s.z[i * f + j];
    }
    mg /= static_cast<double>(n);
    mgz /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      g(i, j) = static_cast<float>((gz[i * f + j] - mg - s.z[i * f + j] * mgz) / s.stddev[j]);
  }
  return g;
}

}  // namespace

std::size_t default_window(std::size_t length, std::size_t cap) {
  return std::max<std::size_t>(1, std::min(length / 2, cap));
}

WindowPair sample_window_pair(const FeatureSequence& seq, std::size_t w, nd::SeededRng& rng) {
  const std::size_t t = seq.frames.rows();
  require(w >= 1 && w <= t, ErrorKind::kContract,
          "sample_window_pair: window " + std::to_string(w) + " does not fit sequence of length " +
              std::to_string(t));
  WindowPair p;
  p.first_start = rng.uniform_index(t - w + 1);
  p.second_start = rng.uniform_index(t - w + 1);
  auto slice = [&](std::size_t start) {
    nd::Matrix m(w, seq.frames.cols());
    std::copy_n(seq.frames.data() + start * seq.frames.cols(), m.size(), m.data());
    return m;
  };
  p.first = slice(p.first_start);
  p.second = slice(p.second_start);
  return p;
}

TwinsLoss barlow_twins_loss_and_grad(const nd::Matrix& a, const nd::Matrix& b, double lambda) {
  require(a.same_shape(b), ErrorKind::kShape, "barlow_twins_loss: batch shapes differ");
  require(a.rows() >= 2, ErrorKind::kContract, "barlow_twins_loss: need at least 2 rows");
  const std::size_t n = a.rows(), f = a.cols();
  const Standardized sa = standardize(a, "a");
  const Standardized sb = standardize(b, "b");
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> c(f * f, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < f; ++i) {
      const double ai = sa.z[k * f + i];
      for (std::size_t j = 0; j < f; ++j) c[i * f + j] += ai * sb.z[k * f + j];
    }
  for (auto& x : c) x *= inv_n;

  TwinsLoss out;
  std::vector<double> gc(f * f);
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j < f; ++j) {
      const double cij = c[i * f + j];
      if (i == j) {
        out.value += (1.0 - cij) * (1.0 - cij);
        gc[i * f + j] = -2.0 * (1.0 - cij);
      } else {
        out.value += lambda * cij * cij;
        gc[i * f + j] = 2.0 * lambda * cij;
      }
    }

  // dL/dza = b_z G^T / n, dL/dzb = a_z G / n
  std::vector<double> gza(n * f, 0.0), gzb(n * f, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < f; ++i)
      for (std::size_t j = 0; j < f; ++j) {
        gza[k * f + i] += sb.z[k * f + j] * gc[i * f + j] * inv_n;
        gzb[k * f + j] += sa.z[k * f + i] * gc[i * f + j] * inv_n;
      }
  out.grad_a = unstandardize_grad(gza, sa, n, f);
  out.grad_b = unstandardize_grad(gzb, sb, n, f);
  return out;
}

double barlow_twins_loss(const nd::Matrix& a, const nd::Matrix& b, double lambda) {
  return barlow_twins_loss_and_grad(a, b, lambda).value;
}

double l1_pair_distance(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), ErrorKind::kShape, "l1_pair_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(double{a[i]} - b[i]);
  return s;
}

}  // namespace egan::twins
