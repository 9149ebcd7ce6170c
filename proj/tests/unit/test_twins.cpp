#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "twins/twins.hpp"

using egan::ErrorKind;
using egan::nd::Matrix;
using egan::nd::SeededRng;
namespace tw = egan::twins;

namespace {

// Loss straight from the definition, in double with plain loops.
double naive_loss(const oracle::Dense& a, const oracle::Dense& b, double lambda) {
  const std::size_t n = a.size(), f = a.front().size();
  auto standardize = [&](const oracle::Dense& x) {
    oracle::Dense z = x;
    for (std::size_t j = 0; j < f; ++j) {
      double m = 0.0, v = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += x[i][j];
      m /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) v += (x[i][j] - m) * (x[i][j] - m);
      const double sd = std::sqrt(v / static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) z[i][j] = (x[i][j] - m) / sd;
    }
    return z;
  };
  const auto za = standardize(a), zb = standardize(b);
  double loss = 0.0;
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j < f; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < n; ++k) c += za[k][i] * zb[k][j];
      c /= static_cast<double>(n);
      loss += i == j ? (1.0 - c) * (1.0 - c) : lambda * c * c;
    }
  return loss;
}

// n x F batch whose columns are centred, unit variance and mutually
// orthogonal: scaled +-1 Hadamard columns.
Matrix decorrelated_batch(std::size_t n, std::size_t f) {
  Matrix m(n, f);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) m(i, j) = (__builtin_popcountll(i & (j + 1)) % 2 == 0) ? 1.0f : -1.0f;
  return m;
}

}  // namespace

TEST_SUITE("twins.loss") {
  TEST_CASE("identical decorrelated batches give zero loss") {
    const Matrix a = decorrelated_batch(16, 8);
    CHECK(std::abs(tw::barlow_twins_loss(a, a)) < 1e-6);
    // Affine rescaling per column does not change the standardized batch.
    Matrix b = a;
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 8; ++j) b(i, j) = 3.0f * a(i, j) + static_cast<float>(j);
    CHECK(std::abs(tw::barlow_twins_loss(a, b)) < 1e-6);
  }

  TEST_CASE("matches the naive oracle on random batches") {
    std::mt19937_64 gen(1);
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 4 + t % 9, f = 2 + t % 6;
      const Matrix a = oracle::random_matrix(n, f, gen), b = oracle::random_matrix(n, f, gen);
      const double lambda = t % 2 == 0 ? tw::kDefaultLambda : 0.1;
      CHECK(tw::barlow_twins_loss(a, b, lambda) ==
            doctest::Approx(naive_loss(oracle::to_dense(a), oracle::to_dense(b), lambda)).epsilon(1e-9));
    }
  }

  TEST_CASE("symmetric in its arguments") {
    std::mt19937_64 gen(2);
    const Matrix a = oracle::random_matrix(10, 5, gen), b = oracle::random_matrix(10, 5, gen);
    CHECK(tw::barlow_twins_loss(a, b) == doctest::Approx(tw::barlow_twins_loss(b, a)).epsilon(1e-12));
  }

  TEST_CASE("gradient matches central differences of the oracle") {
    std::mt19937_64 gen(3);
    const Matrix a = oracle::random_matrix(8, 4, gen), b = oracle::random_matrix(8, 4, gen);
    const auto lg = tw::barlow_twins_loss_and_grad(a, b, 0.05);
    const double h = 1e-5;
    double worst = 0.0;
    for (int side = 0; side < 2; ++side)
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          auto da = oracle::to_dense(a), db = oracle::to_dense(b);
          auto& x = side == 0 ? da : db;
          const double x0 = x[i][j];
          x[i][j] = x0 + h;
          const double up = naive_loss(da, db, 0.05);
          x[i][j] = x0 - h;
          const double dn = naive_loss(da, db, 0.05);
          const double fd = (up - dn) / (2.0 * h);
          const double an = side == 0 ? lg.grad_a(i, j) : lg.grad_b(i, j);
          worst = std::max(worst, std::abs(an - fd) / std::max(1e-3, std::abs(fd) + std::abs(an)));
        }
    CHECK(worst < 1e-3);
  }

  TEST_CASE("degenerate and mismatched batches are rejected") {
    Matrix a(4, 2), b(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      a(i, 0) = b(i, 0) = b(i, 1) = static_cast<float>(i);
      a(i, 1) = 7.0f;
    }
    CHECK_ERROR_KIND(tw::barlow_twins_loss(a, b), ErrorKind::kDegenerate);
    CHECK_ERROR_KIND(tw::barlow_twins_loss(a, Matrix(5, 2)), ErrorKind::kShape);
    CHECK_ERROR_KIND(tw::barlow_twins_loss(Matrix(1, 2), Matrix(1, 2)), ErrorKind::kContract);
  }
}

TEST_SUITE("twins.windows") {
  TEST_CASE("default window is half the length, capped") {
    CHECK(tw::default_window(10) == 5);
    CHECK(tw::default_window(1) == 1);
    CHECK(tw::default_window(1000) == 64);
    CHECK(tw::default_window(1000, 16) == 16);
  }

  TEST_CASE("windows copy the right frames and cover every start") {
    Matrix frames(10, 2);
    for (std::size_t t = 0; t < 10; ++t) {
      frames(t, 0) = static_cast<float>(t);
      frames(t, 1) = -static_cast<float>(t);
    }
    const tw::FeatureSequence seq{frames};
    SeededRng rng(4);
    std::vector<int> seen(7, 0);
    for (int k = 0; k < 500; ++k) {
      const auto p = tw::sample_window_pair(seq, 4, rng);
      REQUIRE(p.first_start <= 6);
      REQUIRE(p.second_start <= 6);
      ++seen[p.first_start];
      for (std::size_t r = 0; r < 4; ++r) {
        CHECK(p.first(r, 0) == static_cast<float>(p.first_start + r));
        CHECK(p.second(r, 1) == -static_cast<float>(p.second_start + r));
      }
    }
    for (int c : seen) CHECK(c > 0);
  }

  TEST_CASE("same seed gives the same windows; oversize windows are rejected") {
    const tw::FeatureSequence seq{Matrix(12, 3)};
    SeededRng a(5), b(5);
    const auto pa = tw::sample_window_pair(seq, 6, a), pb = tw::sample_window_pair(seq, 6, b);
    CHECK(pa.first_start == pb.first_start);
    CHECK(pa.second_start == pb.second_start);
    CHECK_ERROR_KIND(tw::sample_window_pair(seq, 13, a), ErrorKind::kContract);
    CHECK_ERROR_KIND(tw::sample_window_pair(seq, 0, a), ErrorKind::kContract);
  }

  TEST_CASE("l1 pair distance") {
    const std::vector<float> a{1, -2, 3}, b{0, 2, 3};
    CHECK(tw::l1_pair_distance(a, b) == 5.0);
    CHECK(tw::l1_pair_distance(a, a) == 0.0);
    CHECK_ERROR_KIND(tw::l1_pair_distance(a, std::vector<float>(2)), ErrorKind::kShape);
  }
}
