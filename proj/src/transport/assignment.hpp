#pragma once

#include <cstddef>
#include <vector>

#include "ndmath/matrix.hpp"

namespace egan::transport {

// n x n quadratic ground cost, rows = real samples, cols = fake samples.
// Entries are held in double for the solve.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t n, std::vector<double> entries);

  std::size_t n() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
  const std::vector<double>& entries() const noexcept { return c_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> c_;
};

// entry_ij = ||x_i - y_j||^2 / (2k).
CostMatrix cost_matrix(const nd::Matrix& x, const nd::Matrix& y, double k);

struct TransportPlan {
  std::vector<std::size_t> assignment;  // row i is matched to column assignment[i]
  std::vector<double> u;                // row potentials, gauge min_i u_i = 0
  std::vector<double> v;                // column potentials
  double cost = 0.0;                    // mean matched cost

  double total_cost() const { return cost * static_cast<double>(assignment.size()); }
};

// Exact assignment by shortest augmenting paths with row/column potentials.
// Rows are inserted in index order and ties pick the lowest column index.
TransportPlan solve_assignment(const CostMatrix& c);

struct CriticTargets {
  std::vector<float> real;  // u_i
  std::vector<float> fake;  // -v_j
};

CriticTargets critic_targets(const TransportPlan& plan);

// Largest violation of u_i + v_j <= c_ij, and of equality on matched pairs.
struct DualCheck {
  double max_feasibility_violation = 0.0;
  double max_slackness_gap = 0.0;
  double duality_gap = 0.0;
};
DualCheck check_duals(const CostMatrix& c, const TransportPlan& plan);

}  // namespace egan::transport
