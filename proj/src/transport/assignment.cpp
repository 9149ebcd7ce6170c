#include "transport/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "common/error.hpp"

namespace egan::transport {

CostMatrix::CostMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), c_(std::move(entries)) {
  require(c_.size() == n_ * n_, ErrorKind::kShape, "cost matrix must be square");
}

CostMatrix cost_matrix(const nd::Matrix& x, const nd::Matrix& y, double k) {
  require(x.rows() == y.rows(), ErrorKind::kContract,
          "cost_matrix: batch sizes differ (" + std::to_string(x.rows()) + " vs " +
              std::to_string(y.rows()) + ")");
  require(x.cols() == y.cols(), ErrorKind::kShape, "cost_matrix: embedding dimensions differ");
  require(k > 0.0, ErrorKind::kContract, "cost_matrix: scale k must be positive");
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> c(n * n);
  const double inv = 1.0 / (2.0 * k);
  for (std::size_t i = 0; i < n; ++i) {
    const float* xi = x.data() + i * d;
    for (std::size_t j = 0; j < n; ++j) {
      const float* yj = y.data() + j * d;
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = double{xi[t]} - yj[t];
        s += diff * diff;
      }
      c[i * n + j] = s * inv;
    }
  }
  return CostMatrix(n, std::move(c));
}

TransportPlan solve_assignment(const CostMatrix& c) {
  const std::size_t n = c.n();
  require(n >= 1, ErrorKind::kContract, "solve_assignment: empty cost matrix");
  for (double e : c.entries())
    require(std::isfinite(e), ErrorKind::kContract, "solve_assignment: non-finite cost");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0 that holds the row being inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  TransportPlan plan;
  plan.assignment.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) plan.assignment[match[j] - 1] = j - 1;
  plan.u.assign(u.begin() + 1, u.end());
  plan.v.assign(v.begin() + 1, v.end());
  const double gauge = *std::min_element(plan.u.begin(), plan.u.end());
  for (auto& x : plan.u) x -= gauge;
  for (auto& x : plan.v) x += gauge;

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += c(i, plan.assignment[i]);
  plan.cost = total / static_cast<double>(n);
  return plan;
}

CriticTargets critic_targets(const TransportPlan& plan) {
  require(plan.u.size() == plan.assignment.size() && plan.v.size() == plan.assignment.size(),
          ErrorKind::kContract, "critic_targets: inconsistent plan");
  CriticTargets t;
  t.real.reserve(plan.u.size());
  t.fake.reserve(plan.v.size());
  for (double x : plan.u) t.real.push_back(static_cast<float>(x));
  for (double x : plan.v) t.fake.push_back(static_cast<float>(-x));
  return t;
}

DualCheck check_duals(const CostMatrix& c, const TransportPlan& plan) {
  DualCheck r;
  const std::size_t n = c.n();
  double dual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dual += plan.u[i] + plan.v[i];
    for (std::size_t j = 0; j < n; ++j)
      r.max_feasibility_violation =
          std::max(r.max_feasibility_violation, plan.u[i] + plan.v[j] - c(i, j));
    r.max_slackness_gap =
        std::max(r.max_slackness_gap,
                 std::abs(plan.u[i] + plan.v[plan.assignment[i]] - c(i, plan.assignment[i])));
  }
  r.duality_gap = std::abs(dual - plan.total_cost());
  return r;
}

}  // namespace egan::transport
