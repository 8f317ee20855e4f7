#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rbon/types.hpp"

namespace rbon {

// 1 - cos(a, b), clamped to [0, 2]. Throws std::invalid_argument on a
// dimension mismatch or a zero-norm input.
double cosine_cost(std::span<const double> a, std::span<const double> b);

// Dense N x N cost matrix with zero diagonal, exact symmetry and entries in
// [0, 2]. The triangle inequality is not required.
class CostMatrix {
public:
  // Validates the invariants above; throws std::invalid_argument.
  CostMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }
  std::span<const double> values() const { return values_; }

  // Entrywise scaling; factor must lie in [0, 1] so entries stay in [0, 2].
  CostMatrix scaled(double factor) const;

private:
  std::size_t n_;
  std::vector<double> values_;
};

// C(y_i, y_j) for every pair of candidates; the diagonal is exactly 0.
CostMatrix cost_matrix(const CandidatePool& pool);

// (1/N) sum_j C[i][j]: the 1-Wasserstein distance between the point mass at
// i and the uniform distribution over the pool.
double mean_cost_row(const CostMatrix& cost, std::size_t i);

// Shortest-path closure: the largest metric that lies entrywise below C.
// Equal to C exactly when C satisfies the triangle inequality.
CostMatrix metric_closure(const CostMatrix& cost);

// max over (i, j, k) of C_ij - C_ik - C_kj, or 0 when C is a metric.
double max_triangle_violation(const CostMatrix& cost);

}  // namespace rbon
