#include "rbon/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rbon {
namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Shared by cosine_cost and cost_matrix so both give bit-identical values.
// Identical vectors are special-cased to exactly 0 by both callers.
double cosine_from_parts(double ab, double na, double nb) {
  return std::clamp(1.0 - ab / (na * nb), 0.0, 2.0);
}

}  // namespace

double cosine_cost(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_cost: dimension mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_cost: zero-norm embedding");
  if (std::equal(a.begin(), a.end(), b.begin())) return 0.0;
  return cosine_from_parts(dot(a, b), na, nb);
}

CostMatrix::CostMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), values_(std::move(row_major)) {
  if (values_.size() != n * n) throw std::invalid_argument("CostMatrix: expected n*n values");
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw std::invalid_argument("CostMatrix: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double c = (*this)(i, j);
      if (!(c >= 0.0 && c <= 2.0)) {
        throw std::invalid_argument("CostMatrix: entry outside [0, 2] at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
      if (c != (*this)(j, i)) throw std::invalid_argument("CostMatrix: not symmetric");
    }
  }
}

CostMatrix CostMatrix::scaled(double factor) const {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw std::invalid_argument("CostMatrix::scaled: factor must be in [0, 1]");
  }
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return CostMatrix(n_, std::move(v));
}

CostMatrix cost_matrix(const CandidatePool& pool) {
  const std::size_t n = pool.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = norm(pool.candidates[i].embedding);
    if (norms[i] == 0.0) {
      throw std::invalid_argument("pool '" + pool.prompt_id + "': zero-norm embedding at " +
                                  std::to_string(i));
    }
  }
  const std::size_t dim = pool.embedding_dim();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = pool.candidates[i].embedding;
    if (a.size() != dim) throw std::invalid_argument("cost_matrix: dimension mismatch");
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = pool.candidates[j].embedding;
      const double c = a == b ? 0.0 : cosine_from_parts(dot(a, b), norms[i], norms[j]);
      v[i * n + j] = c;
      v[j * n + i] = c;
    }
  }
  return CostMatrix(n, std::move(v));
}

double mean_cost_row(const CostMatrix& cost, std::size_t i) {
  if (i >= cost.size()) throw std::out_of_range("mean_cost_row: index out of range");
  double s = 0.0;
  for (double c : cost.row(i)) s += c;
  return s / static_cast<double>(cost.size());
}

CostMatrix metric_closure(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  std::vector<double> d(cost.values().begin(), cost.values().end());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d[i * n + k];
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + d[k * n + j];
        if (via < d[i * n + j]) d[i * n + j] = via;
      }
    }
  }
  return CostMatrix(n, std::move(d));
}

double max_triangle_violation(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, cost(i, j) - cost(i, k) - cost(k, j));
      }
    }
  }
  return worst;
}

}  // namespace rbon
