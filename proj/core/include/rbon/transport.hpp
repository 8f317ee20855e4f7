#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rbon/cost.hpp"
#include "rbon/types.hpp"

namespace rbon {

// Coupling between source (row marginal) and target (column marginal).
struct TransportPlan {
  std::size_t n = 0;
  std::vector<double> gamma;  // row-major n x n
  Policy source;
  Policy target;

  double operator()(std::size_t i, std::size_t j) const { return gamma[i * n + j]; }
  // Largest absolute deviation of a row or column sum from its marginal.
  double marginal_residual() const;
};

struct DualPotential {
  std::vector<double> f;
};

struct PrimalResult {
  double value = 0.0;
  TransportPlan plan;
};

struct DualResult {
  double value = 0.0;
  DualPotential potential;
};

// min over couplings of sum_ij C_ij gamma_ij. Exact (network simplex).
// Throws std::invalid_argument on size mismatch.
PrimalResult wd_primal(const Policy& nu, const Policy& mu, const CostMatrix& cost);

// max_f sum_i f_i nu_i - sum_j f_j mu_j  s.t.  |f_i - f_j| <= C_ij.
//
// The returned potential is C-Lipschitz (checked before returning) and is
// normalised so that sum_j mu_j f_j = 0. The value equals wd_primal under
// the shortest-path closure of C, so it matches wd_primal itself whenever C
// satisfies the triangle inequality and can fall below it otherwise.
DualResult wd_dual(const Policy& nu, const Policy& mu, const CostMatrix& cost);

// f^c_j = min_i (C_ij - f_i).
std::vector<double> c_transform(std::span<const double> f, const CostMatrix& cost);

// |wd_primal - wd_dual|.
double duality_gap(const Policy& nu, const Policy& mu, const CostMatrix& cost);

struct LipschitzCheck {
  bool ok = true;
  std::size_t i = 0;
  std::size_t j = 0;
  // max over pairs of |f_i - f_j| - C_ij, attained at (i, j).
  double violation = 0.0;
};

LipschitzCheck check_lipschitz(std::span<const double> f, const CostMatrix& cost, double tol);

}  // namespace rbon
