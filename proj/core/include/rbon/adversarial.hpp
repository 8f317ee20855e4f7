#pragma once

#include <string_view>
#include <vector>

#include "rbon/cost.hpp"
#include "rbon/types.hpp"

namespace rbon {

enum class Theorem { kKl, kWd };
std::string_view to_string(Theorem theorem);

struct DualityReport {
  double regularized_value = 0.0;
  double adversarial_value = 0.0;
  double gap = 0.0;  // |regularized_value - adversarial_value|
  std::vector<double> perturbation;
  // KL: |sum ref exp(dR / beta) - sum_{pi > 0} pi|.
  // WD: largest |dR_i - dR_j| - C_ij, clipped at 0.
  double feasibility_residual = 0.0;
  Theorem theorem = Theorem::kKl;
  bool passed = false;
  // Value written into dR where pi_i = 0 (KL only).
  double floor = 0.0;
};

constexpr double kKlFloorScale = 1e6;

// dR_i = beta log(pi_i / ref_i), and -kKlFloorScale * beta where pi_i = 0.
// Throws std::invalid_argument if beta <= 0 or pi puts mass where ref has
// none.
std::vector<double> kl_worst_case(const Policy& pi, const Policy& ref, double beta);

// Compares E_pi[R - dR*] with E_pi[R] - beta KL(pi || ref). Passes when the
// gap is within tol and the boundary residual within 1e-9.
DualityReport verify_theorem_kl(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                std::string_view reward_key, double beta, double tol = 1e-8);

// A C-Lipschitz maximiser of sum_i f_i (pi_i - ref_i): the potential of
// wd_dual(pi, ref, C).
std::vector<double> wd_worst_case(const Policy& pi, const Policy& ref, const CostMatrix& cost);

// Compares E_pi[R - beta dR*] + beta <ref, dR*> with objective_wd(pi).
// Passes when the gap is within tol and dR* is Lipschitz within 1e-8.
DualityReport verify_theorem_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                const CostMatrix& cost, std::string_view reward_key, double beta,
                                double tol = 1e-6);

// As above, but the perturbation is computed against `dual_cost` while the
// regularized value and the Lipschitz check still use `cost`. Passing a
// distorted dual_cost gives a negative control.
DualityReport verify_theorem_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                const CostMatrix& cost, const CostMatrix& dual_cost,
                                std::string_view reward_key, double beta, double tol);

}  // namespace rbon
