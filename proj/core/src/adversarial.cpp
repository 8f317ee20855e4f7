#include "rbon/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rbon/policies.hpp"
#include "rbon/transport.hpp"

namespace rbon {

std::string_view to_string(Theorem theorem) { return theorem == Theorem::kKl ? "kl" : "wd"; }

std::vector<double> kl_worst_case(const Policy& pi, const Policy& ref, double beta) {
  if (pi.size() != ref.size()) throw std::invalid_argument("kl_worst_case: size mismatch");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("kl_worst_case: beta must be positive and finite");
  }
  std::vector<double> dr(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] == 0.0) {
      dr[i] = -kKlFloorScale * beta;
    } else if (ref[i] == 0.0) {
      throw std::invalid_argument("kl_worst_case: pi has mass outside the support of ref at " +
                                  std::to_string(i));
    } else {
      dr[i] = beta * std::log(pi[i] / ref[i]);
    }
  }
  return dr;
}

DualityReport verify_theorem_kl(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                std::string_view reward_key, double beta, double tol) {
  DualityReport report;
  report.theorem = Theorem::kKl;
  report.floor = -kKlFloorScale * beta;
  report.perturbation = kl_worst_case(pi, ref, beta);
  report.regularized_value = objective_kl(pi, pool, ref, reward_key, beta);

  const auto r = pool.rewards(reward_key);
  double adversarial = 0.0;
  double boundary = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    boundary += ref[i] * std::exp(report.perturbation[i] / beta);
    if (pi[i] > 0.0) {
      adversarial += pi[i] * (r[i] - report.perturbation[i]);
      mass += pi[i];
    }
  }
  report.adversarial_value = adversarial;
  report.gap = std::abs(report.regularized_value - report.adversarial_value);
  report.feasibility_residual = std::abs(boundary - mass);
  report.passed = report.gap <= tol && report.feasibility_residual <= 1e-9;
  return report;
}

std::vector<double> wd_worst_case(const Policy& pi, const Policy& ref, const CostMatrix& cost) {
  return wd_dual(pi, ref, cost).potential.f;
}

DualityReport verify_theorem_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                const CostMatrix& cost, std::string_view reward_key, double beta,
                                double tol) {
  return verify_theorem_wd(pi, pool, ref, cost, cost, reward_key, beta, tol);
}

DualityReport verify_theorem_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                                const CostMatrix& cost, const CostMatrix& dual_cost,
                                std::string_view reward_key, double beta, double tol) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("verify_theorem_wd: beta must be non-negative and finite");
  }
  DualityReport report;
  report.theorem = Theorem::kWd;
  report.perturbation = wd_worst_case(pi, ref, dual_cost);
  report.regularized_value = objective_wd(pi, pool, ref, cost, reward_key, beta);

  const auto r = pool.rewards(reward_key);
  double value = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    value += pi[i] * (r[i] - beta * report.perturbation[i]) + beta * ref[i] * report.perturbation[i];
  }
  report.adversarial_value = value;
  report.gap = std::abs(report.regularized_value - report.adversarial_value);
  const LipschitzCheck lip = check_lipschitz(report.perturbation, cost, 1e-8);
  report.feasibility_residual = std::max(0.0, lip.violation);
  report.passed = report.gap <= tol && lip.ok;
  return report;
}

}  // namespace rbon
