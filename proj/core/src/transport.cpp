#include "rbon/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "network_simplex.hpp"

namespace rbon {
namespace {

void check_sizes(const Policy& nu, const Policy& mu, const CostMatrix& cost, const char* who) {
  if (nu.size() != cost.size() || mu.size() != cost.size()) {
    throw std::invalid_argument(std::string(who) + ": size mismatch");
  }
}

std::vector<std::size_t> support(const Policy& p) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) idx.push_back(i);
  }
  return idx;
}

struct Restricted {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  detail::TransportSolution solution;
};

Restricted solve_on_support(const Policy& nu, const Policy& mu, const CostMatrix& cost) {
  Restricted r{support(nu), support(mu), {}};
  std::vector<double> supply;
  std::vector<double> demand;
  for (std::size_t i : r.rows) supply.push_back(nu[i]);
  for (std::size_t j : r.cols) demand.push_back(mu[j]);
  std::vector<double> sub;
  sub.reserve(r.rows.size() * r.cols.size());
  for (std::size_t i : r.rows) {
    for (std::size_t j : r.cols) sub.push_back(cost(i, j));
  }
  r.solution = detail::solve_transport(supply, demand, sub);
  return r;
}

}  // namespace

double TransportPlan::marginal_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += gamma[i * n + j];
      col += gamma[j * n + i];
    }
    worst = std::max({worst, std::abs(row - source[i]), std::abs(col - target[i])});
  }
  return worst;
}

PrimalResult wd_primal(const Policy& nu, const Policy& mu, const CostMatrix& cost) {
  check_sizes(nu, mu, cost, "wd_primal");
  const std::size_t n = cost.size();
  std::vector<double> gamma(n * n, 0.0);
  if (nu == mu) {
    for (std::size_t i = 0; i < n; ++i) gamma[i * n + i] = nu[i];
    return {0.0, TransportPlan{n, std::move(gamma), nu, mu}};
  }
  const Restricted r = solve_on_support(nu, mu, cost);
  const std::size_t nc = r.cols.size();
  for (std::size_t a = 0; a < r.rows.size(); ++a) {
    for (std::size_t b = 0; b < nc; ++b) {
      gamma[r.rows[a] * n + r.cols[b]] = r.solution.flow[a * nc + b];
    }
  }
  return {r.solution.cost, TransportPlan{n, std::move(gamma), nu, mu}};
}

DualResult wd_dual(const Policy& nu, const Policy& mu, const CostMatrix& cost) {
  check_sizes(nu, mu, cost, "wd_dual");
  const std::size_t n = cost.size();
  if (nu == mu) return {0.0, DualPotential{std::vector<double>(n, 0.0)}};

  // Sink duals of the transport problem under the metric closure, extended
  // to every candidate by a c-transform. The result is Lipschitz with
  // respect to the closure and hence with respect to C.
  const CostMatrix closure = metric_closure(cost);
  const Restricted r = solve_on_support(nu, mu, closure);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < r.cols.size(); ++b) {
      best = std::min(best, closure(i, r.cols[b]) - r.solution.sink_dual[b]);
    }
    f[i] = best;
  }
  double shift = 0.0;
  for (std::size_t j = 0; j < n; ++j) shift += mu[j] * f[j];
  for (double& x : f) x -= shift;

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += f[i] * (nu[i] - mu[i]);

  const LipschitzCheck check = check_lipschitz(f, cost, 1e-8);
  if (!check.ok) {
    throw std::logic_error("wd_dual: potential violates the Lipschitz constraint at (" +
                           std::to_string(check.i) + ", " + std::to_string(check.j) + ")");
  }
  return {value, DualPotential{std::move(f)}};
}

std::vector<double> c_transform(std::span<const double> f, const CostMatrix& cost) {
  const std::size_t n = cost.size();
  if (f.size() != n) throw std::invalid_argument("c_transform: size mismatch");
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost(i, j) - f[i]);
    out[j] = best;
  }
  return out;
}

double duality_gap(const Policy& nu, const Policy& mu, const CostMatrix& cost) {
  return std::abs(wd_primal(nu, mu, cost).value - wd_dual(nu, mu, cost).value);
}

LipschitzCheck check_lipschitz(std::span<const double> f, const CostMatrix& cost, double tol) {
  const std::size_t n = cost.size();
  if (f.size() != n) throw std::invalid_argument("check_lipschitz: size mismatch");
  LipschitzCheck out;
  out.violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = std::abs(f[i] - f[j]) - cost(i, j);
      if (v > out.violation) {
        out.violation = v;
        out.i = i;
        out.j = j;
      }
    }
  }
  out.ok = out.violation <= tol;
  return out;
}

}  // namespace rbon
