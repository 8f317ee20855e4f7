#include "rbon/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "rbon/random.hpp"
#include "rbon/transport.hpp"

namespace rbon {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodNames{{
    {Method::kBon, "bon"},
    {Method::kMbr, "mbr"},
    {Method::kRbonKl, "rbon_kl"},
    {Method::kRbonWd, "rbon_wd"},
    {Method::kRbonL, "rbon_l"},
    {Method::kSrbonKl, "srbon_kl"},
    {Method::kSrbonWd, "srbon_wd"},
    {Method::kRandom, "random"},
}};

void require_nonempty(const CandidatePool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("pool '" + pool.prompt_id + "' is empty");
}

void require_beta(double beta, bool strictly_positive) {
  if (!std::isfinite(beta) || beta < 0.0 || (strictly_positive && beta == 0.0)) {
    throw std::invalid_argument(strictly_positive ? "beta must be positive and finite"
                                                  : "beta must be non-negative and finite");
  }
}

void require_size(std::size_t n, std::size_t expected, const char* what) {
  if (n != expected) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

// First index of the maximum.
Selection argmax(std::span<const double> scores, Method method, std::optional<double> beta) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return {best, scores[best], method, beta};
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool is_regularized(Method method) {
  switch (method) {
    case Method::kRbonKl:
    case Method::kRbonWd:
    case Method::kRbonL:
    case Method::kSrbonKl:
    case Method::kSrbonWd:
      return true;
    default:
      return false;
  }
}

bool is_stochastic(Method method) {
  return method == Method::kSrbonKl || method == Method::kSrbonWd || method == Method::kRandom;
}

Selection select_bon(const CandidatePool& pool, std::string_view reward_key) {
  require_nonempty(pool);
  const auto r = pool.rewards(reward_key);
  return argmax(r, Method::kBon, std::nullopt);
}

Selection select_mbr(const CandidatePool& pool, const CostMatrix& cost) {
  require_nonempty(pool);
  require_size(cost.size(), pool.size(), "select_mbr");
  std::vector<double> utility(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) utility[i] = 1.0 - mean_cost_row(cost, i);
  return argmax(utility, Method::kMbr, std::nullopt);
}

Selection select_rbon_wd(const CandidatePool& pool, const CostMatrix& cost,
                         std::string_view reward_key, double beta) {
  require_nonempty(pool);
  require_size(cost.size(), pool.size(), "select_rbon_wd");
  require_beta(beta, false);
  auto s = pool.rewards(reward_key);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] -= beta * mean_cost_row(cost, i);
  return argmax(s, Method::kRbonWd, beta);
}

Selection select_rbon_kl(const CandidatePool& pool, const Policy& ref, std::string_view reward_key,
                         double beta) {
  require_nonempty(pool);
  require_size(ref.size(), pool.size(), "select_rbon_kl");
  require_beta(beta, false);
  auto s = pool.rewards(reward_key);
  if (beta > 0.0) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (ref[i] <= 0.0) {
        throw std::invalid_argument("select_rbon_kl: reference probability is zero at " +
                                    std::to_string(i));
      }
      s[i] += beta * std::log(ref[i]);
    }
  }
  return argmax(s, Method::kRbonKl, beta);
}

Selection select_rbon_l(const CandidatePool& pool, std::string_view reward_key, double beta) {
  require_nonempty(pool);
  require_beta(beta, false);
  auto s = pool.rewards(reward_key);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] -= beta / static_cast<double>(pool.candidates[i].token_len);
  }
  return argmax(s, Method::kRbonL, beta);
}

StochasticPolicy srbon_kl_policy(const CandidatePool& pool, const Policy& ref,
                                 std::string_view reward_key, double beta) {
  require_nonempty(pool);
  require_size(ref.size(), pool.size(), "srbon_kl_policy");
  require_beta(beta, true);
  const auto r = pool.rewards(reward_key);
  const std::size_t n = r.size();
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ref[i] <= 0.0) {
      throw std::invalid_argument("srbon_kl_policy: reference probability is zero at " +
                                  std::to_string(i));
    }
    logw[i] = std::log(ref[i]) + r[i] / beta;
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  std::vector<double> p(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(logw[i] - m);
    z += p[i];
  }
  for (double& x : p) x /= z;
  const double objective = beta * (m + std::log(z));
  return {Policy(std::move(p)), Method::kSrbonKl, beta, objective};
}

StochasticPolicy srbon_wd_policy(const CandidatePool& pool, const Policy& ref,
                                 const CostMatrix& cost, std::string_view reward_key, double beta) {
  require_nonempty(pool);
  require_size(ref.size(), pool.size(), "srbon_wd_policy");
  require_size(cost.size(), pool.size(), "srbon_wd_policy");
  require_beta(beta, false);
  const auto r = pool.rewards(reward_key);
  const std::size_t n = r.size();
  std::vector<double> p(n, 0.0);
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ref[i] == 0.0) continue;
    std::size_t best = 0;
    double best_value = r[0] - beta * cost(i, 0);
    for (std::size_t j = 1; j < n; ++j) {
      const double v = r[j] - beta * cost(i, j);
      if (v > best_value) {
        best_value = v;
        best = j;
      }
    }
    p[best] += ref[i];
    objective += ref[i] * best_value;
  }
  // Rounding in the sums above; a policy that lands on one candidate comes
  // out as an exact point mass.
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return {Policy(std::move(p)), Method::kSrbonWd, beta, objective};
}

std::size_t sample_policy(const Policy& policy, std::uint64_t seed) {
  if (policy.size() == 0) throw std::invalid_argument("sample_policy: empty policy");
  const double u = Rng(seed).uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (policy[i] <= 0.0) continue;
    cum += policy[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;
}

double expected_reward(const Policy& pi, std::span<const double> rewards) {
  require_size(rewards.size(), pi.size(), "expected_reward");
  double s = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) s += pi[i] * rewards[i];
  return s;
}

double objective_kl(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                    std::string_view reward_key, double beta) {
  require_size(pi.size(), pool.size(), "objective_kl");
  require_size(ref.size(), pool.size(), "objective_kl");
  const auto r = pool.rewards(reward_key);
  double kl = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] == 0.0) continue;
    if (ref[i] == 0.0) {
      throw std::invalid_argument("objective_kl: pi is not absolutely continuous with respect to "
                                  "ref at " + std::to_string(i));
    }
    kl += pi[i] * std::log(pi[i] / ref[i]);
  }
  return expected_reward(pi, r) - beta * kl;
}

double objective_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                    const CostMatrix& cost, std::string_view reward_key, double beta) {
  require_size(pi.size(), pool.size(), "objective_wd");
  const auto r = pool.rewards(reward_key);
  return expected_reward(pi, r) - beta * wd_primal(ref, pi, cost).value;
}

Policy length_distribution(const CandidatePool& pool) {
  require_nonempty(pool);
  std::vector<double> p(pool.size());
  double z = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    p[i] = 1.0 / static_cast<double>(pool.candidates[i].token_len);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return Policy(std::move(p));
}

double tv_pointmass(const Policy& mu_prime, std::size_t i) {
  if (i >= mu_prime.size()) throw std::out_of_range("tv_pointmass: index out of range");
  double s = 0.0;
  for (std::size_t j = 0; j < mu_prime.size(); ++j) {
    s += std::abs((j == i ? 1.0 : 0.0) - mu_prime[j]);
  }
  return 0.5 * s;
}

ReferenceSpec default_reference(Method method) {
  if (method == Method::kRbonKl || method == Method::kSrbonKl) {
    return {ReferenceMode::kLogprob, 1.0};
  }
  return {ReferenceMode::kEmpirical, 1.0};
}

Selection run_method(Method method, const CandidatePool& pool, std::string_view reward_key,
                     std::optional<double> beta, const Policy& ref, const CostMatrix& cost,
                     std::uint64_t pool_seed) {
  if (is_regularized(method) && !beta) {
    throw std::invalid_argument(std::string(to_string(method)) + " requires beta");
  }
  switch (method) {
    case Method::kBon:
      return select_bon(pool, reward_key);
    case Method::kMbr:
      return select_mbr(pool, cost);
    case Method::kRbonKl:
      return select_rbon_kl(pool, ref, reward_key, *beta);
    case Method::kRbonWd:
      return select_rbon_wd(pool, cost, reward_key, *beta);
    case Method::kRbonL:
      return select_rbon_l(pool, reward_key, *beta);
    case Method::kSrbonKl:
    case Method::kSrbonWd: {
      const StochasticPolicy p = method == Method::kSrbonKl
                                     ? srbon_kl_policy(pool, ref, reward_key, *beta)
                                     : srbon_wd_policy(pool, ref, cost, reward_key, *beta);
      return {sample_policy(p, pool_seed), p.objective_value, method, beta};
    }
    case Method::kRandom: {
      require_nonempty(pool);
      const std::size_t i = sample_policy(Policy::uniform(pool.size()), pool_seed);
      const double score = reward_key.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : pool.candidates[i].reward(reward_key);
      return {i, score, method, std::nullopt};
    }
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace rbon
