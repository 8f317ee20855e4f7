#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "rbon/cost.hpp"
#include "rbon/reference.hpp"
#include "rbon/types.hpp"

namespace rbon {

enum class Method { kBon, kMbr, kRbonKl, kRbonWd, kRbonL, kSrbonKl, kSrbonWd, kRandom };

std::string_view to_string(Method method);
// Accepts bon, mbr, rbon_kl, rbon_wd, rbon_l, srbon_kl, srbon_wd, random.
// Throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);
// Methods that take a beta.
bool is_regularized(Method method);
bool is_stochastic(Method method);

struct Selection {
  std::size_t index = 0;
  double score = 0.0;
  Method method = Method::kBon;
  std::optional<double> beta;
};

struct StochasticPolicy {
  Policy policy;
  Method method;
  double beta;
  double objective_value;
};

// All selectors break ties towards the lowest index. Missing reward keys
// raise DataError; bad arguments std::invalid_argument.

Selection select_bon(const CandidatePool& pool, std::string_view reward_key);

// argmax of the mean cosine similarity to the pool, i.e. argmin of
// mean_cost_row. The score is the mean similarity.
Selection select_mbr(const CandidatePool& pool, const CostMatrix& cost);

// argmax R_i - beta * mean_cost_row(C, i).
Selection select_rbon_wd(const CandidatePool& pool, const CostMatrix& cost,
                         std::string_view reward_key, double beta);

// argmax R_i + beta * log ref_i. A zero ref entry is rejected when beta > 0.
Selection select_rbon_kl(const CandidatePool& pool, const Policy& ref, std::string_view reward_key,
                         double beta);

// argmax R_i - beta / token_len_i.
Selection select_rbon_l(const CandidatePool& pool, std::string_view reward_key, double beta);

// pi(i) proportional to ref_i exp(R_i / beta); beta > 0 and ref > 0.
// objective_value = beta * log sum_i ref_i exp(R_i / beta).
StochasticPolicy srbon_kl_policy(const CandidatePool& pool, const Policy& ref,
                                 std::string_view reward_key, double beta);

// Every source i moves its ref mass to argmax_j R_j - beta C_ij.
// objective_value = sum_i ref_i max_j (R_j - beta C_ij).
StochasticPolicy srbon_wd_policy(const CandidatePool& pool, const Policy& ref,
                                 const CostMatrix& cost, std::string_view reward_key, double beta);

// Inverse-CDF draw with one Rng(seed).uniform(). Indices with zero
// probability are never returned.
std::size_t sample_policy(const Policy& policy, std::uint64_t seed);
inline std::size_t sample_policy(const StochasticPolicy& p, std::uint64_t seed) {
  return sample_policy(p.policy, seed);
}

// E_pi[R] - beta KL(pi || ref), with 0 log 0 = 0. Throws
// std::invalid_argument if pi puts mass where ref has none.
double objective_kl(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                    std::string_view reward_key, double beta);

// E_pi[R] - beta WD(ref, pi).
double objective_wd(const Policy& pi, const CandidatePool& pool, const Policy& ref,
                    const CostMatrix& cost, std::string_view reward_key, double beta);

double expected_reward(const Policy& pi, std::span<const double> rewards);

// mu'_i proportional to 1 / token_len_i.
Policy length_distribution(const CandidatePool& pool);

// Total variation distance between the point mass at i and mu'.
double tv_pointmass(const Policy& mu_prime, std::size_t i);

// Reference used when the caller does not choose one: the model softmax for
// the KL methods, the empirical distribution otherwise.
ReferenceSpec default_reference(Method method);

// Runs one method on one pool. `ref` is ignored by methods that do not take
// one (rbon_wd always uses the empirical distribution), `cost` by methods
// that do not need it. Stochastic methods and random draw with `pool_seed`
// and report the attained objective (random: the reward of the draw, NaN
// when reward_key is empty).
Selection run_method(Method method, const CandidatePool& pool, std::string_view reward_key,
                     std::optional<double> beta, const Policy& ref, const CostMatrix& cost,
                     std::uint64_t pool_seed);

}  // namespace rbon
