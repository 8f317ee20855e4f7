#include "rbon/types.hpp"

#include <cmath>
#include <numeric>

namespace rbon {

double Candidate::reward(std::string_view key) const {
  auto it = rewards.find(key);
  if (it == rewards.end()) {
    throw DataError("candidate has no reward '" + std::string(key) + "'");
  }
  return it->second;
}

std::size_t CandidatePool::embedding_dim() const {
  return candidates.empty() ? 0 : candidates.front().embedding.size();
}

std::vector<double> CandidatePool::rewards(std::string_view key) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto it = candidates[i].rewards.find(key);
    if (it == candidates[i].rewards.end()) {
      throw DataError("pool '" + prompt_id + "': candidate " + std::to_string(i) +
                      " has no reward '" + std::string(key) + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<double> CandidatePool::token_lengths() const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(static_cast<double>(c.token_len));
  return out;
}

bool CandidatePool::has_logprobs() const {
  for (const auto& c : candidates) {
    if (!c.logprob_ref) return false;
  }
  return true;
}

void validate_pool(const CandidatePool& pool) {
  const std::string where = "pool '" + pool.prompt_id + "'";
  if (pool.candidates.empty()) throw DataError(where + ": no candidates");
  const std::size_t dim = pool.embedding_dim();
  if (dim == 0) throw DataError(where + ": empty embedding");
  for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
    const auto& c = pool.candidates[i];
    const std::string who = where + " candidate " + std::to_string(i);
    if (c.token_len < 1) throw DataError(who + ": token_len must be >= 1");
    if (c.logprob_ref && !(*c.logprob_ref <= 0.0)) {
      throw DataError(who + ": logprob must be <= 0");
    }
    if (c.embedding.size() != dim) {
      throw DataError(who + ": embedding dimension " + std::to_string(c.embedding.size()) +
                      " != " + std::to_string(dim));
    }
    double norm2 = 0.0;
    for (double x : c.embedding) {
      if (!std::isfinite(x)) throw DataError(who + ": non-finite embedding entry");
      norm2 += x * x;
    }
    if (norm2 == 0.0) throw DataError(who + ": zero-norm embedding");
    for (const auto& [name, value] : c.rewards) {
      if (!std::isfinite(value)) throw DataError(who + ": non-finite reward '" + name + "'");
    }
  }
}

Policy::Policy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("policy over an empty support");
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("policy entries must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("policy entries sum to " + std::to_string(sum));
  }
}

Policy Policy::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("policy over an empty support");
  return Policy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Policy Policy::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw std::out_of_range("point mass index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return Policy(std::move(p));
}

}  // namespace rbon
