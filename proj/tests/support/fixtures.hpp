#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rbon/cost.hpp"
#include "rbon/random.hpp"
#include "rbon/types.hpp"

namespace fixtures {

// Pool with a "proxy" reward per candidate. Embeddings default to distinct
// basis-like vectors; lengths default to 10.
inline rbon::CandidatePool make_pool(const std::vector<double>& rewards,
                                     std::vector<std::vector<double>> embeddings = {},
                                     std::vector<long> lengths = {},
                                     std::vector<double> logprobs = {}) {
  rbon::CandidatePool pool;
  pool.prompt_id = "p";
  const std::size_t n = rewards.size();
  for (std::size_t i = 0; i < n; ++i) {
    rbon::Candidate c;
    c.rewards["proxy"] = rewards[i];
    if (embeddings.empty()) {
      c.embedding.assign(n + 1, 0.1);
      c.embedding[i] = 1.0;
    } else {
      c.embedding = embeddings[i];
    }
    c.token_len = lengths.empty() ? 10 : lengths[i];
    if (!logprobs.empty()) c.logprob_ref = logprobs[i];
    pool.candidates.push_back(std::move(c));
  }
  return pool;
}

// Dirichlet(1, ..., 1). With zero_prob > 0 each entry is dropped with that
// probability (at least one entry is kept).
inline std::vector<double> random_simplex(rbon::Rng& rng, std::size_t n, double zero_prob = 0.0) {
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) {
    x = -std::log(1.0 - rng.uniform());
    if (zero_prob > 0.0 && rng.uniform() < zero_prob) x = 0.0;
    s += x;
  }
  if (s == 0.0) {
    p[rng.below(n)] = 1.0;
    return p;
  }
  for (double& x : p) x /= s;
  return p;
}

inline rbon::Policy random_policy(rbon::Rng& rng, std::size_t n, double zero_prob = 0.0) {
  return rbon::Policy(random_simplex(rng, n, zero_prob));
}

inline std::vector<std::vector<double>> random_embeddings(rbon::Rng& rng, std::size_t n,
                                                          std::size_t d) {
  std::vector<std::vector<double>> e(n, std::vector<double>(d));
  for (auto& v : e) {
    for (double& x : v) x = rng.normal();
  }
  return e;
}

// Symmetric, zero diagonal, off-diagonal entries uniform in [0, 2].
inline rbon::CostMatrix random_cost(rbon::Rng& rng, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      v[i * n + j] = v[j * n + i] = 2.0 * rng.uniform();
    }
  }
  return rbon::CostMatrix(n, std::move(v));
}

// Chordal distance between normalised embeddings: a metric with entries in
// [0, 2].
inline rbon::CostMatrix random_metric_cost(rbon::Rng& rng, std::size_t n, std::size_t d) {
  auto e = random_embeddings(rng, n, d);
  for (auto& v : e) {
    double s = 0.0;
    for (double x : v) s += x * x;
    for (double& x : v) x /= std::sqrt(s);
  }
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += (e[i][k] - e[j][k]) * (e[i][k] - e[j][k]);
      c[i * n + j] = c[j * n + i] = std::min(2.0, std::sqrt(s));
    }
  }
  return rbon::CostMatrix(n, std::move(c));
}

// Pool with random rewards, embeddings, lengths in [1, 200] and logprobs.
inline rbon::CandidatePool random_pool(rbon::Rng& rng, std::size_t n, std::size_t d,
                                       std::string id = "p") {
  rbon::CandidatePool pool;
  pool.prompt_id = std::move(id);
  const auto e = random_embeddings(rng, n, d);
  for (std::size_t i = 0; i < n; ++i) {
    rbon::Candidate c;
    c.rewards["proxy"] = rng.normal();
    c.rewards["gold"] = rng.normal();
    c.embedding = e[i];
    c.token_len = 1 + static_cast<long>(rng.below(200));
    c.logprob_ref = -5.0 * rng.uniform();
    pool.candidates.push_back(std::move(c));
  }
  return pool;
}

inline std::vector<double> to_vector(const rbon::Policy& p) {
  return {p.probs().begin(), p.probs().end()};
}

inline std::vector<double> to_vector(const rbon::CostMatrix& c) {
  return {c.values().begin(), c.values().end()};
}

}  // namespace fixtures
