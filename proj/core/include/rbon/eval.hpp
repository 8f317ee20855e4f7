#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbon/policies.hpp"
#include "rbon/reference.hpp"
#include "rbon/types.hpp"

namespace rbon {

// 100 * (wins + 0.5 ties) / pools, comparing gold(selection) with
// gold(baseline) by exact floating-point comparison. Throws
// std::invalid_argument on a length mismatch or an empty dataset.
double win_rate(std::span<const std::size_t> selections, std::span<const std::size_t> baseline,
                const Dataset& dataset, std::string_view gold_key);

// 1-2-5 ladder from 1e-4 to 2e1 inclusive: 17 values.
std::vector<double> beta_grid();

struct SweepRow {
  double beta = 0.0;
  double win_rate_percent = 0.0;
};

struct SweepReport {
  Method method = Method::kBon;
  std::string proxy_key;
  std::string gold_key;
  std::vector<SweepRow> rows;
  double beta_star = 0.0;
  std::string split_label;
};

// Per-pool selected indices for one method at one beta. Pools are selected
// with the proxy key; stochastic methods draw with derive_seed(seed,
// prompt_id). `ref` defaults to default_reference(method).
std::vector<std::size_t> run_selections(const Dataset& dataset, Method method,
                                        std::string_view proxy_key, std::optional<double> beta,
                                        std::uint64_t seed,
                                        std::optional<ReferenceSpec> ref = std::nullopt);

// Win rate against BoN (both selected with proxy_key, judged by gold_key).
double method_win_rate(const Dataset& dataset, Method method, std::string_view proxy_key,
                       std::string_view gold_key, std::optional<double> beta, std::uint64_t seed,
                       std::optional<ReferenceSpec> ref = std::nullopt);

// One row per grid value; beta_star is the best row, ties to the smallest
// beta. Only the regularized methods are accepted.
SweepReport beta_sweep(const Dataset& train, Method method, std::string_view proxy_key,
                       std::string_view gold_key, std::span<const double> grid,
                       std::uint64_t seed, std::optional<ReferenceSpec> ref = std::nullopt);

// Pearson correlation of mid-ranks. Throws std::invalid_argument when the
// lengths differ, are below 2, or either side has no rank variance.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Within-pool Spearman for every pair of keys, averaged over pools.
// Row-major keys.size() x keys.size() with a unit diagonal.
std::vector<double> reward_correlation_matrix(const Dataset& dataset,
                                              std::span<const std::string> keys);

struct LogprobDiagnostics {
  double rho_reward_logprob = 0.0;
  double rho_length_logprob = 0.0;
};

// Spearman of (gold, logprob) and (token_len, logprob). Pooled over every
// candidate of every pool, or averaged over per-pool values when per_pool is
// set. Throws DataError if any logprob is missing.
LogprobDiagnostics logprob_diagnostics(const Dataset& dataset, std::string_view gold_key,
                                       bool per_pool = false);

struct SynthParams {
  std::size_t n_pools = 10;
  std::size_t n_candidates = 16;
  std::size_t embed_dim = 8;
  double proxy_noise = 0.5;
  double length_bias = 0.5;
  std::uint64_t seed = 0;
};

// Deterministic synthetic pools with reward keys "proxy" and "gold".
// Embeddings scatter around a per-pool centre; gold is a smooth function of
// the embedding plus a length term; proxy = gold + proxy_noise * N(0, 1);
// logprob = -(length_bias * token_len + 1) * exp(0.2 * N(0, 1)).
// Throws std::invalid_argument for n_candidates < 1, embed_dim < 2, or a
// negative or non-finite proxy_noise / length_bias.
Dataset synth_pools(const SynthParams& params);

}  // namespace rbon
