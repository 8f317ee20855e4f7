#include "rbon/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rbon/cost.hpp"
#include "rbon/random.hpp"

namespace rbon {
namespace {

bool needs_cost(Method m) {
  return m == Method::kMbr || m == Method::kRbonWd || m == Method::kSrbonWd;
}

bool needs_reference(Method m) {
  return m == Method::kRbonKl || m == Method::kSrbonKl || m == Method::kSrbonWd;
}

// Inputs that do not depend on beta, prepared once per pool.
struct PoolInputs {
  std::optional<CostMatrix> cost;
  Policy ref;
  std::uint64_t seed;
};

std::vector<PoolInputs> prepare(const Dataset& dataset, Method method, std::uint64_t seed,
                                const std::optional<ReferenceSpec>& ref) {
  const ReferenceSpec spec = ref.value_or(default_reference(method));
  std::vector<PoolInputs> out;
  out.reserve(dataset.pools.size());
  for (const auto& pool : dataset.pools) {
    std::optional<CostMatrix> cost;
    if (needs_cost(method)) cost.emplace(cost_matrix(pool));
    Policy r = needs_reference(method) ? make_reference(pool, spec) : Policy::uniform(pool.size());
    out.push_back({std::move(cost), std::move(r), derive_seed(seed, pool.prompt_id)});
  }
  return out;
}

std::vector<std::size_t> select_all(const Dataset& dataset, Method method,
                                    std::string_view proxy_key, std::optional<double> beta,
                                    const std::vector<PoolInputs>& inputs) {
  // Methods that ignore the cost still need a CostMatrix argument.
  static const CostMatrix kUnused(0, {});
  std::vector<std::size_t> out(dataset.pools.size());
  for (std::size_t p = 0; p < dataset.pools.size(); ++p) {
    const auto& in = inputs[p];
    out[p] = run_method(method, dataset.pools[p], proxy_key, beta, in.ref,
                        in.cost ? *in.cost : kUnused, in.seed)
                 .index;
  }
  return out;
}

std::vector<std::size_t> bon_indices(const Dataset& dataset, std::string_view proxy_key) {
  std::vector<std::size_t> out;
  out.reserve(dataset.pools.size());
  for (const auto& pool : dataset.pools) out.push_back(select_bon(pool, proxy_key).index);
  return out;
}

std::vector<double> mid_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::vector<double> logprobs(const CandidatePool& pool) {
  std::vector<double> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& lp = pool.candidates[i].logprob_ref;
    if (!lp) {
      throw DataError("pool '" + pool.prompt_id + "': candidate " + std::to_string(i) +
                      " has no logprob");
    }
    out.push_back(*lp);
  }
  return out;
}

}  // namespace

double win_rate(std::span<const std::size_t> selections, std::span<const std::size_t> baseline,
                const Dataset& dataset, std::string_view gold_key) {
  if (dataset.pools.empty()) throw std::invalid_argument("win_rate: empty dataset");
  if (selections.size() != dataset.pools.size() || baseline.size() != dataset.pools.size()) {
    throw std::invalid_argument("win_rate: expected one selection per pool");
  }
  double score = 0.0;
  for (std::size_t p = 0; p < dataset.pools.size(); ++p) {
    const auto& pool = dataset.pools[p];
    if (selections[p] >= pool.size() || baseline[p] >= pool.size()) {
      throw std::out_of_range("win_rate: index out of range for pool '" + pool.prompt_id + "'");
    }
    const double a = pool.candidates[selections[p]].reward(gold_key);
    const double b = pool.candidates[baseline[p]].reward(gold_key);
    if (a > b) {
      score += 1.0;
    } else if (a == b) {
      score += 0.5;
    }
  }
  return 100.0 * score / static_cast<double>(dataset.pools.size());
}

std::vector<double> beta_grid() {
  return {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2,
          1e-1, 2e-1, 5e-1, 1e0,  2e0,  5e0,  1e1,  2e1};
}

std::vector<std::size_t> run_selections(const Dataset& dataset, Method method,
                                        std::string_view proxy_key, std::optional<double> beta,
                                        std::uint64_t seed, std::optional<ReferenceSpec> ref) {
  return select_all(dataset, method, proxy_key, beta, prepare(dataset, method, seed, ref));
}

double method_win_rate(const Dataset& dataset, Method method, std::string_view proxy_key,
                       std::string_view gold_key, std::optional<double> beta, std::uint64_t seed,
                       std::optional<ReferenceSpec> ref) {
  const auto chosen = run_selections(dataset, method, proxy_key, beta, seed, ref);
  return win_rate(chosen, bon_indices(dataset, proxy_key), dataset, gold_key);
}

SweepReport beta_sweep(const Dataset& train, Method method, std::string_view proxy_key,
                       std::string_view gold_key, std::span<const double> grid,
                       std::uint64_t seed, std::optional<ReferenceSpec> ref) {
  if (!is_regularized(method)) {
    throw std::invalid_argument("beta_sweep: method '" + std::string(to_string(method)) +
                                "' takes no beta");
  }
  if (grid.empty()) throw std::invalid_argument("beta_sweep: empty grid");
  if (train.pools.empty()) throw std::invalid_argument("beta_sweep: empty dataset");

  SweepReport report;
  report.method = method;
  report.proxy_key = std::string(proxy_key);
  report.gold_key = std::string(gold_key);
  report.split_label = train.split_label;

  const auto inputs = prepare(train, method, seed, ref);
  const auto baseline = bon_indices(train, proxy_key);
  std::optional<SweepRow> best;
  for (double beta : grid) {
    const auto chosen = select_all(train, method, proxy_key, beta, inputs);
    const SweepRow row{beta, win_rate(chosen, baseline, train, gold_key)};
    report.rows.push_back(row);
    if (!best || row.win_rate_percent > best->win_rate_percent ||
        (row.win_rate_percent == best->win_rate_percent && row.beta < best->beta)) {
      best = row;
    }
  }
  report.beta_star = best->beta;
  return report;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least 2 observations");
  const auto rx = mid_ranks(xs);
  const auto ry = mid_ranks(ys);
  // Mid-ranks always average (n + 1) / 2.
  const double mean = 0.5 * static_cast<double>(xs.size() + 1);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman: zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> reward_correlation_matrix(const Dataset& dataset,
                                              std::span<const std::string> keys) {
  if (keys.size() < 2) throw std::invalid_argument("reward_correlation_matrix: need 2 keys");
  if (dataset.pools.empty()) throw std::invalid_argument("reward_correlation_matrix: empty dataset");
  const std::size_t k = keys.size();
  std::vector<double> m(k * k, 0.0);
  for (const auto& pool : dataset.pools) {
    std::vector<std::vector<double>> r;
    r.reserve(k);
    for (const auto& key : keys) r.push_back(pool.rewards(key));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const double rho = spearman(r[a], r[b]);
        m[a * k + b] += rho;
        m[b * k + a] += rho;
      }
    }
  }
  const double n = static_cast<double>(dataset.pools.size());
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) m[a * k + b] = a == b ? 1.0 : m[a * k + b] / n;
  }
  return m;
}

LogprobDiagnostics logprob_diagnostics(const Dataset& dataset, std::string_view gold_key,
                                       bool per_pool) {
  if (dataset.pools.empty()) throw std::invalid_argument("logprob_diagnostics: empty dataset");
  if (per_pool) {
    LogprobDiagnostics sum;
    for (const auto& pool : dataset.pools) {
      const auto lp = logprobs(pool);
      sum.rho_reward_logprob += spearman(pool.rewards(gold_key), lp);
      sum.rho_length_logprob += spearman(pool.token_lengths(), lp);
    }
    const double n = static_cast<double>(dataset.pools.size());
    return {sum.rho_reward_logprob / n, sum.rho_length_logprob / n};
  }
  std::vector<double> gold;
  std::vector<double> len;
  std::vector<double> lp;
  for (const auto& pool : dataset.pools) {
    const auto g = pool.rewards(gold_key);
    const auto l = pool.token_lengths();
    const auto p = logprobs(pool);
    gold.insert(gold.end(), g.begin(), g.end());
    len.insert(len.end(), l.begin(), l.end());
    lp.insert(lp.end(), p.begin(), p.end());
  }
  return {spearman(gold, lp), spearman(len, lp)};
}

}  // namespace rbon
