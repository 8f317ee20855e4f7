#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rbon/eval.hpp"
#include "rbon/random.hpp"

namespace rbon {
namespace {

std::vector<double> gaussian_vector(Rng& rng, std::size_t d) {
  std::vector<double> v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Dataset synth_pools(const SynthParams& params) {
  if (params.n_candidates < 1) throw std::invalid_argument("synth_pools: n_candidates must be >= 1");
  if (params.embed_dim < 2) throw std::invalid_argument("synth_pools: embed_dim must be >= 2");
  if (!std::isfinite(params.proxy_noise) || params.proxy_noise < 0.0) {
    throw std::invalid_argument("synth_pools: proxy_noise must be finite and >= 0");
  }
  if (!std::isfinite(params.length_bias) || params.length_bias < 0.0) {
    throw std::invalid_argument("synth_pools: length_bias must be finite and >= 0");
  }
  const std::size_t d = params.embed_dim;

  Rng global(splitmix64(params.seed));
  std::vector<double> quality = gaussian_vector(global, d);
  while (norm(quality) == 0.0) quality = gaussian_vector(global, d);
  const double qn = norm(quality);
  for (double& x : quality) x /= qn;

  Dataset out;
  out.split_label = "synth";
  out.pools.reserve(params.n_pools);
  for (std::size_t p = 0; p < params.n_pools; ++p) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%04zu", p);
    CandidatePool pool;
    pool.prompt_id = id;
    Rng rng(derive_seed(params.seed, pool.prompt_id));
    const std::vector<double> centre = gaussian_vector(rng, d);

    for (std::size_t k = 0; k < params.n_candidates; ++k) {
      Candidate c;
      std::vector<double> e(d);
      do {
        for (std::size_t t = 0; t < d; ++t) e[t] = centre[t] + 0.7 * rng.normal();
      } while (norm(e) == 0.0);

      const double len = std::clamp(std::round(std::exp(3.5 + 0.6 * rng.normal())), 1.0, 256.0);
      c.token_len = static_cast<long>(len);

      double align = 0.0;
      for (std::size_t t = 0; t < d; ++t) align += quality[t] * e[t];
      align /= norm(e);
      const double gold = std::tanh(2.0 * align) + 0.3 * std::sin(e[0]) + 0.1 * std::log(len);

      const double proxy_z = rng.normal();
      const double logprob_z = rng.normal();
      c.rewards["gold"] = gold;
      c.rewards["proxy"] = params.proxy_noise == 0.0 ? gold : gold + params.proxy_noise * proxy_z;
      c.logprob_ref = -(params.length_bias * len + 1.0) * std::exp(0.2 * logprob_z);
      c.embedding = std::move(e);
      pool.candidates.push_back(std::move(c));
    }
    out.pools.push_back(std::move(pool));
  }
  return out;
}

}  // namespace rbon
