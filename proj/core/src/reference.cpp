#include "rbon/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rbon {

Policy empirical_reference(const CandidatePool& pool) {
  return Policy::uniform(pool.size());
}

Policy model_reference(const CandidatePool& pool, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const std::size_t n = pool.size();
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& lp = pool.candidates[i].logprob_ref;
    if (!lp) {
      throw DataError("pool '" + pool.prompt_id + "': candidate " + std::to_string(i) +
                      " has no logprob");
    }
    logits[i] = *lp / temperature;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    z += l;
  }
  for (double& l : logits) l /= z;
  return Policy(std::move(logits));
}

Policy make_reference(const CandidatePool& pool, const ReferenceSpec& spec) {
  return spec.mode == ReferenceMode::kLogprob ? model_reference(pool, spec.temperature)
                                              : empirical_reference(pool);
}

std::string_view to_string(ReferenceMode mode) {
  return mode == ReferenceMode::kLogprob ? "logprob" : "empirical";
}

ReferenceMode parse_reference_mode(std::string_view name) {
  if (name == "empirical") return ReferenceMode::kEmpirical;
  if (name == "logprob") return ReferenceMode::kLogprob;
  throw std::invalid_argument("unknown reference mode '" + std::string(name) + "'");
}

}  // namespace rbon
