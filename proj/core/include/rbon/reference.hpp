#pragma once

#include <string_view>

#include "rbon/types.hpp"

namespace rbon {

// pi_hat_ref: every candidate gets exactly 1/N.
Policy empirical_reference(const CandidatePool& pool);

// Softmax of logprob / temperature over the pool (the language model
// restricted and renormalised to the sampled support). Throws DataError if
// any candidate lacks a logprob, std::invalid_argument if temperature <= 0.
Policy model_reference(const CandidatePool& pool, double temperature = 1.0);

enum class ReferenceMode { kEmpirical, kLogprob };

struct ReferenceSpec {
  ReferenceMode mode = ReferenceMode::kEmpirical;
  double temperature = 1.0;
};

Policy make_reference(const CandidatePool& pool, const ReferenceSpec& spec);

std::string_view to_string(ReferenceMode mode);
// Accepts "empirical" or "logprob"; throws std::invalid_argument otherwise.
ReferenceMode parse_reference_mode(std::string_view name);

}  // namespace rbon
