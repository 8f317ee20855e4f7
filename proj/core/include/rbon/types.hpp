#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rbon {

// Raised for malformed or inconsistent input data (files, missing keys,
// pools that violate their invariants).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Candidate {
  std::optional<std::string> text;
  long token_len = 1;
  std::optional<double> logprob_ref;  // log pi_ref(y|x), <= 0
  std::map<std::string, double, std::less<>> rewards;
  std::vector<double> embedding;

  // Throws DataError when the key is absent.
  double reward(std::string_view key) const;
};

struct CandidatePool {
  std::string prompt_id;
  std::vector<Candidate> candidates;

  std::size_t size() const { return candidates.size(); }
  std::size_t embedding_dim() const;

  // One score per candidate, in candidate order. Throws DataError naming the
  // prompt and key when any candidate lacks it.
  std::vector<double> rewards(std::string_view key) const;
  std::vector<double> token_lengths() const;
  bool has_logprobs() const;
};

// Checks every Candidate/CandidatePool invariant; throws DataError.
void validate_pool(const CandidatePool& pool);

// A probability vector over one pool's candidate indices.
class Policy {
public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws std::invalid_argument unless entries are finite, non-negative and
  // sum to 1 within kSumTolerance.
  explicit Policy(std::vector<double> probs);

  static Policy uniform(std::size_t n);
  static Policy point_mass(std::size_t n, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Policy&, const Policy&) = default;

private:
  std::vector<double> probs_;
};

struct Dataset {
  std::vector<CandidatePool> pools;
  std::string split_label;
  // Number of unrecognised fields skipped while loading.
  std::size_t unknown_fields = 0;
};

}  // namespace rbon
