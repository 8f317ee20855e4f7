#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rbon {

// Deterministic generator with a documented, portable bit stream:
//   engine   std::mt19937_64 seeded with the 64-bit seed
//   uniform  (next() >> 11) * 2^-53, in [0, 1)
//   normal   Box-Muller on two uniforms, one value per call
// The std:: distributions are avoided because their output differs between
// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

// Per-pool seed: splitmix64(global_seed ^ fnv1a64(prompt_id)). Independent
// of pool order, so stochastic methods give the same draw whatever order
// the pools are visited in.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view prompt_id);

}  // namespace rbon
