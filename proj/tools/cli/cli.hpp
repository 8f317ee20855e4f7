#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rbon/eval.hpp"
#include "rbon/policies.hpp"
#include "rbon/reference.hpp"

namespace rbon::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kDataError = 3,
};

enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  std::string command;
  std::string input;
  std::string train;
  std::string eval;
  std::vector<Method> methods;
  std::string proxy_key = "proxy";
  std::string gold_key = "gold";
  std::vector<std::string> keys;
  std::optional<double> beta;
  bool grid = false;
  std::optional<ReferenceSpec> ref;
  std::uint64_t seed = 0;
  std::string out;
  OutputFormat format = OutputFormat::kCsv;
  std::size_t trials = 100;
  double tol = 1e-6;
  bool synthetic = false;
  bool per_pool = false;
  SynthParams synth;
  // Scales the cost seen by the WD dual solver during verify; 1 leaves it
  // untouched.
  double corrupt_dual_scale = 1.0;
};

// Runs one command line (without the program name). Results go to `out`
// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbon::cli
