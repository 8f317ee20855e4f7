#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rbon/eval.hpp"

namespace rbon::cli {

// Win rate on the evaluation split at the train split's beta_star.
struct EvalRow {
  std::string split;
  double beta = 0.0;
  double win_rate_percent = 0.0;
};

struct SweepResult {
  SweepReport report;
  std::optional<EvalRow> eval;
};

// CSV columns:
//   kind,method,proxy_key,gold_key,split,beta,win_rate_percent,is_beta_star
// with kind "sweep" for each grid row and "eval" for the evaluation row.
void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results);
void write_sweep_json(std::ostream& out, const std::vector<SweepResult>& results);

// Inverses of the writers. Throw DataError on malformed input.
std::vector<SweepResult> read_sweep_csv(std::istream& in);
std::vector<SweepResult> read_sweep_json(std::istream& in);

// RFC 4180 field quoting.
std::string csv_field(std::string_view s);
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace rbon::cli
