#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "rbon/types.hpp"

namespace rbon {

// Line-delimited pool records, one pool per line:
//   {"prompt_id": "...", "candidates": [{"text": "...", "token_len": 12,
//     "logprob": -3.2, "rewards": {"proxy": 0.1}, "embedding": [...]}, ...]}
// "text" and "logprob" are optional. Unknown fields are skipped and counted
// in Dataset::unknown_fields. Blank lines are ignored.
//
// Every candidate must carry all of `reward_keys`. Errors are DataError with
// the 1-based line number.
Dataset load_pools(const std::filesystem::path& path,
                   const std::set<std::string, std::less<>>& reward_keys = {},
                   std::string split_label = {});

Dataset parse_pools(std::istream& in,
                    const std::set<std::string, std::less<>>& reward_keys = {},
                    std::string split_label = {});

// Inverse of parse_pools: one JSON object per line, numbers with 17
// significant digits.
void write_pools(std::ostream& out, const Dataset& dataset);

}  // namespace rbon
