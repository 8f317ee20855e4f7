#include "rbon/pool_io.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rbon/json_writer.hpp"

namespace rbon {
namespace {

using nlohmann::json;

double as_real(const json& v, const std::string& what) {
  if (!v.is_number()) throw DataError(what + " must be a number");
  return v.get<double>();
}

Candidate parse_candidate(const json& obj, const std::string& where, std::size_t& unknown) {
  if (!obj.is_object()) throw DataError(where + ": candidate must be an object");
  Candidate c;
  bool have_len = false;
  bool have_emb = false;
  bool have_rewards = false;
  for (const auto& [k, v] : obj.items()) {
    if (k == "text") {
      if (!v.is_null()) {
        if (!v.is_string()) throw DataError(where + ": text must be a string");
        c.text = v.get<std::string>();
      }
    } else if (k == "token_len") {
      if (!v.is_number_integer()) throw DataError(where + ": token_len must be an integer");
      c.token_len = v.get<long>();
      have_len = true;
    } else if (k == "logprob") {
      if (!v.is_null()) c.logprob_ref = as_real(v, where + ": logprob");
    } else if (k == "rewards") {
      if (!v.is_object()) throw DataError(where + ": rewards must be an object");
      for (const auto& [name, score] : v.items()) {
        c.rewards.emplace(name, as_real(score, where + ": reward '" + name + "'"));
      }
      have_rewards = true;
    } else if (k == "embedding") {
      if (!v.is_array()) throw DataError(where + ": embedding must be an array");
      c.embedding.reserve(v.size());
      for (const auto& x : v) c.embedding.push_back(as_real(x, where + ": embedding entry"));
      have_emb = true;
    } else {
      ++unknown;
    }
  }
  if (!have_len) throw DataError(where + ": missing token_len");
  if (!have_emb) throw DataError(where + ": missing embedding");
  if (!have_rewards) throw DataError(where + ": missing rewards");
  return c;
}

}  // namespace

Dataset parse_pools(std::istream& in, const std::set<std::string, std::less<>>& reward_keys,
                    std::string split_label) {
  Dataset ds;
  ds.split_label = std::move(split_label);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = "line " + std::to_string(line_no);

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(at + ": malformed record: " + e.what());
    }
    if (!record.is_object()) throw DataError(at + ": record must be an object");

    CandidatePool pool;
    bool have_id = false;
    bool have_candidates = false;
    for (const auto& [k, v] : record.items()) {
      if (k == "prompt_id") {
        if (!v.is_string()) throw DataError(at + ": prompt_id must be a string");
        pool.prompt_id = v.get<std::string>();
        have_id = true;
      } else if (k != "candidates") {
        ++ds.unknown_fields;
      }
    }
    if (!have_id) throw DataError(at + ": missing prompt_id");
    if (auto it = record.find("candidates"); it != record.end()) {
      if (!it->is_array()) throw DataError(at + ": candidates must be an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        pool.candidates.push_back(parse_candidate(
            (*it)[i], at + " (pool '" + pool.prompt_id + "', candidate " + std::to_string(i) + ")",
            ds.unknown_fields));
      }
      have_candidates = true;
    }
    if (!have_candidates) throw DataError(at + ": missing candidates");

    try {
      validate_pool(pool);
    } catch (const DataError& e) {
      throw DataError(at + ": " + e.what());
    }
    for (const auto& key : reward_keys) {
      for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
        if (!pool.candidates[i].rewards.contains(key)) {
          throw DataError(at + ": pool '" + pool.prompt_id + "' candidate " + std::to_string(i) +
                          " is missing reward key '" + key + "'");
        }
      }
    }
    if (!seen.insert(pool.prompt_id).second) {
      throw DataError(at + ": duplicate prompt_id '" + pool.prompt_id + "'");
    }
    ds.pools.push_back(std::move(pool));
  }
  return ds;
}

Dataset load_pools(const std::filesystem::path& path,
                   const std::set<std::string, std::less<>>& reward_keys,
                   std::string split_label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pool file '" + path.string() + "'");
  try {
    return parse_pools(in, reward_keys, std::move(split_label));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_pools(std::ostream& out, const Dataset& dataset) {
  for (const auto& pool : dataset.pools) {
    JsonWriter w(out);
    w.begin_object().field("prompt_id", std::string_view(pool.prompt_id));
    w.key("candidates").begin_array();
    for (const auto& c : pool.candidates) {
      w.begin_object();
      if (c.text) w.field("text", std::string_view(*c.text));
      w.field("token_len", c.token_len);
      if (c.logprob_ref) w.field("logprob", *c.logprob_ref);
      w.key("rewards").begin_object();
      for (const auto& [name, score] : c.rewards) w.field(name, score);
      w.end_object();
      w.key("embedding").begin_array();
      for (double x : c.embedding) w.value(x);
      w.end_array();
      w.end_object();
    }
    w.end_array().end_object();
    out << '\n';
  }
}

}  // namespace rbon
