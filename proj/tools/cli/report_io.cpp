#include "report_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#include "rbon/json_writer.hpp"
#include "rbon/types.hpp"

namespace rbon::cli {

namespace {

constexpr const char* kSweepHeader =
    "kind,method,proxy_key,gold_key,split,beta,win_rate_percent,is_beta_star";

double parse_number(const std::string& s, std::size_t line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || errno == ERANGE) {
    throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

Method parse_method_field(const std::string& s, std::size_t line) {
  try {
    return parse_method(s);
  } catch (const std::invalid_argument&) {
    throw DataError("line " + std::to_string(line) + ": unknown method '" + s + "'");
  }
}

double json_number(const nlohmann::json& j) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw DataError("expected a number, got " + j.dump());
  return j.get<double>();
}

}  // namespace

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  return fields;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  out << kSweepHeader << '\n';
  for (const auto& r : results) {
    const auto& rep = r.report;
    const std::string prefix = std::string(to_string(rep.method)) + ',' + csv_field(rep.proxy_key) +
                               ',' + csv_field(rep.gold_key) + ',';
    for (const auto& row : rep.rows) {
      out << "sweep," << prefix << csv_field(rep.split_label) << ',' << format_real(row.beta) << ','
          << format_real(row.win_rate_percent) << ',' << (row.beta == rep.beta_star ? 1 : 0) << '\n';
    }
    if (r.eval) {
      out << "eval," << prefix << csv_field(r.eval->split) << ',' << format_real(r.eval->beta) << ','
          << format_real(r.eval->win_rate_percent) << ",1\n";
    }
  }
}

void write_sweep_json(std::ostream& out, const std::vector<SweepResult>& results) {
  JsonWriter w(out);
  w.begin_object().key("reports").begin_array();
  for (const auto& r : results) {
    const auto& rep = r.report;
    w.begin_object()
        .field("method", to_string(rep.method))
        .field("proxy_key", rep.proxy_key)
        .field("gold_key", rep.gold_key)
        .field("split", rep.split_label)
        .field("beta_star", rep.beta_star);
    w.key("rows").begin_array();
    for (const auto& row : rep.rows) {
      w.begin_object().field("beta", row.beta).field("win_rate_percent", row.win_rate_percent).end_object();
    }
    w.end_array();
    w.key("eval");
    if (r.eval) {
      w.begin_object()
          .field("split", r.eval->split)
          .field("beta", r.eval->beta)
          .field("win_rate_percent", r.eval->win_rate_percent)
          .end_object();
    } else {
      w.null();
    }
    w.end_object();
  }
  w.end_array().end_object();
  out << '\n';
}

std::vector<SweepResult> read_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw DataError("line 1: expected sweep header");
  }
  std::vector<SweepResult> results;
  bool star_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw DataError("line " + std::to_string(lineno) + ": expected 8 fields");
    const Method method = parse_method_field(f[1], lineno);
    const double beta = parse_number(f[5], lineno);
    const double rate = parse_number(f[6], lineno);
    if (f[0] == "sweep") {
      const bool same = !results.empty() && !results.back().eval &&
                        results.back().report.method == method &&
                        results.back().report.proxy_key == f[2] &&
                        results.back().report.gold_key == f[3];
      if (!same) {
        if (!results.empty() && !star_seen) {
          throw DataError("line " + std::to_string(lineno) + ": previous report has no beta_star row");
        }
        SweepResult r;
        r.report.method = method;
        r.report.proxy_key = f[2];
        r.report.gold_key = f[3];
        r.report.split_label = f[4];
        results.push_back(std::move(r));
        star_seen = false;
      }
      auto& rep = results.back().report;
      rep.rows.push_back({beta, rate});
      if (f[7] == "1") {
        if (!star_seen) rep.beta_star = beta;
        star_seen = true;
      } else if (f[7] != "0") {
        throw DataError("line " + std::to_string(lineno) + ": is_beta_star must be 0 or 1");
      }
    } else if (f[0] == "eval") {
      if (results.empty() || results.back().eval || results.back().report.method != method) {
        throw DataError("line " + std::to_string(lineno) + ": eval row without a matching sweep");
      }
      results.back().eval = EvalRow{f[4], beta, rate};
    } else {
      throw DataError("line " + std::to_string(lineno) + ": unknown row kind '" + f[0] + "'");
    }
  }
  if (!results.empty() && !star_seen) throw DataError("last report has no beta_star row");
  return results;
}

std::vector<SweepResult> read_sweep_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("sweep JSON: ") + e.what());
  }
  std::vector<SweepResult> results;
  try {
    for (const auto& j : doc.at("reports")) {
      SweepResult r;
      try {
        r.report.method = parse_method(j.at("method").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string("sweep JSON: ") + e.what());
      }
      r.report.proxy_key = j.at("proxy_key").get<std::string>();
      r.report.gold_key = j.at("gold_key").get<std::string>();
      r.report.split_label = j.at("split").get<std::string>();
      r.report.beta_star = json_number(j.at("beta_star"));
      for (const auto& row : j.at("rows")) {
        r.report.rows.push_back({json_number(row.at("beta")), json_number(row.at("win_rate_percent"))});
      }
      const auto& ev = j.at("eval");
      if (!ev.is_null()) {
        r.eval = EvalRow{ev.at("split").get<std::string>(), json_number(ev.at("beta")),
                         json_number(ev.at("win_rate_percent"))};
      }
      results.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("sweep JSON: ") + e.what());
  }
  return results;
}

}  // namespace rbon::cli
