#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rbon/adversarial.hpp"
#include "rbon/cost.hpp"
#include "rbon/json_writer.hpp"
#include "rbon/pool_io.hpp"
#include "rbon/random.hpp"
#include "rbon/transport.hpp"
#include "report_io.hpp"

namespace rbon::cli {

namespace {

// Raised for flag combinations CLI11 cannot express; maps to exit 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using KeySet = std::set<std::string, std::less<>>;

struct Flags {
  std::string method;
  std::vector<std::string> methods;
  std::string ref;
  std::optional<double> temperature;
  std::string format = "csv";
  std::string keys = "proxy,gold";
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (cur.empty()) throw UsageError("empty entry in list '" + s + "'");
    out.push_back(cur);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

void check_beta(const RunConfig& cfg, bool regularized, std::string_view method) {
  if (regularized) {
    if (cfg.beta.has_value() == cfg.grid) {
      throw UsageError(std::string(method) + " needs exactly one of --beta or --grid");
    }
    if (cfg.beta && !(std::isfinite(*cfg.beta) && *cfg.beta >= 0.0)) {
      throw UsageError("--beta must be finite and non-negative");
    }
  } else if (cfg.beta || cfg.grid) {
    throw UsageError(std::string(method) + " does not take --beta or --grid");
  }
}

std::vector<double> betas(const RunConfig& cfg) {
  if (cfg.grid) return beta_grid();
  return {*cfg.beta};
}

bool uses_cost(Method m) { return m == Method::kMbr || m == Method::kRbonWd || m == Method::kSrbonWd; }
bool uses_reference(Method m) {
  return m == Method::kRbonKl || m == Method::kSrbonKl || m == Method::kSrbonWd;
}

std::string render_select(const RunConfig& cfg, bool proxy_given) {
  const Method method = cfg.methods.front();
  check_beta(cfg, is_regularized(method), to_string(method));
  if (method == Method::kSrbonKl && cfg.beta && *cfg.beta <= 0.0) {
    throw UsageError("srbon_kl needs beta > 0");
  }
  // mbr never reads a reward; random reports the proxy reward of its draw
  // only when a key was asked for.
  std::string key = cfg.proxy_key;
  if (method == Method::kMbr || (method == Method::kRandom && !proxy_given)) key.clear();
  KeySet keys;
  if (!key.empty()) keys.insert(key);
  const Dataset ds = load_pools(cfg.input, keys);
  const ReferenceSpec spec = cfg.ref.value_or(default_reference(method));

  struct Prepared {
    Policy ref;
    CostMatrix cost;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(ds.pools.size());
  for (const auto& pool : ds.pools) {
    const std::size_t n = pool.size();
    prepared.push_back({uses_reference(method) ? make_reference(pool, spec) : Policy::uniform(n),
                        uses_cost(method) ? cost_matrix(pool)
                                          : CostMatrix(n, std::vector<double>(n * n, 0.0))});
  }

  std::vector<std::optional<double>> beta_list;
  if (is_regularized(method)) {
    for (double b : betas(cfg)) beta_list.emplace_back(b);
  } else {
    beta_list.emplace_back(std::nullopt);
  }

  std::ostringstream out;
  if (cfg.format == OutputFormat::kCsv) {
    out << "prompt_id,index,score,method,beta\n";
  }
  JsonWriter w(out);
  if (cfg.format == OutputFormat::kJson) w.begin_object().key("selections").begin_array();
  for (const auto& beta : beta_list) {
    for (std::size_t p = 0; p < ds.pools.size(); ++p) {
      const auto& pool = ds.pools[p];
      const Selection s = run_method(method, pool, key, beta, prepared[p].ref, prepared[p].cost,
                                     derive_seed(cfg.seed, pool.prompt_id));
      if (cfg.format == OutputFormat::kCsv) {
        out << csv_field(pool.prompt_id) << ',' << s.index << ',' << format_real(s.score) << ','
            << to_string(s.method) << ',' << (s.beta ? format_real(*s.beta) : "") << '\n';
      } else {
        w.begin_object()
            .field("prompt_id", pool.prompt_id)
            .field("index", s.index)
            .field("score", s.score)
            .field("method", to_string(s.method));
        w.key("beta");
        if (s.beta) {
          w.value(*s.beta);
        } else {
          w.null();
        }
        w.end_object();
      }
    }
  }
  if (cfg.format == OutputFormat::kJson) {
    w.end_array().end_object();
    out << '\n';
  }
  return out.str();
}

std::string render_sweep(const RunConfig& cfg) {
  std::set<Method> seen;
  for (Method m : cfg.methods) {
    if (!is_regularized(m)) throw UsageError(std::string(to_string(m)) + " has no beta to sweep");
    if (!seen.insert(m).second) throw UsageError(std::string(to_string(m)) + " listed twice");
    check_beta(cfg, true, to_string(m));
    if (m == Method::kSrbonKl && cfg.beta && *cfg.beta <= 0.0) {
      throw UsageError("srbon_kl needs beta > 0");
    }
  }
  const KeySet keys{cfg.proxy_key, cfg.gold_key};
  const Dataset train = load_pools(cfg.train, keys, "train");
  std::optional<Dataset> eval;
  if (!cfg.eval.empty()) eval = load_pools(cfg.eval, keys, "eval");
  const auto grid = betas(cfg);

  std::vector<SweepResult> results;
  for (Method m : cfg.methods) {
    SweepResult r;
    r.report = beta_sweep(train, m, cfg.proxy_key, cfg.gold_key, grid, cfg.seed, cfg.ref);
    if (eval) {
      r.eval = EvalRow{eval->split_label, r.report.beta_star,
                       method_win_rate(*eval, m, cfg.proxy_key, cfg.gold_key, r.report.beta_star,
                                       cfg.seed, cfg.ref)};
    }
    results.push_back(std::move(r));
  }
  std::ostringstream out;
  if (cfg.format == OutputFormat::kCsv) {
    write_sweep_csv(out, results);
  } else {
    write_sweep_json(out, results);
  }
  return out.str();
}

// Dirichlet(1, ..., 1): normalised unit exponentials, so every entry is
// strictly positive.
Policy random_full_support(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log1p(-rng.uniform());
    if (x <= 0.0) x = std::numeric_limits<double>::min();
    total += x;
  }
  for (double& x : w) x /= total;
  return Policy(std::move(w));
}

struct VerifySummary {
  std::size_t pools = 0;
  std::size_t trials = 0;
  double max_kl_gap = 0.0;
  double max_kl_boundary_residual = 0.0;
  double max_wd_gap = 0.0;
  double max_duality_gap = 0.0;
  double max_lipschitz_residual = 0.0;
  double max_triangle_violation = 0.0;
  double tolerance = 0.0;
  std::size_t failures = 0;
};

VerifySummary run_verify(const RunConfig& cfg, const Dataset& ds) {
  if (cfg.trials == 0) throw UsageError("--trials must be positive");
  if (!(std::isfinite(cfg.tol) && cfg.tol >= 0.0)) throw UsageError("--tol must be finite and >= 0");
  if (!(cfg.corrupt_dual_scale > 0.0 && cfg.corrupt_dual_scale <= 1.0)) {
    throw UsageError("--corrupt-dual-scale must lie in (0, 1]");
  }
  const auto grid = beta_grid();
  const ReferenceSpec kl_spec = cfg.ref.value_or(ReferenceSpec{ReferenceMode::kLogprob, 1.0});
  const ReferenceSpec wd_spec = cfg.ref.value_or(ReferenceSpec{ReferenceMode::kEmpirical, 1.0});

  VerifySummary s;
  s.pools = ds.pools.size();
  s.trials = cfg.trials;
  s.tolerance = cfg.tol;
  for (const auto& pool : ds.pools) {
    const auto cost = cost_matrix(pool);
    const std::optional<CostMatrix> dual_cost =
        cfg.corrupt_dual_scale != 1.0 ? std::optional(cost.scaled(cfg.corrupt_dual_scale)) : std::nullopt;
    const Policy kl_ref = make_reference(pool, kl_spec);
    const Policy wd_ref = make_reference(pool, wd_spec);
    s.max_triangle_violation = std::max(s.max_triangle_violation, max_triangle_violation(cost));
    Rng rng(derive_seed(cfg.seed, pool.prompt_id));
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const Policy pi = random_full_support(rng, pool.size());
      const double beta = grid[rng.below(grid.size())];
      const auto kl = verify_theorem_kl(pi, pool, kl_ref, cfg.proxy_key, beta, cfg.tol);
      const auto wd = dual_cost ? verify_theorem_wd(pi, pool, wd_ref, cost, *dual_cost, cfg.proxy_key, beta, cfg.tol)
                                : verify_theorem_wd(pi, pool, wd_ref, cost, cfg.proxy_key, beta, cfg.tol);
      const double dgap = std::abs(duality_gap(pi, wd_ref, cost));
      s.max_kl_gap = std::max(s.max_kl_gap, kl.gap);
      s.max_kl_boundary_residual = std::max(s.max_kl_boundary_residual, kl.feasibility_residual);
      s.max_wd_gap = std::max(s.max_wd_gap, wd.gap);
      s.max_lipschitz_residual = std::max(s.max_lipschitz_residual, wd.feasibility_residual);
      s.max_duality_gap = std::max(s.max_duality_gap, dgap);
      if (!kl.passed || !wd.passed || !(dgap <= cfg.tol)) ++s.failures;
    }
  }
  return s;
}

std::string render_verify(const VerifySummary& s, OutputFormat format) {
  std::ostringstream out;
  const bool verified = s.failures == 0;
  const std::pair<const char*, double> reals[] = {
      {"max_kl_gap", s.max_kl_gap},
      {"max_kl_boundary_residual", s.max_kl_boundary_residual},
      {"max_wd_gap", s.max_wd_gap},
      {"max_duality_gap", s.max_duality_gap},
      {"max_lipschitz_residual", s.max_lipschitz_residual},
      {"max_triangle_violation", s.max_triangle_violation},
      {"tolerance", s.tolerance},
  };
  if (format == OutputFormat::kCsv) {
    out << "metric,value\n";
    out << "pools," << s.pools << '\n';
    out << "trials," << s.trials << '\n';
    for (const auto& [name, v] : reals) out << name << ',' << format_real(v) << '\n';
    out << "failures," << s.failures << '\n';
    out << "verified," << (verified ? "true" : "false") << '\n';
  } else {
    JsonWriter w(out);
    w.begin_object().field("pools", s.pools).field("trials", s.trials);
    for (const auto& [name, v] : reals) w.field(name, v);
    w.field("failures", s.failures).field("verified", verified).end_object();
    out << '\n';
  }
  return out.str();
}

std::string render_corr(const RunConfig& cfg) {
  if (cfg.keys.size() < 2) throw UsageError("--keys needs at least two reward keys");
  if (std::set<std::string>(cfg.keys.begin(), cfg.keys.end()).size() != cfg.keys.size()) {
    throw UsageError("--keys lists a key twice");
  }
  const Dataset ds = load_pools(cfg.input, KeySet(cfg.keys.begin(), cfg.keys.end()));
  const auto matrix = reward_correlation_matrix(ds, cfg.keys);
  const bool logprobs = !ds.pools.empty() && std::all_of(ds.pools.begin(), ds.pools.end(),
                                                          [](const auto& p) { return p.has_logprobs(); });
  std::optional<LogprobDiagnostics> diag;
  if (logprobs) diag = logprob_diagnostics(ds, cfg.gold_key, cfg.per_pool);
  const std::size_t k = cfg.keys.size();

  std::ostringstream out;
  if (cfg.format == OutputFormat::kCsv) {
    out << "key";
    for (const auto& key : cfg.keys) out << ',' << csv_field(key);
    out << '\n';
    for (std::size_t a = 0; a < k; ++a) {
      out << csv_field(cfg.keys[a]);
      for (std::size_t b = 0; b < k; ++b) out << ',' << format_real(matrix[a * k + b]);
      out << '\n';
    }
    if (diag) {
      out << "rho_reward_logprob," << format_real(diag->rho_reward_logprob) << '\n';
      out << "rho_length_logprob," << format_real(diag->rho_length_logprob) << '\n';
    }
  } else {
    JsonWriter w(out);
    w.begin_object().key("keys").begin_array();
    for (const auto& key : cfg.keys) w.value(key);
    w.end_array().key("matrix").begin_array();
    for (std::size_t a = 0; a < k; ++a) {
      w.begin_array();
      for (std::size_t b = 0; b < k; ++b) w.value(matrix[a * k + b]);
      w.end_array();
    }
    w.end_array();
    w.key("rho_reward_logprob");
    diag ? w.value(diag->rho_reward_logprob) : w.null();
    w.key("rho_length_logprob");
    diag ? w.value(diag->rho_length_logprob) : w.null();
    w.field("pooling", cfg.per_pool ? "per_pool" : "pooled").end_object();
    out << '\n';
  }
  return out.str();
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot open '" + cfg.out + "' for writing");
  file << text;
  if (!file.flush()) throw DataError("cannot write '" + cfg.out + "'");
}

void add_output(CLI::App* sub, RunConfig& cfg, Flags& flags, bool with_format) {
  sub->add_option("--out", cfg.out, "Output file (default: standard output)");
  if (with_format) {
    sub->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

void add_reference(CLI::App* sub, Flags& flags) {
  auto* ref = sub->add_option("--ref", flags.ref, "Reference distribution")
                  ->check(CLI::IsMember({"empirical", "logprob"}));
  sub->add_option("--temperature", flags.temperature, "Softmax temperature for --ref logprob")
      ->needs(ref);
}

void add_synth_params(CLI::App* sub, SynthParams& p) {
  sub->add_option("--n-pools", p.n_pools, "Number of pools")->capture_default_str();
  sub->add_option("--n-candidates", p.n_candidates, "Candidates per pool")->capture_default_str();
  sub->add_option("--embed-dim", p.embed_dim, "Embedding dimension")->capture_default_str();
  sub->add_option("--proxy-noise", p.proxy_noise, "Std. dev. of proxy noise")->capture_default_str();
  sub->add_option("--length-bias", p.length_bias, "Length penalty in logprob")->capture_default_str();
}

void finish_config(RunConfig& cfg, const Flags& flags) {
  cfg.format = flags.format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  if (!flags.ref.empty()) {
    ReferenceSpec spec;
    spec.mode = parse_reference_mode(flags.ref);
    if (flags.temperature) {
      if (spec.mode != ReferenceMode::kLogprob) throw UsageError("--temperature needs --ref logprob");
      if (!(std::isfinite(*flags.temperature) && *flags.temperature > 0.0)) {
        throw UsageError("--temperature must be positive");
      }
      spec.temperature = *flags.temperature;
    }
    cfg.ref = spec;
  }
  try {
    if (cfg.command == "select") {
      cfg.methods = {parse_method(flags.method)};
    } else if (cfg.command == "sweep") {
      if (flags.methods.empty()) {
        cfg.methods = {Method::kRbonKl, Method::kRbonWd, Method::kRbonL, Method::kSrbonKl, Method::kSrbonWd};
      } else {
        for (const auto& m : flags.methods) cfg.methods.push_back(parse_method(m));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.command == "corr") cfg.keys = split_list(flags.keys);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Flags flags;
  CLI::App app{"Best-of-N selection, beta sweeps and duality checks over candidate pools", "rbon"};
  app.require_subcommand(1);

  auto* select = app.add_subcommand("select", "Pick one candidate per pool");
  select->add_option("--input", cfg.input, "Pool file (JSONL)")->required();
  select->add_option("--method", flags.method, "Selection method")->required();
  select->add_option("--proxy-key", cfg.proxy_key, "Reward key used for selection")->capture_default_str();
  select->add_option("--beta", cfg.beta, "Regularization strength");
  select->add_flag("--grid", cfg.grid, "Run every beta of the standard grid");
  add_reference(select, flags);
  select->add_option("--seed", cfg.seed, "Seed for stochastic methods")->capture_default_str();
  add_output(select, cfg, flags, true);

  auto* sweep = app.add_subcommand("sweep", "Win rate against BoN over a beta grid");
  sweep->add_option("--train", cfg.train, "Pools used to pick beta*")->required();
  sweep->add_option("--eval", cfg.eval, "Pools scored at beta*");
  sweep->add_option("--method", flags.methods, "Comma-separated regularized methods (default: all)")
      ->delimiter(',');
  sweep->add_option("--proxy-key", cfg.proxy_key, "Reward key used for selection")->capture_default_str();
  sweep->add_option("--gold-key", cfg.gold_key, "Reward key used for judging")->capture_default_str();
  sweep->add_option("--beta", cfg.beta, "Single beta instead of a grid");
  sweep->add_flag("--grid", cfg.grid, "Sweep the standard grid");
  add_reference(sweep, flags);
  sweep->add_option("--seed", cfg.seed, "Seed for stochastic methods")->capture_default_str();
  add_output(sweep, cfg, flags, true);

  auto* verify = app.add_subcommand("verify", "Check the max-min identities and transport duality");
  auto* input = verify->add_option("--input", cfg.input, "Pool file (JSONL)");
  auto* synthetic = verify->add_flag("--synthetic", cfg.synthetic, "Generate pools instead of reading them");
  input->excludes(synthetic);
  add_synth_params(verify, cfg.synth);
  verify->add_option("--trials", cfg.trials, "Random (pi, beta) draws per pool")->capture_default_str();
  verify->add_option("--tol", cfg.tol, "Gap tolerance")->capture_default_str();
  verify->add_option("--proxy-key", cfg.proxy_key, "Reward key")->capture_default_str();
  add_reference(verify, flags);
  verify->add_option("--seed", cfg.seed, "Seed for draws and synthetic pools")->capture_default_str();
  verify->add_option("--corrupt-dual-scale", cfg.corrupt_dual_scale)->group("");
  add_output(verify, cfg, flags, true);

  auto* corr = app.add_subcommand("corr", "Rank correlations between reward keys");
  corr->add_option("--input", cfg.input, "Pool file (JSONL)")->required();
  corr->add_option("--keys", flags.keys, "Comma-separated reward keys")->capture_default_str();
  corr->add_option("--gold-key", cfg.gold_key, "Reward key for the logprob diagnostic")->capture_default_str();
  corr->add_flag("--per-pool", cfg.per_pool, "Average per-pool correlations instead of pooling");
  add_output(corr, cfg, flags, true);

  auto* synth = app.add_subcommand("synth", "Write synthetic pools as JSONL");
  add_synth_params(synth, cfg.synth);
  synth->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  add_output(synth, cfg, flags, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    finish_config(cfg, flags);
    cfg.synth.seed = cfg.seed;
    if (cfg.command == "select") {
      emit(cfg, render_select(cfg, select->count("--proxy-key") > 0), out);
    } else if (cfg.command == "sweep") {
      emit(cfg, render_sweep(cfg), out);
    } else if (cfg.command == "verify") {
      if (cfg.input.empty() == !cfg.synthetic) throw UsageError("verify needs exactly one of --input or --synthetic");
      Dataset ds;
      if (cfg.synthetic) {
        try {
          ds = synth_pools(cfg.synth);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      } else {
        ds = load_pools(cfg.input, KeySet{cfg.proxy_key});
      }
      const auto summary = run_verify(cfg, ds);
      emit(cfg, render_verify(summary, cfg.format), out);
      if (summary.failures > 0) {
        err << "verify: " << summary.failures << " of " << summary.pools * summary.trials
            << " trials exceeded tolerance " << format_real(cfg.tol) << '\n';
        return kVerificationFailed;
      }
    } else if (cfg.command == "corr") {
      emit(cfg, render_corr(cfg), out);
    } else if (cfg.command == "synth") {
      Dataset ds;
      try {
        ds = synth_pools(cfg.synth);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      std::ostringstream text;
      write_pools(text, ds);
      emit(cfg, text.str(), out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kSuccess;
}

}  // namespace rbon::cli
