// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// diagnostics. Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dense_lp.hpp"
#include "fixtures.hpp"
#include "rbon/adversarial.hpp"
#include "rbon/cost.hpp"
#include "rbon/eval.hpp"
#include "rbon/policies.hpp"
#include "rbon/reference.hpp"
#include "rbon/transport.hpp"

#ifdef RBON_HAVE_CLI
#include "cli.hpp"
#endif

using namespace rbon;
using fixtures::to_vector;

namespace {

constexpr double kDualityTol = 1e-6;
constexpr double kKlGapTol = 1e-8;
constexpr double kKlBoundaryTol = 1e-9;
constexpr double kWdGapTol = 1e-6;
constexpr double kLipschitzTol = 1e-8;
constexpr double kClosedFormTol = 1e-8;
constexpr double kGibbsMargin = -1e-9;
constexpr double kTwoCandidateTol = 1e-4;
constexpr double kWdNTol = 1e-9;
constexpr double kLargeBeta = 1e9;
constexpr double kRefTol = 1e-6;
constexpr double kLengthRhoBound = -0.8;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> info;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

bool unique_argmax(const std::vector<double>& v) {
  const auto best = std::max_element(v.begin(), v.end());
  return std::count(v.begin(), v.end(), *best) == 1;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Policy full_support(Rng& rng, std::size_t n) { return Policy(fixtures::random_simplex(rng, n)); }

double grid_beta(Rng& rng) {
  static const auto grid = beta_grid();
  return grid[rng.below(grid.size())];
}

double kl_objective(const Policy& pi, const std::vector<double>& r, const Policy& ref, double beta) {
  double value = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    value += pi[i] * r[i];
    if (pi[i] > 0.0) value -= beta * pi[i] * std::log(pi[i] / ref[i]);
  }
  return value;
}

Outcome strong_duality() {
  Outcome o;
  Rng rng(1001);
  std::size_t failures = 0;
  double max_gap = 0.0;
  double max_closure_gap = 0.0;
  double max_oracle_disagreement = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(16);
    const Policy nu = full_support(rng, n);
    const Policy mu = full_support(rng, n);
    const auto c = fixtures::random_cost(rng, n);
    const double gap = std::abs(duality_gap(nu, mu, c));
    max_gap = std::max(max_gap, gap);
    if (!(gap <= kDualityTol)) ++failures;
    const double lp_gap = oracle::transport_value(to_vector(nu), to_vector(mu), to_vector(c)) -
                          oracle::lipschitz_dual_value(to_vector(nu), to_vector(mu), to_vector(c));
    max_oracle_disagreement = std::max(max_oracle_disagreement, std::abs(lp_gap - gap));
    const auto closure = metric_closure(c);
    max_closure_gap = std::max(max_closure_gap, std::abs(wd_primal(nu, mu, closure).value -
                                                         wd_dual(nu, mu, c).value));
  }
  Rng mrng(1002);
  double max_metric_gap = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + mrng.below(16);
    const auto c = fixtures::random_metric_cost(mrng, n, 1 + mrng.below(8));
    max_metric_gap = std::max(max_metric_gap, std::abs(duality_gap(full_support(mrng, n), full_support(mrng, n), c)));
  }
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + "/1000 instances with gap > " + sci(kDualityTol) +
             ", max gap " + sci(max_gap);
  o.info.push_back("dense-LP primal minus dense-LP dual agrees with duality_gap to " +
                   sci(max_oracle_disagreement));
  o.info.push_back("dual value vs transport under the shortest-path closure of C: max diff " +
                   sci(max_closure_gap));
  o.info.push_back("1000 metric (chordal) costs: max gap " + sci(max_metric_gap));
  return o;
}

Outcome theorem_kl() {
  Outcome o;
  Rng rng(2001);
  std::size_t failures = 0;
  double max_gap = 0.0;
  double max_residual = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(16);
    const auto pool = fixtures::random_pool(rng, n, 3);
    const auto ref = model_reference(pool);
    const Policy pi = full_support(rng, n);
    const double beta = grid_beta(rng);
    const auto r = pool.rewards("proxy");
    const auto dr = kl_worst_case(pi, ref, beta);
    double perturbed = 0.0;
    double boundary = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      perturbed += pi[i] * (r[i] - dr[i]);
      boundary += ref[i] * std::exp(dr[i] / beta);
    }
    const double gap = std::abs(perturbed - kl_objective(pi, r, ref, beta));
    const double residual = std::abs(boundary - 1.0);
    max_gap = std::max(max_gap, gap);
    max_residual = std::max(max_residual, residual);
    if (!(gap <= kKlGapTol && residual <= kKlBoundaryTol)) ++failures;
  }
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + "/1000 draws out of tolerance, max gap " + sci(max_gap) +
             ", max boundary residual " + sci(max_residual);
  return o;
}

Outcome theorem_wd() {
  Outcome o;
  Rng rng(3001);
  std::size_t gap_failures = 0;
  std::size_t lipschitz_failures = 0;
  double max_gap = 0.0;
  double max_violation = 0.0;
  double max_explained = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto pool = fixtures::random_pool(rng, n, 2 + rng.below(7));
    const auto c = cost_matrix(pool);
    const auto ref = empirical_reference(pool);
    const Policy pi = full_support(rng, n);
    const double beta = grid_beta(rng);
    const auto r = pool.rewards("proxy");
    const auto dr = wd_worst_case(pi, ref, c);
    double adversarial = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      adversarial += pi[i] * (r[i] - beta * dr[i]) + beta * ref[i] * dr[i];
      expected += pi[i] * r[i];
    }
    const double wd = oracle::transport_value(to_vector(pi), to_vector(ref), to_vector(c));
    const double gap = std::abs(adversarial - (expected - beta * wd));
    max_gap = std::max(max_gap, gap);
    if (!(gap <= kWdGapTol)) ++gap_failures;
    double violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) violation = std::max(violation, std::abs(dr[i] - dr[j]) - c(i, j));
    }
    max_violation = std::max(max_violation, violation);
    if (!(violation <= kLipschitzTol)) ++lipschitz_failures;
    const double closure_wd = wd_primal(pi, ref, metric_closure(c)).value;
    max_explained = std::max(max_explained, std::abs(gap - beta * (wd - closure_wd)));
  }
  o.pass = gap_failures == 0 && lipschitz_failures == 0;
  o.detail = std::to_string(gap_failures) + "/1000 draws with gap > " + sci(kWdGapTol) + " (max " +
             sci(max_gap) + "), " + std::to_string(lipschitz_failures) +
             " Lipschitz failures (max violation " + sci(max_violation) + ")";
  o.info.push_back("gap minus beta * (WD under C - WD under closure of C): max " + sci(max_explained));

  Rng mrng(3002);
  double max_metric_gap = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + mrng.below(8);
    const auto pool = fixtures::random_pool(mrng, n, 3);
    const auto c = fixtures::random_metric_cost(mrng, n, 3);
    const auto report = verify_theorem_wd(full_support(mrng, n), pool, empirical_reference(pool), c,
                                          "proxy", grid_beta(mrng), kWdGapTol);
    max_metric_gap = std::max(max_metric_gap, report.gap);
  }
  o.info.push_back("1000 draws on metric (chordal) costs: max gap " + sci(max_metric_gap));
  return o;
}

Outcome srbon_wd_closed_form() {
  Outcome o;
  Rng rng(4001);
  std::size_t failures = 0;
  double max_diff = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const auto pool = fixtures::random_pool(rng, n, 2 + rng.below(4));
    const auto c = cost_matrix(pool);
    const auto ref = fixtures::random_policy(rng, n, t % 3 == 0 ? 0.3 : 0.0);
    const double beta = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    const auto r = pool.rewards("proxy");
    const auto p = srbon_wd_policy(pool, ref, c, "proxy", beta);
    const auto lp = oracle::srbon_wd_value(to_vector(ref), r, to_vector(c), beta);
    double attained = 0.0;
    for (std::size_t i = 0; i < n; ++i) attained += p.policy[i] * r[i];
    attained -= beta * oracle::transport_value(to_vector(p.policy), to_vector(ref), to_vector(c));
    const double diff = std::max(std::abs(p.objective_value - lp.value), std::abs(attained - lp.value));
    max_diff = std::max(max_diff, diff);
    if (!(diff <= kClosedFormTol)) ++failures;
  }
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + "/500 instances off the LP optimum, max diff " + sci(max_diff);
  return o;
}

Outcome srbon_kl_optimality() {
  Outcome o;
  Rng rng(5001);
  std::size_t failures = 0;
  double worst_margin = INFINITY;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(7);
    const auto pool = fixtures::random_pool(rng, n, 3);
    const auto ref = model_reference(pool);
    const double beta = grid_beta(rng);
    const auto r = pool.rewards("proxy");
    const auto gibbs = srbon_kl_policy(pool, ref, "proxy", beta);
    const double best = kl_objective(gibbs.policy, r, ref, beta);
    double margin = INFINITY;
    for (int k = 0; k < 10000; ++k) {
      margin = std::min(margin, best - kl_objective(fixtures::random_policy(rng, n, 0.2), r, ref, beta));
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin = std::min(margin, best - kl_objective(Policy::point_mass(n, i), r, ref, beta));
    }
    worst_margin = std::min(worst_margin, margin);
    if (!(margin >= kGibbsMargin)) ++failures;
  }
  // Two candidates, uniform reference, R = (1, 0), beta = 1.
  const auto pool = fixtures::make_pool({1.0, 0.0});
  const auto ref = Policy::uniform(2);
  const auto p = srbon_kl_policy(pool, ref, "proxy", 1.0);
  double best_q = 0.0;
  double best_value = -INFINITY;
  for (int k = 0; k <= 10000; ++k) {
    const double q = k / 10000.0;
    const double v = kl_objective(Policy({q, 1.0 - q}), {1.0, 0.0}, ref, 1.0);
    if (v > best_value) {
      best_value = v;
      best_q = q;
    }
  }
  const double two_err = std::abs(p.policy[0] - best_q);
  o.pass = failures == 0 && two_err <= kTwoCandidateTol;
  o.detail = std::to_string(failures) + "/200 instances beaten, worst margin " + sci(worst_margin) +
             "; two-candidate policy " + fmt("%.6f", p.policy[0]) + " vs grid " + fmt("%.4f", best_q);
  return o;
}

Outcome wd_n_consistency() {
  Outcome o;
  Rng rng(6001);
  double max_diff = 0.0;
  std::size_t checked = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(16);
    const auto pool = fixtures::random_pool(rng, n, 2 + rng.below(7));
    const auto c = cost_matrix(pool);
    for (std::size_t i = 0; i < n; ++i) {
      max_diff = std::max(max_diff, std::abs(mean_cost_row(c, i) -
                                             wd_primal(Policy::point_mass(n, i), Policy::uniform(n), c).value));
      ++checked;
    }
  }
  o.pass = max_diff <= kWdNTol;
  o.detail = std::to_string(checked) + " rows, max diff " + sci(max_diff);
  return o;
}

Outcome limit_collapses() {
  Outcome o;
  Rng rng(7001);
  std::size_t zero_pools = 0;
  std::size_t zero_failures = 0;
  std::size_t mbr_pools = 0;
  std::size_t mbr_failures = 0;
  double max_ref_err = 0.0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.below(12);
    const auto pool = fixtures::random_pool(rng, n, 3);
    const auto c = cost_matrix(pool);
    const auto ref = model_reference(pool);
    const auto r = pool.rewards("proxy");
    if (unique_argmax(r)) {
      ++zero_pools;
      const auto bon = select_bon(pool, "proxy").index;
      const bool same = select_rbon_kl(pool, ref, "proxy", 0.0).index == bon &&
                        select_rbon_wd(pool, c, "proxy", 0.0).index == bon &&
                        select_rbon_l(pool, "proxy", 0.0).index == bon &&
                        srbon_wd_policy(pool, ref, c, "proxy", 0.0).policy == Policy::point_mass(n, bon);
      if (!same) ++zero_failures;
    }
    std::vector<double> neg_mean(n);
    for (std::size_t i = 0; i < n; ++i) neg_mean[i] = -mean_cost_row(c, i);
    if (unique_argmax(neg_mean)) {
      ++mbr_pools;
      if (select_rbon_wd(pool, c, "proxy", kLargeBeta).index != select_mbr(pool, c).index) ++mbr_failures;
    }
    const auto wide = srbon_kl_policy(pool, ref, "proxy", kLargeBeta);
    for (std::size_t i = 0; i < n; ++i) max_ref_err = std::max(max_ref_err, std::abs(wide.policy[i] - ref[i]));
  }
  o.pass = zero_failures == 0 && mbr_failures == 0 && max_ref_err <= kRefTol && zero_pools > 0 && mbr_pools > 0;
  o.detail = "beta=0: " + std::to_string(zero_failures) + "/" + std::to_string(zero_pools) +
             " differ from BoN; beta=1e9: " + std::to_string(mbr_failures) + "/" +
             std::to_string(mbr_pools) + " differ from MBR, srbon_kl vs ref max err " + sci(max_ref_err);
  o.info.push_back("MBR comparison uses pools whose minimum mean cost is unique");
  return o;
}

Dataset synth_dataset(std::size_t pools, std::uint64_t seed) {
  SynthParams p;
  p.n_pools = pools;
  p.seed = seed;
  return synth_pools(p);
}

Outcome protocol_exactness() {
  Outcome o;
  const auto ds = synth_dataset(40, 8001);
  const auto bon = run_selections(ds, Method::kBon, "proxy", std::nullopt, 0);
  const double self = win_rate(bon, bon, ds, "gold");
  double max_rate = 0.0;
  std::size_t rows = 0;
  for (Method m : {Method::kRbonKl, Method::kRbonWd, Method::kRbonL, Method::kSrbonKl, Method::kSrbonWd}) {
    for (const auto& row : beta_sweep(ds, m, "gold", "gold", beta_grid(), 8002).rows) {
      max_rate = std::max(max_rate, row.win_rate_percent);
      ++rows;
    }
  }
  o.pass = self == 50.0 && max_rate <= 50.0;
  o.detail = "win_rate(BoN, BoN) = " + fmt("%.17g", self) + "; max of " + std::to_string(rows) +
             " proxy=gold sweep rows = " + fmt("%.17g", max_rate);
  return o;
}

Outcome grid_fidelity() {
  Outcome o;
  const std::vector<double> ladder{1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2,
                                   1e-1, 2e-1, 5e-1, 1.0,  2.0,  5.0,  1e1,  2e1};
  const auto g = beta_grid();
  o.pass = g == ladder;
  o.detail = std::to_string(g.size()) + " values from " + sci(g.front()) + " to " + sci(g.back());
  return o;
}

Outcome tv_equivalence() {
  Outcome o;
  Rng rng(10001);
  std::size_t compared = 0;
  std::size_t failures = 0;
  while (compared < 500) {
    const auto pool = fixtures::random_pool(rng, 2 + rng.below(14), 2);
    const auto mu = length_distribution(pool);
    double z = 0.0;
    for (const auto& cand : pool.candidates) z += 1.0 / static_cast<double>(cand.token_len);
    const double beta = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    const auto r = pool.rewards("proxy");
    std::vector<double> tv(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) tv[i] = r[i] + beta * tv_pointmass(mu, i);
    if (!unique_argmax(tv)) continue;
    ++compared;
    if (argmax(tv) != select_rbon_l(pool, "proxy", beta / z).index) ++failures;
  }
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + "/500 pools select different indices";
  return o;
}

Outcome length_sign() {
  Outcome o;
  double worst = -1.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    worst = std::max(worst, logprob_diagnostics(synth_dataset(20, 11000 + seed), "gold").rho_length_logprob);
  }
  o.pass = worst < kLengthRhoBound;
  o.detail = "largest rho_length_logprob over 5 seeds = " + fmt("%.4f", worst);
  return o;
}

#ifdef RBON_HAVE_CLI
struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
#endif

Outcome end_to_end() {
  Outcome o;
#ifdef RBON_HAVE_CLI
  const auto dir = std::filesystem::temp_directory_path() / "rbon_acceptance";
  std::filesystem::create_directories(dir);
  const auto train_a = (dir / "train_a.jsonl").string();
  const auto train_b = (dir / "train_b.jsonl").string();
  const auto eval = (dir / "eval.jsonl").string();
  const bool synth_ok = cli_run({"synth", "--seed", "1", "--out", train_a}).code == 0 &&
                        cli_run({"synth", "--seed", "1", "--out", train_b}).code == 0 &&
                        cli_run({"synth", "--seed", "2", "--out", eval}).code == 0;
  const bool synth_same = slurp(train_a) == slurp(train_b) && !slurp(train_a).empty();
  const std::vector<std::string> sweep{"sweep", "--train", train_a, "--eval", eval, "--grid", "--seed", "3"};
  const auto s1 = cli_run(sweep);
  const auto s2 = cli_run(sweep);
  const std::vector<std::string> verify{"verify", "--input", train_a, "--trials", "1000", "--tol", "1e-6"};
  const auto v1 = cli_run(verify);
  const auto v2 = cli_run(verify);
  const bool sweep_same = s1.code == 0 && s1.out == s2.out && !s1.out.empty();
  const bool verify_same = v1.out == v2.out && v1.code == v2.code && !v1.out.empty();
  o.pass = synth_ok && synth_same && sweep_same && verify_same && v1.code == 0;
  o.detail = std::string("synth ") + (synth_ok && synth_same ? "identical" : "MISMATCH") + ", sweep " +
             (sweep_same ? "identical" : "MISMATCH") + ", verify " + (verify_same ? "identical" : "MISMATCH") +
             ", verify exit " + std::to_string(v1.code);
  std::istringstream summary(v1.out);
  std::string line;
  while (std::getline(summary, line)) {
    if (line.rfind("max_", 0) == 0 || line.rfind("failures", 0) == 0) o.info.push_back("verify " + line);
  }
#else
  o.pass = false;
  o.detail = "command-line tool not built";
#endif
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"strong duality on random costs", strong_duality},
      {"KL max-min identity", theorem_kl},
      {"WD max-min identity", theorem_wd},
      {"SRBoN_WD closed form vs LP", srbon_wd_closed_form},
      {"SRBoN_KL optimality", srbon_kl_optimality},
      {"mean cost row equals WD to uniform", wd_n_consistency},
      {"beta limits", limit_collapses},
      {"win-rate protocol", protocol_exactness},
      {"beta grid", grid_fidelity},
      {"TV form of RBoN_L", tv_equivalence},
      {"length vs logprob sign", length_sign},
      {"end-to-end CLI", end_to_end},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    for (const auto& line : o.info) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
