// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "censnv/commands.hpp"
#include "censnv/data.hpp"
#include "censnv/evaluation.hpp"
#include "censnv/minimax.hpp"
#include "censnv/newsvendor.hpp"
#include "censnv/policies.hpp"

using namespace censnv;

namespace {

constexpr std::uint64_t kOracleSeed = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string config(const std::string& name) {
  return std::string(CENSNV_CONFIG_DIR) + "/" + name;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const OracleCheckSummary s = run_oracle_check(kOracleSeed, 200, 10000);
  const double secs = seconds_since(t0);
  const bool pass = s.passed == s.instances && s.instances == 200 &&
                    s.branch_counts.size() == 5 && secs < 60.0;
  return {pass, fmt("%zu/%zu instances, %zu evaluations over %zu branches, max abs err %.3g, "
                    "%.1fs",
                    s.passed, s.instances, s.evaluations, s.branch_counts.size(),
                    s.max_abs_error, secs)};
}

Outcome self_consistency() {
  std::size_t ok = 0;
  double worst_gap = 0.0;
  double worst_dip = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream rng(kOracleSeed, i);
    const Instance inst = random_oracle_instance(
        rng, i % 2 == 0 ? Regime::identifiable : Regime::unidentifiable);
    const MinimaxSolution sol = minimax_risk(inst);
    const double gap = std::abs(worst_case_regret(inst, sol.q_delta) - sol.delta);
    double dip = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double q = inst.cap() * k / 199.0;
      dip = std::max(dip, sol.delta - worst_case_regret(inst, q));
    }
    worst_gap = std::max(worst_gap, gap);
    worst_dip = std::max(worst_dip, dip);
    ok += gap <= 1e-8 && dip <= 0.0 ? 1 : 0;
  }
  return {ok == 200, fmt("%zu/200 instances; max |Regret(q^Delta) - Delta| %.3g, max "
                         "Delta - Regret(q) over the grid %.3g",
                         ok, worst_gap, worst_dip)};
}

Outcome phase_transition() {
  const auto g = DemandDistribution::exponential(80.0);
  const double cap = 200.0;
  std::size_t checks = 0;
  std::size_t bad = 0;
  for (int k = 1; k <= 9; ++k) {
    const double rho = k / 10.0;
    const CostParameters cp(rho / (1.0 - rho), 1.0);
    const double q_star = optimal_quantity(g, cp);
    double prev = INFINITY;
    for (int i = 0; i < 400; ++i) {
      const double lam = 0.5 * i;
      const MinimaxSolution sol = minimax_risk(Instance(g, lam, cap, cp));
      const bool identifiable = g.cdf_strict(lam) >= rho;
      bad += sol.delta > prev ? 1 : 0;
      bad += (sol.delta == 0.0) != identifiable ? 1 : 0;
      bad += identifiable && sol.q_delta != q_star ? 1 : 0;
      prev = sol.delta;
      checks += 3;
    }
  }
  return {bad == 0, fmt("%zu checks over rho in {0.1..0.9} and 400 boundaries, %zu violations",
                        checks, bad)};
}

Outcome known_quantiles() {
  const CostParameters cp(9.0, 1.0);
  const double e = optimal_quantity(DemandDistribution::exponential(80.0), cp);
  const double p = optimal_quantity(DemandDistribution::poisson(80.0), cp);
  return {std::abs(e - 184.21) <= 0.01 && p == 92.0,
          fmt("exponential q* = %.4f (184.21 +/- 0.01), poisson q* = %g (92)", e, p)};
}

Outcome rcn_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = read_experiment_config(config("uniform_convergence.json"));
  const ExperimentTemplate& t = cfg.experiment;
  const auto rows = run_replications(t, 1);
  const double secs = seconds_since(t0);
  const Instance inst(t.distribution, t.lambdas.at(0), t.cap, CostParameters(t.b_values.at(0), t.h));
  const MinimaxSolution sol = minimax_risk(inst);
  std::map<std::size_t, std::vector<double>> excess;
  for (const auto& r : rows) {
    if (r.policy == "rcn" && r.regret_minus_delta) {
      excess[r.n].push_back(*r.regret_minus_delta);
    }
  }
  const double m100 = median(excess.at(100));
  const double m1600 = median(excess.at(1600));
  const double ratio = m1600 / m100;

  // zeta at the boundary-group size N = 1600
  const CostParameters& cp = inst.cost();
  const double zeta = std::sqrt(std::log(2.0 / t.delta) / (2.0 * 1600.0));
  const double bound = sol.delta + std::max(cp.b() / cp.h(), 1.0) * (t.cap - inst.lambda()) *
                                       (cp.b() + cp.h()) * zeta;
  std::size_t within = 0;
  for (double x : excess.at(1600)) {
    within += x + sol.delta <= bound ? 1 : 0;
  }
  const double frac = static_cast<double>(within) / static_cast<double>(excess.at(1600).size());
  return {ratio < 0.25 && frac >= 0.70 && secs < 120.0,
          fmt("median Regret - Delta: %.4g at N=100, %.4g at N=1600, ratio %.4f (< 0.25); "
              "%.0f%% within the bound %.4g (>= 70%%); %.1fs",
              m100, m1600, ratio, 100.0 * frac, bound, secs)};
}

struct SweepRows {
  ExperimentTemplate tmpl;
  std::vector<RegretReport> rows;
};

const SweepRows& lambda_sweep() {
  static const SweepRows sweep = [] {
    const ExperimentConfig cfg = read_experiment_config(config("uniform_lambda_sweep.json"));
    return SweepRows{cfg.experiment, run_replications(cfg.experiment, 4)};
  }();
  return sweep;
}

double mean_metric(const std::vector<RegretReport>& rows, const std::string& policy, double lam,
                   const std::function<std::optional<double>(const RegretReport&)>& pick,
                   std::size_t* count = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.policy == policy && std::abs(r.lambda - lam) < 1e-9) {
      if (const auto v = pick(r)) {
        sum += *v;
        ++n;
      }
    }
  }
  if (count) {
    *count = n;
  }
  return n > 0 ? sum / static_cast<double>(n) : NAN;
}

Outcome identifiable_accuracy() {
  const double lam = 108.07;
  const SweepRows& s = lambda_sweep();
  std::size_t n = 0;
  const double rel = mean_metric(
      s.rows, "rcn", lam, [](const RegretReport& r) { return r.rel_regret_id; }, &n);

  // rebuild each replication's data from its stream and compare the boundary estimates
  const auto grid = expand_grid(s.tmpl);
  std::size_t g = 0;
  while (g < grid.size() && std::abs(grid[g].lambda - lam) > 1e-9) {
    ++g;
  }
  const CostParameters cp(grid.at(g).b, s.tmpl.h);
  std::size_t compared = 0;
  std::size_t equal = 0;
  for (std::size_t r = 0; r < s.tmpl.replications; ++r) {
    RngStream rng(s.tmpl.seed, replication_stream(g, r));
    const GeneratedData data = generate_dataset(
        {s.tmpl.distribution, lam, s.tmpl.num_groups, grid[g].n, s.tmpl.seed,
         s.tmpl.integer_order_quantities},
        rng);
    const auto boundary = data.dataset.groups_at(lam);
    if (g_minus_hat(data.dataset, lam) >= cp.rho()) {
      std::vector<std::vector<double>> shadow;
      for (std::size_t k : boundary) {
        shadow.push_back(data.demands[k]);
      }
      ++compared;
      equal += censored_saa_quantile(data.dataset, cp.rho(), boundary) ==
                       true_saa(shadow, cp.rho())
                   ? 1
                   : 0;
    }
  }
  return {n == s.tmpl.replications && rel <= 2.0 && compared == equal && compared > 0,
          fmt("mean R^id of RCN %.4f%% over %zu replications (<= 2%%); censored SAA equals "
              "true SAA in %zu/%zu replications with ghat >= rho",
              rel, n, equal, compared)};
}

Outcome baseline_separation() {
  const double lam = 57.21;
  const auto& rows = lambda_sweep().rows;
  auto ui = [](const RegretReport& r) { return r.rel_regret_ui; };
  const double rcn_v = mean_metric(rows, "rcn", lam, ui);
  const double naive = mean_metric(rows, "naive_saa", lam, ui);
  const double sub = mean_metric(rows, "subsample_saa", lam, ui);
  const double km = mean_metric(rows, "kaplan_meier", lam, ui);
  return {rcn_v <= 20.0 && naive > 100.0 && sub > 100.0 && km > 100.0,
          fmt("mean R^ui: rcn %.2f%% (<= 20%%), naive %.2f%%, subsample %.2f%%, km %.2f%% "
              "(each > 100%%)",
              rcn_v, naive, sub, km)};
}

Outcome lower_bound_constants() {
  RngStream rng(kOracleSeed, 7);
  std::size_t bad = 0;
  std::size_t checks = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const CostParameters cp(0.1 + 20.0 * rng.uniform(), 0.1 + 5.0 * rng.uniform());
    const double lam = 0.1 + 100.0 * rng.uniform();
    const double cap = lam * (1.01 + 3.0 * rng.uniform());
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 100000));
    const double id = lower_bound(HardRegime::strictly_identifiable, cp, lam, cap, n);
    const double ke = lower_bound(HardRegime::knife_edge, cp, lam, cap, n);
    bad += ke != 2.0 * id ? 1 : 0;
    ++checks;
    for (HardRegime r : {HardRegime::strictly_identifiable, HardRegime::knife_edge,
                         HardRegime::strictly_unidentifiable}) {
      const double a = lower_bound(r, cp, lam, cap, n);
      const double b = lower_bound(r, cp, lam, cap, 4 * n);
      if (a == 0.0) {
        continue;
      }
      const double err = std::abs(a / b - 2.0);
      worst = std::max(worst, err);
      bad += err <= 1e-12 ? 0 : 1;
      ++checks;
    }
  }
  return {bad == 0, fmt("%zu checks, %zu violations, max |ratio(N, 4N) - 2| %.3g", checks, bad,
                        worst)};
}

Outcome sample_complexity_check() {
  const ExperimentConfig cfg = read_experiment_config(config("uniform_convergence.json"));
  ExperimentTemplate t = cfg.experiment;
  const Instance inst(t.distribution, t.lambdas.at(0), t.cap, CostParameters(t.b_values.at(0), t.h));
  const double delta_risk = minimax_risk(inst).delta;
  const double eps = delta_risk / 2.0;
  const std::uint64_t n = sample_complexity(inst.cost(), inst.lambda(), t.cap, eps, t.delta);
  t.n_values = {static_cast<std::size_t>(n)};
  t.policies = {PolicyKind::rcn};
  const auto rows = run_replications(t, 4);
  std::size_t hit = 0;
  for (const auto& r : rows) {
    hit += r.regret_minus_delta && *r.regret_minus_delta < eps ? 1 : 0;
  }
  const double frac = static_cast<double>(hit) / static_cast<double>(rows.size());
  return {frac >= 0.40, fmt("N(eps = %.4g, 0.3) = %llu; %zu/%zu replications with Regret - "
                            "Delta < eps (>= 40%%)",
                            eps, static_cast<unsigned long long>(n), hit, rows.size())};
}

std::string capture(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    return "";
  }
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    out.append(buf, got);
  }
  const int status = pclose(pipe);
  return status == 0 ? out : "";
}

Outcome determinism() {
  const std::string base = std::string("\"") + CENSNV_CLI_PATH + "\" simulate \"" +
                           config("uniform_lambda_sweep.json") + "\"";
  const std::string a = capture(base + " --jobs 1");
  const std::string b = capture(base + " --jobs 1");
  const std::string c = capture(base + " --jobs 4");
  const std::string d = capture(base + " --jobs 4");
  const bool pass = !a.empty() && a == b && a == c && a == d;
  return {pass, fmt("%zu bytes; jobs 1 twice and jobs 4 twice %s", a.size(),
                    pass ? "identical" : "differ")};
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"minimax self-consistency", self_consistency},
      {"Delta-vs-lambda phase transition", phase_transition},
      {"known quantiles", known_quantiles},
      {"RCN convergence", rcn_convergence},
      {"identifiable-regime accuracy", identifiable_accuracy},
      {"baseline separation", baseline_separation},
      {"lower-bound constants", lower_bound_constants},
      {"sample complexity", sample_complexity_check},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
