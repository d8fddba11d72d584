#include "censnv/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "censnv/data.hpp"
#include "censnv/policies.hpp"

namespace censnv {

double relative_regret_ui(double regret, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument(
        "relative_regret_ui: undefined when Delta <= 0 (identifiable)");
  }
  return 100.0 * (regret - delta) / delta;
}

double relative_regret_id(double cost_q, double cost_star) {
  if (!(cost_star > 0.0)) {
    throw std::invalid_argument(
        "relative_regret_id: undefined when the optimal cost is 0");
  }
  return 100.0 * (cost_q - cost_star) / cost_star;
}

MonteCarloEstimate monte_carlo_cost(const DemandDistribution& d,
                                    const CostParameters& cp, double q,
                                    std::size_t n, RngStream& rng) {
  if (n == 0) {
    throw std::invalid_argument("monte_carlo_cost: n must be >= 1");
  }
  // Welford running moments
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.draw(rng);
    const double loss =
        x > q ? cp.b() * (x - q) : cp.h() * (q - x);
    const double delta = loss - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (loss - mean);
  }
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
  case PolicyKind::rcn:
    return "rcn";
  case PolicyKind::rcn_plus:
    return "rcn_plus";
  case PolicyKind::naive_saa:
    return "naive_saa";
  case PolicyKind::subsample_saa:
    return "subsample_saa";
  case PolicyKind::kaplan_meier:
    return "kaplan_meier";
  case PolicyKind::true_saa:
    return "true_saa";
  case PolicyKind::censored_saa:
    return "censored_saa";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
  for (PolicyKind k : {PolicyKind::rcn, PolicyKind::rcn_plus,
                       PolicyKind::naive_saa, PolicyKind::subsample_saa,
                       PolicyKind::kaplan_meier, PolicyKind::true_saa,
                       PolicyKind::censored_saa}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

std::vector<PolicyKind> all_policies() {
  return {PolicyKind::rcn,           PolicyKind::rcn_plus,
          PolicyKind::naive_saa,     PolicyKind::subsample_saa,
          PolicyKind::kaplan_meier,  PolicyKind::true_saa};
}

RegretReport evaluate_order(const Instance& inst, const MinimaxSolution& sol,
                            double q) {
  RegretReport r;
  r.lambda = inst.lambda();
  r.b = inst.cost().b();
  r.h = inst.cost().h();
  r.regime = sol.regime;
  r.q_alg = q;
  const double qe = std::clamp(q, 0.0, inst.cap());
  r.regret = worst_case_regret(inst, qe);
  r.regret_minus_delta = *r.regret - sol.delta;
  r.vanilla_regret = vanilla_regret(inst.demand(), inst.cost(), qe);
  if (sol.delta > 0.0) {
    r.rel_regret_ui = relative_regret_ui(*r.regret, sol.delta);
  }
  if (sol.regime == Regime::identifiable) {
    const double star = cost(inst.demand(), inst.cost(), inst.q_star());
    if (star > 0.0) {
      r.rel_regret_id =
          relative_regret_id(cost(inst.demand(), inst.cost(), qe), star);
    }
  }
  return r;
}

std::vector<GridPoint> expand_grid(const ExperimentTemplate& tmpl) {
  std::vector<double> lambdas = tmpl.lambdas;
  if (lambdas.empty()) {
    const double q_ref = tmpl.distribution.quantile(tmpl.reference_rho);
    for (double f : tmpl.lambda_fractions) {
      lambdas.push_back(f * q_ref);
    }
  }
  std::vector<GridPoint> grid;
  for (double b : tmpl.b_values) {
    for (double lam : lambdas) {
      for (std::size_t n : tmpl.n_values) {
        grid.push_back({b, lam, n});
      }
    }
  }
  return grid;
}

std::uint64_t replication_stream(std::size_t grid_index,
                                 std::size_t replication) {
  return (static_cast<std::uint64_t>(grid_index) << 32) |
         static_cast<std::uint64_t>(replication);
}

namespace {

void validate(const ExperimentTemplate& tmpl) {
  if (tmpl.replications == 0) {
    throw std::invalid_argument("experiment: replications must be >= 1");
  }
  if (tmpl.b_values.empty() || tmpl.n_values.empty() ||
      (tmpl.lambdas.empty() && tmpl.lambda_fractions.empty())) {
    throw std::invalid_argument("experiment: b, lambda and n grids are required");
  }
  if (tmpl.policies.empty()) {
    throw std::invalid_argument("experiment: no policies selected");
  }
  if (!(tmpl.delta > 0.0 && tmpl.delta < 1.0)) {
    throw std::invalid_argument("experiment: delta must lie in (0, 1)");
  }
}

struct PreparedPoint {
  GridPoint point;
  std::optional<Instance> instance;
  MinimaxSolution solution{Regime::identifiable, 0.0, 0.0};
  std::string error;
};

RegretReport error_row(const ExperimentTemplate& tmpl, const GridPoint& gp,
                       PolicyKind policy, std::size_t g, std::size_t r,
                       const std::string& message) {
  RegretReport row;
  row.policy = to_string(policy);
  row.lambda = gp.lambda;
  row.n = gp.n;
  row.b = gp.b;
  row.h = tmpl.h;
  row.grid_index = g;
  row.replication = r;
  row.branch = "error";
  row.seed = tmpl.seed;
  row.error = message;
  return row;
}

std::vector<RegretReport> run_one(const ExperimentTemplate& tmpl,
                                  const PreparedPoint& prep, std::size_t g,
                                  std::size_t r) {
  std::vector<RegretReport> rows;
  const GridPoint& gp = prep.point;
  if (!prep.instance) {
    for (PolicyKind p : tmpl.policies) {
      rows.push_back(error_row(tmpl, gp, p, g, r, prep.error));
    }
    return rows;
  }
  const Instance& inst = *prep.instance;
  RngStream rng(tmpl.seed, replication_stream(g, r));
  std::optional<GeneratedData> data;
  try {
    GenerationConfig cfg{tmpl.distribution, gp.lambda, tmpl.num_groups, gp.n,
                         tmpl.seed, tmpl.integer_order_quantities};
    data = generate_dataset(cfg, rng);
  } catch (const std::exception& e) {
    for (PolicyKind p : tmpl.policies) {
      rows.push_back(error_row(tmpl, gp, p, g, r, e.what()));
    }
    return rows;
  }

  for (PolicyKind p : tmpl.policies) {
    try {
      std::string branch;
      double q = 0.0;
      switch (p) {
      case PolicyKind::rcn: {
        const PolicyDecision d = rcn(data->dataset, inst.cost(), tmpl.cap,
                                     tmpl.delta);
        q = d.q;
        branch = to_string(*d.branch);
        break;
      }
      case PolicyKind::rcn_plus: {
        const PolicyDecision d = rcn_plus(data->dataset, inst.cost(), tmpl.cap,
                                          tmpl.delta);
        q = d.q;
        branch = to_string(*d.branch);
        break;
      }
      case PolicyKind::naive_saa:
        q = naive_saa(data->dataset, inst.cost().rho());
        break;
      case PolicyKind::subsample_saa:
        q = subsample_saa(data->dataset, inst.cost().rho());
        break;
      case PolicyKind::kaplan_meier:
        q = kaplan_meier(data->dataset, inst.cost().rho());
        break;
      case PolicyKind::true_saa:
        if (!tmpl.provide_uncensored) {
          throw std::runtime_error("uncensored demands are not available");
        }
        q = true_saa(data->demands, inst.cost().rho());
        break;
      case PolicyKind::censored_saa:
        throw std::runtime_error("censored_saa is not implemented");
      }
      RegretReport row = evaluate_order(inst, prep.solution, q);
      row.policy = to_string(p);
      row.n = gp.n;
      row.grid_index = g;
      row.replication = r;
      row.branch = branch;
      row.seed = tmpl.seed;
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      rows.push_back(error_row(tmpl, gp, p, g, r, e.what()));
    }
  }
  return rows;
}

} // namespace

std::vector<RegretReport> run_replications(const ExperimentTemplate& tmpl,
                                           std::size_t jobs) {
  validate(tmpl);
  const std::vector<GridPoint> grid = expand_grid(tmpl);
  std::vector<PreparedPoint> prepared;
  prepared.reserve(grid.size());
  for (const GridPoint& gp : grid) {
    PreparedPoint prep{gp, std::nullopt, {Regime::identifiable, 0.0, 0.0}, {}};
    try {
      prep.instance.emplace(tmpl.distribution, gp.lambda, tmpl.cap,
                            CostParameters(gp.b, tmpl.h));
      prep.solution = minimax_risk(*prep.instance);
    } catch (const std::exception& e) {
      prep.instance.reset();
      prep.error = e.what();
    }
    prepared.push_back(std::move(prep));
  }

  const std::size_t tasks = grid.size() * tmpl.replications;
  std::vector<std::vector<RegretReport>> slots(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t g = t / tmpl.replications;
      const std::size_t r = t % tmpl.replications;
      slots[t] = run_one(tmpl, prepared[g], g, r);
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  std::vector<RegretReport> out;
  out.reserve(tasks * tmpl.policies.size());
  for (auto& s : slots) {
    for (auto& row : s) {
      out.push_back(std::move(row));
    }
  }
  return out;
}

const char* const kReportCsvHeader =
    "policy,lambda,n,b,h,replication,q_alg,branch,regret,regret_minus_delta,"
    "vanilla_regret,rel_regret_ui,rel_regret_id,regime,seed";

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string{};
}

} // namespace

std::string reports_to_csv(const std::vector<RegretReport>& reports) {
  std::string out = kReportCsvHeader;
  out += '\n';
  for (const RegretReport& r : reports) {
    out += r.policy + ',' + fmt(r.lambda) + ',' + std::to_string(r.n) + ',' +
           fmt(r.b) + ',' + fmt(r.h) + ',' + std::to_string(r.replication) +
           ',' + fmt(r.q_alg) + ',' + r.branch + ',' + fmt(r.regret) + ',' +
           fmt(r.regret_minus_delta) + ',' + fmt(r.vanilla_regret) + ',' +
           fmt(r.rel_regret_ui) + ',' + fmt(r.rel_regret_id) + ',' +
           (r.error ? std::string{} : to_string(r.regime)) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

} // namespace censnv
