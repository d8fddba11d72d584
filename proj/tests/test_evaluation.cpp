#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

#include "censnv/evaluation.hpp"
#include "censnv/newsvendor.hpp"

using namespace censnv;

namespace {

ExperimentTemplate uniform_template() {
  ExperimentTemplate t;
  t.distribution = DemandDistribution::discrete_uniform(0, 100);
  t.h = 1.0;
  t.b_values = {9.0};
  t.lambdas = {69.93};
  t.n_values = {100};
  t.replications = 5;
  t.cap = 320.0;
  t.seed = 77;
  t.policies = all_policies();
  return t;
}

} // namespace

TEST_CASE("relative regret") {
  CHECK(relative_regret_ui(3.0, 3.0) == 0.0);
  CHECK(relative_regret_ui(6.0, 3.0) == doctest::Approx(100.0));
  CHECK_THROWS_AS(relative_regret_ui(1.0, 0.0), std::invalid_argument);
  CHECK(relative_regret_id(2.0, 2.0) == 0.0);
  CHECK(relative_regret_id(1.01 * 7.0, 7.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_regret_id(1.0, 0.0), std::invalid_argument);

  const double lam = -80.0 * std::log(0.6);
  const Instance inst(DemandDistribution::exponential(80.0), lam, 200.0, CostParameters(1.0, 1.0));
  const auto sol = minimax_risk(inst);
  const double regret = worst_case_regret(inst, lam);
  CHECK(sol.delta == doctest::Approx(26.522).epsilon(1e-4));
  CHECK(regret == doctest::Approx(31.827).epsilon(1e-4));
  CHECK(relative_regret_ui(regret, sol.delta) == doctest::Approx(20.0).epsilon(1e-3));
}

TEST_CASE("Monte Carlo cost") {
  RngStream rng(41, 0);
  const CostParameters unit(1.0, 1.0);
  const auto pm = monte_carlo_cost(DemandDistribution::point_mass(12.0), unit, 12.0, 1000, rng);
  CHECK(pm.estimate == 0.0);
  CHECK(pm.standard_error == 0.0);

  const auto e = DemandDistribution::exponential(80.0);
  const auto big = monte_carlo_cost(e, unit, 80.0 * std::log(2.0), 1000000, rng);
  CHECK(std::abs(big.estimate - 55.452) <= 5.0 * big.standard_error);
  CHECK(std::abs(big.estimate - cost(e, unit, 80.0 * std::log(2.0))) <= 5.0 * big.standard_error);

  // a single draw is the loss of that draw
  RngStream a(42, 0);
  RngStream b(42, 0);
  const double x = e.draw(a);
  const auto one = monte_carlo_cost(e, CostParameters(3.0, 2.0), 50.0, 1, b);
  CHECK(one.estimate == doctest::Approx(x > 50.0 ? 3.0 * (x - 50.0) : 2.0 * (50.0 - x)));
  CHECK_THROWS_AS(monte_carlo_cost(e, unit, 1.0, 0, rng), std::invalid_argument);
}

TEST_CASE("property: analytic cost within 5 SE of Monte Carlo") {
  RngStream rng(43, 0);
  const std::vector<DemandDistribution> gs = {
      DemandDistribution::discrete_uniform(0, 100), DemandDistribution::exponential(80.0),
      DemandDistribution::poisson(80.0), DemandDistribution::truncated_normal(80.0, 30.0),
      DemandDistribution::point_mass_mixture({{0.0, 0.3}, {10.0, 0.5}, {40.0, 0.2}})};
  for (int i = 0; i < 20; ++i) {
    const auto& g = gs[static_cast<std::size_t>(i) % gs.size()];
    const CostParameters cp(0.2 + 9.0 * rng.uniform(), 0.2 + 3.0 * rng.uniform());
    const double q = g.quantile(0.02 + 0.96 * rng.uniform()) * (0.5 + rng.uniform());
    const auto mc = monte_carlo_cost(g, cp, q, 1000000, rng);
    CHECK(std::abs(mc.estimate - cost(g, cp, q)) <= 5.0 * mc.standard_error + 1e-12);
  }
}

TEST_CASE("policy names") {
  CHECK(all_policies().size() == 6);
  for (PolicyKind p : all_policies()) {
    CHECK(parse_policy(to_string(p)) == p);
  }
  CHECK(parse_policy("censored_saa") == PolicyKind::censored_saa);
  CHECK_THROWS_AS(parse_policy("oracle"), std::invalid_argument);
}

TEST_CASE("grid and streams") {
  ExperimentTemplate t = uniform_template();
  t.b_values = {1.0, 9.0};
  t.lambdas = {40.0, 60.0};
  t.n_values = {10, 20, 30};
  const auto grid = expand_grid(t);
  REQUIRE(grid.size() == 12);
  CHECK(grid[0].b == 1.0);
  CHECK(grid[0].lambda == 40.0);
  CHECK(grid[1].n == 20);
  CHECK(grid[3].lambda == 60.0);
  CHECK(grid[6].b == 9.0);
  CHECK(replication_stream(0, 0) != replication_stream(0, 1));
  CHECK(replication_stream(1, 0) != replication_stream(0, 1));

  t.lambdas.clear();
  t.lambda_fractions = {0.5, 1.0};
  const auto frac = expand_grid(t);
  // fractions of the reference quantile of Uniform{0..100} at 0.9
  CHECK(frac[0].lambda == doctest::Approx(45.0));
  CHECK(frac[3].lambda == doctest::Approx(90.0));
}

TEST_CASE("run_replications") {
  SUBCASE("one replication, one policy, one point") {
    ExperimentTemplate t = uniform_template();
    t.replications = 1;
    t.policies = {PolicyKind::rcn};
    const auto rows = run_replications(t);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].policy == "rcn");
    CHECK(rows[0].q_alg.has_value());
  }
  SUBCASE("deterministic across runs and thread counts") {
    ExperimentTemplate t = uniform_template();
    t.n_values = {20, 80};
    t.replications = 7;
    const std::string a = reports_to_csv(run_replications(t, 1));
    CHECK(a == reports_to_csv(run_replications(t, 1)));
    CHECK(a == reports_to_csv(run_replications(t, 3)));
    t.seed = 78;
    CHECK(a != reports_to_csv(run_replications(t, 1)));
  }
  SUBCASE("missing shadow flags only true SAA") {
    ExperimentTemplate t = uniform_template();
    t.provide_uncensored = false;
    t.policies = {PolicyKind::rcn, PolicyKind::true_saa, PolicyKind::censored_saa};
    for (const auto& row : run_replications(t)) {
      if (row.policy == "rcn") {
        CHECK_FALSE(row.error.has_value());
        CHECK(row.regret.has_value());
      } else {
        CHECK(row.error.has_value());
        CHECK(row.branch == "error");
        CHECK_FALSE(row.regret.has_value());
      }
    }
  }
  SUBCASE("metrics agree with the analytic instance") {
    ExperimentTemplate t = uniform_template();
    t.lambdas = {57.21, 108.07};
    const auto rows = run_replications(t);
    for (const auto& row : rows) {
      REQUIRE_FALSE(row.error.has_value());
      const Instance inst(t.distribution, row.lambda, t.cap, CostParameters(row.b, row.h));
      const auto sol = minimax_risk(inst);
      CHECK(row.regime == sol.regime);
      CHECK(*row.regret >= -1e-9);
      CHECK(*row.vanilla_regret >= -1e-9);
      CHECK(*row.regret == doctest::Approx(worst_case_regret(inst, *row.q_alg)));
      CHECK(*row.regret_minus_delta == doctest::Approx(*row.regret - sol.delta));
      if (sol.regime == Regime::unidentifiable) {
        CHECK(row.rel_regret_ui.has_value());
        CHECK_FALSE(row.rel_regret_id.has_value());
      } else {
        CHECK(row.rel_regret_id.has_value());
        CHECK_FALSE(row.rel_regret_ui.has_value());
      }
    }
  }
  SUBCASE("CSV layout") {
    ExperimentTemplate t = uniform_template();
    t.replications = 1;
    t.policies = {PolicyKind::rcn};
    const std::string csv = reports_to_csv(run_replications(t));
    CHECK(csv.rfind(std::string(kReportCsvHeader) + "\n", 0) == 0);
    CHECK(std::string(kReportCsvHeader) ==
          "policy,lambda,n,b,h,replication,q_alg,branch,regret,regret_minus_delta,"
          "vanilla_regret,rel_regret_ui,rel_regret_id,regime,seed");
  }
}

TEST_CASE("property: mean RCN relative regret falls with N") {
  ExperimentTemplate t = uniform_template();
  t.n_values = {50, 100, 200, 400, 800};
  t.replications = 100;
  t.policies = {PolicyKind::rcn};
  std::map<std::size_t, double> sum;
  for (const auto& row : run_replications(t, 2)) {
    sum[row.n] += *row.rel_regret_ui;
  }
  int rises = 0;
  double prev = sum.begin()->second;
  for (auto it = std::next(sum.begin()); it != sum.end(); ++it) {
    rises += it->second > prev ? 1 : 0;
    prev = it->second;
  }
  CHECK(rises <= 1);
  CHECK(sum.rbegin()->second < sum.begin()->second);
}
