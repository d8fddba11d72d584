#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "censnv/distributions.hpp"
#include "censnv/minimax.hpp"
#include "censnv/newsvendor.hpp"
#include "censnv/rng.hpp"

namespace censnv {

/// 100 (Regret - Delta) / Delta; defined only when Delta > 0.
double relative_regret_ui(double regret, double delta);
/// 100 (C(q) - C(q*)) / C(q*); defined only when C(q*) > 0.
double relative_regret_id(double cost_q, double cost_star);

struct MonteCarloEstimate {
  double estimate;
  double standard_error;
};

MonteCarloEstimate monte_carlo_cost(const DemandDistribution& d,
                                    const CostParameters& cp, double q,
                                    std::size_t n, RngStream& rng);

enum class PolicyKind {
  rcn,
  rcn_plus,
  naive_saa,
  subsample_saa,
  kaplan_meier,
  true_saa,
  censored_saa, // reserved slot, always reported as unavailable
};

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);
std::vector<PolicyKind> all_policies();

struct RegretReport {
  std::string policy;
  double lambda = 0.0;
  std::size_t n = 0;
  double b = 0.0;
  double h = 0.0;
  std::size_t grid_index = 0;
  std::size_t replication = 0;
  std::optional<double> q_alg;
  std::string branch;
  std::optional<double> regret;
  std::optional<double> regret_minus_delta;
  std::optional<double> vanilla_regret;
  std::optional<double> rel_regret_ui;
  std::optional<double> rel_regret_id;
  Regime regime = Regime::identifiable;
  std::uint64_t seed = 0;
  std::optional<std::string> error;
};

/// Metrics of a single order quantity on a known instance. Orders above M
/// are evaluated at M.
RegretReport evaluate_order(const Instance& inst, const MinimaxSolution& sol,
                            double q);

struct ExperimentTemplate {
  DemandDistribution distribution = DemandDistribution::point_mass(0.0);
  double h = 1.0;
  std::vector<double> b_values;
  /// Absolute boundaries, used when non-empty.
  std::vector<double> lambdas;
  /// Otherwise lambda = fraction * q*_G at reference_rho.
  std::vector<double> lambda_fractions;
  double reference_rho = 0.9;
  std::vector<std::size_t> n_values;
  std::size_t replications = 100;
  double delta = 0.3;
  double cap = 0.0;
  std::uint64_t seed = 0;
  std::size_t num_groups = 2;
  bool integer_order_quantities = false;
  bool provide_uncensored = true;
  std::vector<PolicyKind> policies;
};

struct GridPoint {
  double b;
  double lambda;
  std::size_t n;
};

/// Grid in (b, lambda, n) order, n varying fastest.
std::vector<GridPoint> expand_grid(const ExperimentTemplate& tmpl);

/// Stream index of replication r at grid point g.
std::uint64_t replication_stream(std::size_t grid_index,
                                 std::size_t replication);

/// Every (grid point, replication, policy) row, sorted in that order whatever
/// the number of worker threads.
std::vector<RegretReport> run_replications(const ExperimentTemplate& tmpl,
                                           std::size_t jobs = 1);

extern const char* const kReportCsvHeader;
std::string reports_to_csv(const std::vector<RegretReport>& reports);

} // namespace censnv

namespace censnv {

/// Random instance for the oracle suite. Families, cost ratios and the
/// position of lambda are drawn from `rng`; the regime is the one requested.
Instance random_oracle_instance(RngStream& rng, Regime regime);

struct OrderProbe {
  double q;
  std::string branch; // "id:below", "id:above", "ui:below", "ui:hedge", "ui:above"
};

/// Orders covering every branch of the worst-case regret on `inst`,
/// including the branch endpoints.
std::vector<OrderProbe> oracle_probes(const Instance& inst, RngStream& rng);

struct OracleCheckSummary {
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t evaluations = 0;
  std::size_t identifiable = 0;
  std::size_t unidentifiable = 0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, std::size_t>> branch_counts;
  std::vector<std::string> failures;
};

/// Closed-form worst-case regret against the brute-force oracle on `count`
/// instances, half in each regime. Tolerance max(1e-6, 1e-3 |oracle|).
OracleCheckSummary run_oracle_check(std::uint64_t seed, std::size_t count = 200,
                                    std::size_t grid_size = 10000);

} // namespace censnv
