#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "censnv/data.hpp"
#include "censnv/evaluation.hpp"
#include "censnv/io.hpp"
#include "censnv/minimax.hpp"

namespace censnv {

/// Experiment sweep read from a JSON config file.
struct ExperimentConfig {
  ExperimentTemplate experiment;
  std::optional<std::string> output;
};

/// Unknown keys are rejected. Relative paths (sales_csv.path) resolve
/// against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::string& base_dir = ".");
ExperimentConfig read_experiment_config(const std::string& path);

/// Accepts either a compact spec string or the path of a distribution JSON
/// file (anything ending in ".json").
DemandDistribution resolve_distribution(const std::string& arg);

nlohmann::json cmd_risk(const Instance& inst);

/// Rows q, regret on a uniform grid of `points` orders over [0, M], with
/// q^Delta merged in.
std::string cmd_regret_curve(const Instance& inst, std::size_t points);

nlohmann::json cmd_decide(const DatasetFile& file, const std::string& policy,
                          double delta, std::optional<double> cap);

std::string cmd_simulate(const ExperimentConfig& config, std::size_t jobs);

struct IngestOptions {
  std::string path;
  SalesCsvOptions csv;
  CostParameters cost{1.0, 1.0};
  double lambda = 0.0;
  std::optional<double> cap;
  std::size_t num_groups = 2;
  std::size_t samples_per_group = 100;
  std::uint64_t seed = 0;
};

/// Ingests sales, then censors a protocol dataset drawn from the empirical
/// daily demand. The cap defaults to the largest daily demand.
DatasetFile cmd_ingest(const IngestOptions& options);

/// `regime` is "id", "ke", "ui" or "all".
nlohmann::json cmd_lower_bound(const std::string& regime,
                               const CostParameters& cp, double lambda,
                               double cap, std::size_t n);

nlohmann::json cmd_sample_complexity(const CostParameters& cp, double lambda,
                                     double cap, double epsilon, double delta);

/// Human-readable summary; the first line reads "k/n instances within
/// tolerance".
std::string format_oracle_summary(const OracleCheckSummary& s);

} // namespace censnv
