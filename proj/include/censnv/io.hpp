#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "censnv/distributions.hpp"
#include "censnv/newsvendor.hpp"
#include "censnv/policies.hpp"

namespace censnv {

/// On-disk dataset: cost parameters, cap M, censored groups and (for
/// simulated data) the uncensored demands behind them.
struct DatasetFile {
  CostParameters cost;
  double cap;
  CensoredDataset dataset;
  std::optional<std::vector<std::vector<double>>> uncensored;
};

DatasetFile dataset_from_json(const nlohmann::json& j);
nlohmann::json dataset_to_json(const DatasetFile& file);

/// Reads a dataset file; parse errors carry the line and column.
DatasetFile read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const DatasetFile& file);

/// Parses JSON text, rethrowing syntax errors as std::invalid_argument with
/// line information.
nlohmann::json parse_json_text(const std::string& text,
                               const std::string& origin);

/// {"family": "exponential", "mean": 80}, {"family": "discrete_uniform",
/// "low": 0, "high": 100}, {"family": "poisson", "mean": 80},
/// {"family": "truncated_normal", "mean": 80, "sd": 30},
/// {"family": "point_mass_mixture", "atoms": [[0, 0.4], [10, 0.6]]},
/// {"family": "empirical", "samples": [...]}.
DemandDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const DemandDistribution& d);

/// Compact command-line form: exponential:80, uniform:0:100, poisson:80,
/// normal:80:30, atoms:0=0.4,10=0.6, empirical:1,2,3.
DemandDistribution parse_distribution_spec(const std::string& spec);

} // namespace censnv
