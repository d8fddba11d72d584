#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "censnv/distributions.hpp"
#include "censnv/policies.hpp"
#include "censnv/rng.hpp"

namespace censnv {

/// Sales under stock q_off: elementwise min{d, q_off}.
std::vector<double> censor(std::span<const double> demands, double q_off);

struct GenerationConfig {
  DemandDistribution distribution;
  double lambda;
  std::size_t num_groups = 2;
  std::size_t samples_per_group = 100;
  std::uint64_t seed = 0;
  /// Draw the non-boundary order quantities as integers in
  /// {ceil(lambda/4), ..., floor(3 lambda/4)} instead of Uniform[lambda/4, 3 lambda/4].
  bool integer_order_quantities = false;
};

struct GeneratedData {
  CensoredDataset dataset;
  /// Uncensored demands, one vector per group, aligned with dataset.groups().
  std::vector<std::vector<double>> demands;
};

/// Group 1 is ordered at lambda; every further group at a random quantity in
/// [lambda/4, 3 lambda/4]. Each group gets its own fresh demand draws.
GeneratedData generate_dataset(const GenerationConfig& cfg);
GeneratedData generate_dataset(const GenerationConfig& cfg, RngStream& rng);

struct SalesRecord {
  std::chrono::year_month_day date;
  std::string category;
  long long quantity;
};

struct SalesCsvOptions {
  std::string category;
  std::string date_column = "order_date";
  std::string category_column = "category";
  std::string quantity_column = "quantity";
  /// Tokens %Y, %m, %d; other characters must match literally.
  std::string date_format = "%Y-%m-%d";
  /// Dates (in date_format) to drop along with weekends.
  std::vector<std::string> holidays;
  std::optional<std::string> date_from;
  std::optional<std::string> date_to;
  /// Daily totals drawn without replacement; 0 keeps every day.
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

std::chrono::year_month_day parse_date(const std::string& text,
                                       const std::string& format);
std::string format_iso_date(const std::chrono::year_month_day& date);

std::vector<SalesRecord> read_sales_csv(const std::string& path,
                                        const SalesCsvOptions& options);

/// Per-day totals for options.category on business days. A day on which the
/// file records orders in other categories only counts as zero demand.
std::vector<double> daily_demand(std::span<const SalesRecord> records,
                                 const SalesCsvOptions& options);

DemandDistribution ingest_sales_csv(const std::string& path,
                                    const SalesCsvOptions& options);

} // namespace censnv
