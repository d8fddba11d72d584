#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "censnv/newsvendor.hpp"

namespace censnv {

/// Sales observed under one historical order quantity.
struct SalesGroup {
  double order_quantity;
  std::vector<double> sales;
};

/// Grouped censored sales history.
///
/// Every sale lies in [0, order_quantity]; a sale equal to its group's order
/// quantity is treated as censored. Groups sharing the largest order quantity
/// together form the boundary group.
class CensoredDataset {
public:
  explicit CensoredDataset(std::vector<SalesGroup> groups);

  const std::vector<SalesGroup>& groups() const { return groups_; }
  std::size_t num_groups() const { return groups_.size(); }

  /// lambda = max_k q_off_k.
  double boundary() const { return boundary_; }
  /// N = min_k N_k.
  std::size_t min_group_size() const;
  std::size_t total_size() const;

  /// Indices of groups whose order quantity equals `at`.
  std::vector<std::size_t> groups_at(double at) const;
  std::vector<double> pooled_sales(std::span<const std::size_t> groups) const;
  std::vector<double> all_sales() const;

private:
  std::vector<SalesGroup> groups_;
  double boundary_;
};

enum class Branch { likely_identifiable, likely_unidentifiable, knife_edge };

std::string to_string(Branch branch);

struct PolicyDecision {
  std::string policy;
  double q = 0.0;
  std::optional<Branch> branch;
  std::optional<double> g_minus_hat;
  std::optional<double> zeta;
  /// RCN+ only: groups passing the identifiability test.
  std::vector<std::size_t> likely_identifiable_groups;
};

inline constexpr double kDefaultConfidence = 0.3;

/// inf{x : #{s_i <= x} / n >= rho}, i.e. the ceil(rho n)-th order statistic.
double sample_quantile(std::vector<double> values, double rho);

/// Fraction of sales strictly below `at`, pooled over groups ordered at `at`.
double g_minus_hat(const CensoredDataset& ds, double at);

double censored_saa_quantile(const CensoredDataset& ds, double rho,
                             std::span<const std::size_t> groups);

/// Plug-in estimate of the minimax order from an estimate of G^-(lambda).
double q_dagger_hat(double ghat, const CostParameters& cp, double lambda,
                    double cap);

/// Robust Censored Newsvendor: identifiability test on the boundary group,
/// then censored SAA, the plug-in minimax order, or lambda.
PolicyDecision rcn(const CensoredDataset& ds, const CostParameters& cp,
                   double cap, double delta = kDefaultConfidence);

/// RCN with a Bonferroni-corrected test on every group; pools all groups that
/// pass.
PolicyDecision rcn_plus(const CensoredDataset& ds, const CostParameters& cp,
                        double cap, double delta = kDefaultConfidence);

double naive_saa(const CensoredDataset& ds, double rho);
double subsample_saa(const CensoredDataset& ds, double rho);
double kaplan_meier(const CensoredDataset& ds, double rho);

/// SAA on the uncensored demands (simulation only).
double true_saa(std::span<const std::vector<double>> demands, double rho);

/// Product-limit estimate of the CDF at its jump points.
struct KaplanMeierCurve {
  std::vector<double> times;
  std::vector<double> cdf;
};
KaplanMeierCurve kaplan_meier_curve(const CensoredDataset& ds);

} // namespace censnv
