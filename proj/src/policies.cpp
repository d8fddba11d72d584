#include "censnv/policies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace censnv {

CensoredDataset::CensoredDataset(std::vector<SalesGroup> groups)
    : groups_(std::move(groups)), boundary_(0.0) {
  if (groups_.empty()) {
    throw std::invalid_argument("dataset: at least one group is required");
  }
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    const SalesGroup& g = groups_[k];
    if (!std::isfinite(g.order_quantity) || g.order_quantity < 0.0) {
      throw std::invalid_argument("dataset: group " + std::to_string(k) +
                                  " has an invalid order quantity");
    }
    if (g.sales.empty()) {
      throw std::invalid_argument("dataset: group " + std::to_string(k) +
                                  " has no sales");
    }
    for (double s : g.sales) {
      if (!(s >= 0.0) || s > g.order_quantity) {
        throw std::invalid_argument(
            "dataset: group " + std::to_string(k) +
            " has a sale outside [0, order_quantity]");
      }
    }
    boundary_ = std::max(boundary_, g.order_quantity);
  }
}

std::size_t CensoredDataset::min_group_size() const {
  std::size_t n = groups_.front().sales.size();
  for (const SalesGroup& g : groups_) {
    n = std::min(n, g.sales.size());
  }
  return n;
}

std::size_t CensoredDataset::total_size() const {
  std::size_t n = 0;
  for (const SalesGroup& g : groups_) {
    n += g.sales.size();
  }
  return n;
}

std::vector<std::size_t> CensoredDataset::groups_at(double at) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    if (groups_[k].order_quantity == at) {
      out.push_back(k);
    }
  }
  return out;
}

std::vector<double> CensoredDataset::pooled_sales(
    std::span<const std::size_t> groups) const {
  std::vector<double> out;
  for (std::size_t k : groups) {
    const auto& s = groups_.at(k).sales;
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<double> CensoredDataset::all_sales() const {
  std::vector<double> out;
  out.reserve(total_size());
  for (const SalesGroup& g : groups_) {
    out.insert(out.end(), g.sales.begin(), g.sales.end());
  }
  return out;
}

std::string to_string(Branch branch) {
  switch (branch) {
  case Branch::likely_identifiable:
    return "likely-identifiable";
  case Branch::likely_unidentifiable:
    return "likely-unidentifiable";
  case Branch::knife_edge:
    return "knife-edge";
  }
  return "unknown";
}

double sample_quantile(std::vector<double> values, double rho) {
  if (values.empty()) {
    throw std::invalid_argument("sample_quantile: no samples");
  }
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("sample_quantile: rho must lie in (0, 1]");
  }
  const std::size_t n = values.size();
  const double nd = static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(rho * nd));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / nd >= rho) {
    --k;
  }
  while (k < n && static_cast<double>(k) / nd < rho) {
    ++k;
  }
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

namespace {

struct BelowCount {
  std::size_t below = 0;
  std::size_t total = 0;
};

BelowCount count_below(const CensoredDataset& ds,
                       std::span<const std::size_t> groups, double at) {
  BelowCount c;
  for (std::size_t k : groups) {
    for (double s : ds.groups()[k].sales) {
      c.below += s < at ? 1 : 0;
      ++c.total;
    }
  }
  return c;
}

double confidence_radius(double log_term, std::size_t n) {
  return std::sqrt(log_term / (2.0 * static_cast<double>(n)));
}

void check_confidence(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("confidence delta must lie in (0, 1)");
  }
}

} // namespace

double g_minus_hat(const CensoredDataset& ds, double at) {
  const auto groups = ds.groups_at(at);
  if (groups.empty()) {
    throw std::invalid_argument(
        "g_minus_hat: no group was ordered at the requested quantity");
  }
  const BelowCount c = count_below(ds, groups, at);
  return static_cast<double>(c.below) / static_cast<double>(c.total);
}

double censored_saa_quantile(const CensoredDataset& ds, double rho,
                             std::span<const std::size_t> groups) {
  return sample_quantile(ds.pooled_sales(groups), rho);
}

double q_dagger_hat(double ghat, const CostParameters& cp, double lambda,
                    double cap) {
  if (!(ghat >= 0.0 && ghat < 1.0)) {
    throw std::invalid_argument("q_dagger_hat: estimate must lie in [0, 1)");
  }
  const double b = cp.b();
  const double h = cp.h();
  return (b * cap + h * lambda - (b + h) * ghat * cap) /
         ((b + h) * (1.0 - ghat));
}

namespace {

// Shared tail of RCN / RCN+: unidentifiable estimate or knife-edge fallback.
void decide_boundary(PolicyDecision& out, const CostParameters& cp,
                     double lambda, double cap, double ghat, double zeta) {
  if (ghat < cp.rho() - zeta) {
    out.branch = Branch::likely_unidentifiable;
    out.q = q_dagger_hat(ghat, cp, lambda, cap);
  } else {
    out.branch = Branch::knife_edge;
    out.q = lambda;
  }
}

} // namespace

PolicyDecision rcn(const CensoredDataset& ds, const CostParameters& cp,
                   double cap, double delta) {
  check_confidence(delta);
  const double lambda = ds.boundary();
  const auto boundary = ds.groups_at(lambda);
  const BelowCount c = count_below(ds, boundary, lambda);
  const double ghat =
      static_cast<double>(c.below) / static_cast<double>(c.total);
  const double zeta = confidence_radius(std::log(2.0 / delta), c.total);

  PolicyDecision out;
  out.policy = "rcn";
  out.g_minus_hat = ghat;
  out.zeta = zeta;
  if (ghat >= cp.rho() + zeta) {
    out.branch = Branch::likely_identifiable;
    out.q = censored_saa_quantile(ds, cp.rho(), boundary);
    return out;
  }
  decide_boundary(out, cp, lambda, cap, ghat, zeta);
  return out;
}

PolicyDecision rcn_plus(const CensoredDataset& ds, const CostParameters& cp,
                        double cap, double delta) {
  check_confidence(delta);
  // one test per distinct order quantity, largest first
  std::map<double, std::vector<std::size_t>, std::greater<>> levels;
  for (std::size_t k = 0; k < ds.num_groups(); ++k) {
    levels[ds.groups()[k].order_quantity].push_back(k);
  }
  const double log_term =
      std::log(2.0 * static_cast<double>(levels.size()) / delta);

  PolicyDecision out;
  out.policy = "rcn_plus";
  std::vector<std::size_t> passing;
  double boundary_ghat = 0.0;
  double boundary_zeta = 0.0;
  for (const auto& [q_off, members] : levels) {
    const BelowCount c = count_below(ds, members, q_off);
    const double ghat =
        static_cast<double>(c.below) / static_cast<double>(c.total);
    const double zeta = confidence_radius(log_term, c.total);
    if (q_off == ds.boundary()) {
      boundary_ghat = ghat;
      boundary_zeta = zeta;
    }
    if (ghat >= cp.rho() + zeta) {
      passing.insert(passing.end(), members.begin(), members.end());
    }
  }
  std::sort(passing.begin(), passing.end());
  out.g_minus_hat = boundary_ghat;
  out.zeta = boundary_zeta;
  out.likely_identifiable_groups = passing;

  if (!passing.empty()) {
    out.branch = Branch::likely_identifiable;
    out.q = censored_saa_quantile(ds, cp.rho(), passing);
    return out;
  }
  decide_boundary(out, cp, ds.boundary(), cap, boundary_ghat, boundary_zeta);
  return out;
}

double naive_saa(const CensoredDataset& ds, double rho) {
  return sample_quantile(ds.all_sales(), rho);
}

double subsample_saa(const CensoredDataset& ds, double rho) {
  std::vector<double> uncensored;
  for (const SalesGroup& g : ds.groups()) {
    for (double s : g.sales) {
      if (s < g.order_quantity) {
        uncensored.push_back(s);
      }
    }
  }
  if (uncensored.empty()) {
    return ds.boundary();
  }
  return sample_quantile(std::move(uncensored), rho);
}

KaplanMeierCurve kaplan_meier_curve(const CensoredDataset& ds) {
  struct Obs {
    double time;
    bool event;
  };
  std::vector<Obs> obs;
  obs.reserve(ds.total_size());
  for (const SalesGroup& g : ds.groups()) {
    for (double s : g.sales) {
      obs.push_back({s, s < g.order_quantity});
    }
  }
  std::sort(obs.begin(), obs.end(),
            [](const Obs& a, const Obs& b) { return a.time < b.time; });

  KaplanMeierCurve curve;
  double survival = 1.0;
  std::size_t at_risk = obs.size();
  std::size_t i = 0;
  while (i < obs.size()) {
    const double t = obs[i].time;
    std::size_t events = 0;
    std::size_t ties = 0;
    while (i < obs.size() && obs[i].time == t) {
      events += obs[i].event ? 1 : 0;
      ++ties;
      ++i;
    }
    if (events > 0) {
      // censored observations tied with events stay in the risk set
      survival *= 1.0 - static_cast<double>(events) /
                            static_cast<double>(at_risk);
      curve.times.push_back(t);
      curve.cdf.push_back(1.0 - survival);
    }
    at_risk -= ties;
  }
  return curve;
}

double kaplan_meier(const CensoredDataset& ds, double rho) {
  const KaplanMeierCurve curve = kaplan_meier_curve(ds);
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    // product-limit rounding would otherwise miss exact hits of rho
    if (curve.cdf[j] >= rho - 1e-12) {
      return curve.times[j];
    }
  }
  return ds.boundary();
}

double true_saa(std::span<const std::vector<double>> demands, double rho) {
  std::vector<double> pooled;
  for (const auto& group : demands) {
    pooled.insert(pooled.end(), group.begin(), group.end());
  }
  if (pooled.empty()) {
    throw std::invalid_argument(
        "true_saa: uncensored demands are unavailable");
  }
  return sample_quantile(std::move(pooled), rho);
}

} // namespace censnv
