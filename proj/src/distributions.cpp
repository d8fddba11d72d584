#include "censnv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace censnv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

void check_probability(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile: probability must lie in (0, 1]");
  }
}

double normal_quantile(double p) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

std::string to_string(Family family) {
  switch (family) {
  case Family::discrete_uniform:
    return "discrete_uniform";
  case Family::exponential:
    return "exponential";
  case Family::poisson:
    return "poisson";
  case Family::truncated_normal:
    return "truncated_normal";
  case Family::point_mass_mixture:
    return "point_mass_mixture";
  case Family::empirical:
    return "empirical";
  }
  return "unknown";
}

namespace detail {

AtomTable AtomTable::build(std::vector<double> values,
                           std::vector<double> weights) {
  if (values.size() != weights.size()) {
    throw std::invalid_argument("atom values and weights differ in length");
  }
  if (values.empty()) {
    throw std::invalid_argument("distribution needs at least one atom");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw std::invalid_argument("atoms must be finite and nonnegative");
    }
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw std::invalid_argument("atom weights must be finite and >= 0");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return values[a] < values[b];
  });

  AtomTable t;
  std::vector<double> merged_weights;
  for (std::size_t i : order) {
    if (weights[i] == 0.0) {
      continue;
    }
    if (!t.values.empty() && t.values.back() == values[i]) {
      merged_weights.back() += weights[i];
    } else {
      t.values.push_back(values[i]);
      merged_weights.push_back(weights[i]);
    }
  }
  if (t.values.empty()) {
    throw std::invalid_argument("atom weights sum to zero");
  }
  const double total =
      std::accumulate(merged_weights.begin(), merged_weights.end(), 0.0);

  double running = 0.0;
  double running_first = 0.0;
  t.probs.reserve(t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    running += merged_weights[i];
    running_first += merged_weights[i] * t.values[i];
    t.probs.push_back(merged_weights[i] / total);
    t.cum.push_back(running / total);
    t.cum_first.push_back(running_first / total);
  }
  t.cum.back() = 1.0;
  return t;
}

double AtomTable::cdf(double x) const {
  const auto idx = std::upper_bound(values.begin(), values.end(), x) -
                   values.begin();
  return idx == 0 ? 0.0 : cum[static_cast<std::size_t>(idx - 1)];
}

double AtomTable::cdf_strict(double x) const {
  const auto idx = std::lower_bound(values.begin(), values.end(), x) -
                   values.begin();
  return idx == 0 ? 0.0 : cum[static_cast<std::size_t>(idx - 1)];
}

double AtomTable::quantile(double p) const {
  auto it = std::lower_bound(cum.begin(), cum.end(), p);
  if (it == cum.end()) {
    return values.back();
  }
  return values[static_cast<std::size_t>(it - cum.begin())];
}

double AtomTable::first_moment(double x, Bound bound) const {
  const auto it = bound == Bound::inclusive
                      ? std::upper_bound(values.begin(), values.end(), x)
                      : std::lower_bound(values.begin(), values.end(), x);
  const auto idx = it - values.begin();
  return idx == 0 ? 0.0 : cum_first[static_cast<std::size_t>(idx - 1)];
}

double AtomTable::mean() const { return cum_first.back(); }

} // namespace detail

DemandDistribution DemandDistribution::discrete_uniform(long long low,
                                                        long long high) {
  if (low < 0 || high < low) {
    throw std::invalid_argument(
        "discrete_uniform: need 0 <= low <= high");
  }
  return DemandDistribution(detail::DiscreteUniform{low, high});
}

DemandDistribution DemandDistribution::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("exponential: mean must be positive");
  }
  return DemandDistribution(detail::Exponential{mean});
}

DemandDistribution DemandDistribution::poisson(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be positive");
  }
  // pmf in log space; stop once past the mean and the pmf is negligible
  std::vector<double> values;
  std::vector<double> probs;
  const double log_mean = std::log(mean);
  for (long long k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double pmf = std::exp(-mean + kd * log_mean - std::lgamma(kd + 1.0));
    values.push_back(kd);
    probs.push_back(pmf);
    if (kd > mean && pmf < 1e-18) {
      break;
    }
  }
  return DemandDistribution(detail::Poisson{
      mean, detail::AtomTable::build(std::move(values), std::move(probs))});
}

DemandDistribution DemandDistribution::truncated_normal(double mean,
                                                        double sd) {
  if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
    throw std::invalid_argument("truncated_normal: need finite mean, sd > 0");
  }
  return DemandDistribution(detail::TruncatedNormal{mean, sd});
}

DemandDistribution DemandDistribution::point_mass_mixture(
    std::vector<Atom> atoms) {
  std::vector<double> values;
  std::vector<double> probs;
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (a.probability < 0.0) {
      throw std::invalid_argument(
          "point_mass_mixture: probabilities must be nonnegative");
    }
    values.push_back(a.value);
    probs.push_back(a.probability);
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "point_mass_mixture: probabilities must sum to 1");
  }
  return DemandDistribution(detail::PointMassMixture{
      detail::AtomTable::build(std::move(values), std::move(probs))});
}

DemandDistribution DemandDistribution::point_mass(double value) {
  return point_mass_mixture({{value, 1.0}});
}

DemandDistribution DemandDistribution::bernoulli(double p_one) {
  if (!(p_one >= 0.0 && p_one <= 1.0)) {
    throw std::invalid_argument("bernoulli: p must lie in [0, 1]");
  }
  return point_mass_mixture({{0.0, 1.0 - p_one}, {1.0, p_one}});
}

DemandDistribution DemandDistribution::empirical(std::vector<double> values,
                                                 std::vector<double> weights) {
  const std::size_t n = values.size();
  return DemandDistribution(detail::Empirical{
      detail::AtomTable::build(std::move(values), std::move(weights)), n});
}

DemandDistribution empirical_from_samples(std::span<const double> xs) {
  if (xs.empty()) {
    throw std::invalid_argument("empirical_from_samples: no samples");
  }
  std::vector<double> values(xs.begin(), xs.end());
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(
          "empirical_from_samples: samples must be finite and >= 0");
    }
  }
  std::vector<double> weights(values.size(), 1.0);
  return DemandDistribution::empirical(std::move(values), std::move(weights));
}

Family DemandDistribution::family() const {
  return std::visit(
      Overloaded{
          [](const detail::DiscreteUniform&) { return Family::discrete_uniform; },
          [](const detail::Exponential&) { return Family::exponential; },
          [](const detail::Poisson&) { return Family::poisson; },
          [](const detail::TruncatedNormal&) { return Family::truncated_normal; },
          [](const detail::PointMassMixture&) {
            return Family::point_mass_mixture;
          },
          [](const detail::Empirical&) { return Family::empirical; },
      },
      repr_);
}

std::string DemandDistribution::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      Overloaded{
          [&](const detail::DiscreteUniform& d) {
            os << "discrete_uniform(" << d.low << ", " << d.high << ")";
          },
          [&](const detail::Exponential& d) {
            os << "exponential(mean=" << d.mean << ")";
          },
          [&](const detail::Poisson& d) {
            os << "poisson(mean=" << d.mean << ")";
          },
          [&](const detail::TruncatedNormal& d) {
            os << "truncated_normal(mean=" << d.mean << ", sd=" << d.sd << ")";
          },
          [&](const detail::PointMassMixture& d) {
            os << "point_mass_mixture(" << d.table.values.size() << " atoms)";
          },
          [&](const detail::Empirical& d) {
            os << "empirical(" << d.sample_count << " samples)";
          },
      },
      repr_);
  return os.str();
}

double DemandDistribution::cdf(double x) const {
  if (x < 0.0) {
    return 0.0;
  }
  return std::visit(
      Overloaded{
          [&](const detail::DiscreteUniform& d) {
            const double k = std::floor(x);
            if (k >= static_cast<double>(d.high)) {
              return 1.0;
            }
            if (k < static_cast<double>(d.low)) {
              return 0.0;
            }
            const double n = static_cast<double>(d.high - d.low + 1);
            return (k - static_cast<double>(d.low) + 1.0) / n;
          },
          [&](const detail::Exponential& d) { return -std::expm1(-x / d.mean); },
          [&](const detail::Poisson& d) { return d.table.cdf(x); },
          [&](const detail::TruncatedNormal& d) {
            return normal_cdf((x - d.mean) / d.sd);
          },
          [&](const detail::PointMassMixture& d) { return d.table.cdf(x); },
          [&](const detail::Empirical& d) { return d.table.cdf(x); },
      },
      repr_);
}

double DemandDistribution::cdf_strict(double x) const {
  if (x <= 0.0) {
    return 0.0;
  }
  return std::visit(
      Overloaded{
          [&](const detail::DiscreteUniform& d) {
            // largest integer strictly below x
            const double k = std::ceil(x) - 1.0;
            if (k >= static_cast<double>(d.high)) {
              return 1.0;
            }
            if (k < static_cast<double>(d.low)) {
              return 0.0;
            }
            const double n = static_cast<double>(d.high - d.low + 1);
            return (k - static_cast<double>(d.low) + 1.0) / n;
          },
          [&](const detail::Exponential& d) { return -std::expm1(-x / d.mean); },
          [&](const detail::Poisson& d) { return d.table.cdf_strict(x); },
          [&](const detail::TruncatedNormal& d) {
            return normal_cdf((x - d.mean) / d.sd);
          },
          [&](const detail::PointMassMixture& d) {
            return d.table.cdf_strict(x);
          },
          [&](const detail::Empirical& d) { return d.table.cdf_strict(x); },
      },
      repr_);
}

double DemandDistribution::quantile(double p) const {
  check_probability(p);
  return std::visit(
      Overloaded{
          [&](const detail::DiscreteUniform& d) {
            const long long n = d.high - d.low + 1;
            const double nd = static_cast<double>(n);
            long long j = static_cast<long long>(std::ceil(p * nd));
            j = std::clamp(j, 1LL, n);
            // same division as cdf() so that cdf(quantile(p)) >= p holds
            while (j > 1 && static_cast<double>(j - 1) / nd >= p) {
              --j;
            }
            while (j < n && static_cast<double>(j) / nd < p) {
              ++j;
            }
            return static_cast<double>(d.low + j - 1);
          },
          [&](const detail::Exponential& d) {
            return p == 1.0 ? kInf : -d.mean * std::log1p(-p);
          },
          [&](const detail::Poisson& d) { return d.table.quantile(p); },
          [&](const detail::TruncatedNormal& d) {
            if (p <= normal_cdf(-d.mean / d.sd)) {
              return 0.0;
            }
            if (p == 1.0) {
              return kInf;
            }
            return d.mean + d.sd * normal_quantile(p);
          },
          [&](const detail::PointMassMixture& d) {
            return d.table.quantile(p);
          },
          [&](const detail::Empirical& d) { return d.table.quantile(p); },
      },
      repr_);
}

double DemandDistribution::mean() const {
  return std::visit(
      Overloaded{
          [](const detail::DiscreteUniform& d) {
            return 0.5 * static_cast<double>(d.low + d.high);
          },
          [](const detail::Exponential& d) { return d.mean; },
          [](const detail::Poisson& d) { return d.table.mean(); },
          [](const detail::TruncatedNormal& d) {
            const double z = d.mean / d.sd;
            return d.mean * normal_cdf(z) + d.sd * normal_pdf(z);
          },
          [](const detail::PointMassMixture& d) { return d.table.mean(); },
          [](const detail::Empirical& d) { return d.table.mean(); },
      },
      repr_);
}

double DemandDistribution::partial_first_moment(double x, Bound bound) const {
  if (x <= 0.0) {
    // atoms at 0 contribute nothing to E[D 1{...}]
    return 0.0;
  }
  return std::visit(
      Overloaded{
          [&](const detail::DiscreteUniform& d) {
            double top = bound == Bound::inclusive ? std::floor(x)
                                                   : std::ceil(x) - 1.0;
            top = std::min(top, static_cast<double>(d.high));
            const double low = static_cast<double>(d.low);
            if (top < low) {
              return 0.0;
            }
            const double count = top - low + 1.0;
            const double n = static_cast<double>(d.high - d.low + 1);
            return count * (low + top) / (2.0 * n);
          },
          [&](const detail::Exponential& d) {
            return -d.mean * std::expm1(-x / d.mean) -
                   x * std::exp(-x / d.mean);
          },
          [&](const detail::Poisson& d) {
            return d.table.first_moment(x, bound);
          },
          [&](const detail::TruncatedNormal& d) {
            const double z0 = -d.mean / d.sd;
            const double zx = (x - d.mean) / d.sd;
            return d.mean * (normal_cdf(zx) - normal_cdf(z0)) -
                   d.sd * (normal_pdf(zx) - normal_pdf(z0));
          },
          [&](const detail::PointMassMixture& d) {
            return d.table.first_moment(x, bound);
          },
          [&](const detail::Empirical& d) {
            return d.table.first_moment(x, bound);
          },
      },
      repr_);
}

double DemandDistribution::partial_expectation(double q) const {
  if (q <= 0.0) {
    return 0.0;
  }
  if (const auto* e = std::get_if<detail::Exponential>(&repr_)) {
    return q + e->mean * std::expm1(-q / e->mean);
  }
  return std::max(0.0, q * cdf(q) - partial_first_moment(q, Bound::inclusive));
}

double DemandDistribution::strict_partial_expectation(double q) const {
  if (q <= 0.0) {
    return 0.0;
  }
  if (is_continuous()) {
    return partial_expectation(q);
  }
  return std::max(0.0,
                  q * cdf_strict(q) - partial_first_moment(q, Bound::strict));
}

double DemandDistribution::draw(RngStream& rng) const {
  const double u = rng.uniform();
  if (const auto* e = std::get_if<detail::Exponential>(&repr_)) {
    return -e->mean * std::log1p(-u);
  }
  return quantile(u);
}

std::vector<double> DemandDistribution::sample(RngStream& rng,
                                               std::size_t n) const {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(draw(rng));
  }
  return out;
}

std::vector<Atom> DemandDistribution::atoms() const {
  const detail::AtomTable* table = nullptr;
  if (const auto* p = std::get_if<detail::PointMassMixture>(&repr_)) {
    table = &p->table;
  } else if (const auto* e = std::get_if<detail::Empirical>(&repr_)) {
    table = &e->table;
  } else if (const auto* po = std::get_if<detail::Poisson>(&repr_)) {
    table = &po->table;
  }
  std::vector<Atom> out;
  if (table != nullptr) {
    for (std::size_t i = 0; i < table->values.size(); ++i) {
      out.push_back({table->values[i], table->probs[i]});
    }
  }
  return out;
}

bool DemandDistribution::is_continuous() const {
  return std::holds_alternative<detail::Exponential>(repr_);
}

DemandDistribution::Parameters DemandDistribution::parameters() const {
  return std::visit(
      Overloaded{
          [](const detail::DiscreteUniform& d) {
            return Parameters{static_cast<double>(d.low),
                              static_cast<double>(d.high)};
          },
          [](const detail::Exponential& d) { return Parameters{d.mean, 0.0}; },
          [](const detail::Poisson& d) { return Parameters{d.mean, 0.0}; },
          [](const detail::TruncatedNormal& d) {
            return Parameters{d.mean, d.sd};
          },
          [](const detail::PointMassMixture&) { return Parameters{}; },
          [](const detail::Empirical& d) {
            return Parameters{static_cast<double>(d.sample_count), 0.0};
          },
      },
      repr_);
}

} // namespace censnv
