#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "censnv/rng.hpp"

namespace censnv {

enum class Family {
  discrete_uniform,
  exponential,
  poisson,
  truncated_normal,
  point_mass_mixture,
  empirical,
};

std::string to_string(Family family);

struct Atom {
  double value;
  double probability;
};

/// Whether a truncated expectation includes the atom at the threshold.
enum class Bound { inclusive, strict };

namespace detail {

// Finite-support distribution stored as sorted atoms with cumulative weights.
struct AtomTable {
  std::vector<double> values;
  std::vector<double> probs;
  std::vector<double> cum;       // P(D <= values[i])
  std::vector<double> cum_first; // E[D 1{D <= values[i]}]

  // weights may be counts or probabilities; they are normalised by their sum
  static AtomTable build(std::vector<double> values,
                         std::vector<double> weights);

  double cdf(double x) const;
  double cdf_strict(double x) const;
  double quantile(double p) const;
  double first_moment(double x, Bound bound) const;
  double mean() const;
};

struct DiscreteUniform {
  long long low;
  long long high;
};

struct Exponential {
  double mean;
};

struct Poisson {
  double mean;
  AtomTable table;
};

// D = max{0, X} with X ~ Normal(mean, sd^2).
struct TruncatedNormal {
  double mean;
  double sd;
};

struct PointMassMixture {
  AtomTable table;
};

struct Empirical {
  AtomTable table;
  std::size_t sample_count;
};

} // namespace detail

/// Nonnegative demand distribution G.
///
/// Every quantity the newsvendor and minimax formulas consume (CDF and its
/// left limit, quantile, mean and the truncated moments) is exposed here in
/// closed form or as an exact finite sum. Values are immutable once built.
class DemandDistribution {
public:
  static DemandDistribution discrete_uniform(long long low, long long high);
  static DemandDistribution exponential(double mean);
  static DemandDistribution poisson(double mean);
  static DemandDistribution truncated_normal(double mean, double sd);
  static DemandDistribution point_mass_mixture(std::vector<Atom> atoms);
  static DemandDistribution point_mass(double value);
  static DemandDistribution bernoulli(double p_one);
  /// Weighted sample values; weights need not be normalised.
  static DemandDistribution empirical(std::vector<double> values,
                                      std::vector<double> weights);

  Family family() const;
  std::string describe() const;

  /// Pr(D <= x).
  double cdf(double x) const;
  /// Pr(D < x), the left limit of the CDF.
  double cdf_strict(double x) const;
  /// inf{q : cdf(q) >= p} for p in (0, 1].
  double quantile(double p) const;
  double mean() const;

  /// E[D 1{D <= x}] (inclusive) or E[D 1{D < x}] (strict).
  double partial_first_moment(double x, Bound bound = Bound::inclusive) const;
  /// E[(q - D) 1{D <= q}].
  double partial_expectation(double q) const;
  /// E[(q - D) 1{D < q}].
  double strict_partial_expectation(double q) const;

  /// n i.i.d. draws by inverse-CDF transform.
  std::vector<double> sample(RngStream& rng, std::size_t n) const;
  double draw(RngStream& rng) const;

  /// Atoms for finite-support families; empty for the others.
  std::vector<Atom> atoms() const;
  bool is_continuous() const;

  /// Constructor arguments, for serialisation.
  struct Parameters {
    double a = 0.0;
    double b = 0.0;
  };
  Parameters parameters() const;

private:
  using Repr = std::variant<detail::DiscreteUniform, detail::Exponential,
                            detail::Poisson, detail::TruncatedNormal,
                            detail::PointMassMixture, detail::Empirical>;

  explicit DemandDistribution(Repr repr) : repr_(std::move(repr)) {}

  Repr repr_;
};

/// Uniform-weight empirical distribution of the given samples.
DemandDistribution empirical_from_samples(std::span<const double> xs);

/// Standard normal CDF and density.
double normal_cdf(double z);
double normal_pdf(double z);

} // namespace censnv
