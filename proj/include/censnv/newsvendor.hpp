#pragma once

#include "censnv/distributions.hpp"

namespace censnv {

/// Per-unit underage cost b and overage cost h.
class CostParameters {
public:
  CostParameters(double underage, double overage);

  double b() const { return b_; }
  double h() const { return h_; }
  /// Critical ratio b / (b + h).
  double rho() const { return b_ / (b_ + h_); }

private:
  double b_;
  double h_;
};

// Expected cost E[b (D - q)^+ + h (q - D)^+], evaluated as
// b (E[D] - q) + (b + h) E[(q - D) 1{D <= q}].
double cost(const DemandDistribution& d, const CostParameters& cp, double q);

/// rho-th quantile of the demand distribution.
double optimal_quantity(const DemandDistribution& d, const CostParameters& cp);

/// cost(q1) - cost(q2) through the partial-expectation identity.
double cost_difference(const DemandDistribution& d, const CostParameters& cp,
                       double q1, double q2);

double vanilla_regret(const DemandDistribution& d, const CostParameters& cp,
                      double q);

} // namespace censnv
