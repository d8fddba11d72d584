#include "censnv/newsvendor.hpp"

#include <cmath>
#include <stdexcept>

namespace censnv {

CostParameters::CostParameters(double underage, double overage)
    : b_(underage), h_(overage) {
  if (!(b_ > 0.0) || !(h_ > 0.0) || !std::isfinite(b_) ||
      !std::isfinite(h_)) {
    throw std::invalid_argument("cost parameters b and h must be positive");
  }
}

double cost(const DemandDistribution& d, const CostParameters& cp, double q) {
  if (q < 0.0) {
    throw std::invalid_argument("cost: order quantity must be >= 0");
  }
  return cp.b() * (d.mean() - q) +
         (cp.b() + cp.h()) * d.partial_expectation(q);
}

double optimal_quantity(const DemandDistribution& d, const CostParameters& cp) {
  return d.quantile(cp.rho());
}

double cost_difference(const DemandDistribution& d, const CostParameters& cp,
                       double q1, double q2) {
  if (q1 < 0.0 || q2 < 0.0) {
    throw std::invalid_argument("cost_difference: quantities must be >= 0");
  }
  return cp.b() * (q2 - q1) + (cp.b() + cp.h()) * (d.partial_expectation(q1) -
                                                   d.partial_expectation(q2));
}

double vanilla_regret(const DemandDistribution& d, const CostParameters& cp,
                      double q) {
  return cost_difference(d, cp, q, optimal_quantity(d, cp));
}

} // namespace censnv
