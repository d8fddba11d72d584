#include "censnv/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace censnv {

std::string to_string(Regime regime) {
  return regime == Regime::identifiable ? "identifiable" : "unidentifiable";
}

Instance::Instance(DemandDistribution demand, double lambda, double cap,
                   CostParameters cost)
    : demand_(std::move(demand)), lambda_(lambda), cap_(cap), cost_(cost) {
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("instance: lambda must be finite and >= 0");
  }
  if (!std::isfinite(cap_) || cap_ < 0.0) {
    throw std::invalid_argument("instance: cap M must be finite and >= 0");
  }
  g_minus_ = demand_.cdf_strict(lambda_);
  q_star_ = optimal_quantity(demand_, cost_);
  if (!(q_star_ <= cap_ + 1e-9)) {
    throw std::invalid_argument(
        "instance: cap M is below the optimal order quantity");
  }
  if (regime() == Regime::unidentifiable && !(lambda_ < cap_)) {
    throw std::invalid_argument(
        "instance: unidentifiable instances need lambda < M");
  }
}

double q_dagger(const Instance& inst) {
  if (inst.regime() == Regime::identifiable) {
    throw std::invalid_argument(
        "q_dagger: instance is identifiable (G^-(lambda) >= rho)");
  }
  const double b = inst.cost().b();
  const double h = inst.cost().h();
  const double g = inst.g_minus();
  const double m = inst.cap();
  const double lam = inst.lambda();
  const double q = (b * m + h * lam - (b + h) * g * m) / ((b + h) * (1.0 - g));
  return std::clamp(q, lam, m);
}

MinimaxSolution minimax_risk(const Instance& inst) {
  if (inst.regime() == Regime::identifiable) {
    return {Regime::identifiable, inst.q_star(), 0.0};
  }
  const double b = inst.cost().b();
  const double h = inst.cost().h();
  const double g = inst.g_minus();
  const double delta = h * (b - (b + h) * g) * (inst.cap() - inst.lambda()) /
                       ((b + h) * (1.0 - g));
  return {Regime::unidentifiable, q_dagger(inst), std::max(0.0, delta)};
}

namespace {

double checked_order(const Instance& inst, double q, const char* who) {
  const double m = inst.cap();
  const double slack = 1e-12 * std::max(1.0, m);
  if (!(q >= -slack) || !(q <= m + slack)) {
    throw std::invalid_argument(std::string(who) +
                                ": order quantity must lie in [0, M]");
  }
  return std::clamp(q, 0.0, m);
}

} // namespace

double worst_case_regret(const Instance& inst, double q) {
  q = checked_order(inst, q, "worst_case_regret");
  const DemandDistribution& g = inst.demand();
  const double b = inst.cost().b();
  const double h = inst.cost().h();
  const double lam = inst.lambda();
  const double gm = inst.g_minus();

  if (inst.regime() == Regime::unidentifiable) {
    const double m = inst.cap();
    if (q < lam) {
      // E_G[(M - D) 1{D < lambda}]
      const double below =
          m * gm - g.partial_first_moment(lam, Bound::strict);
      return b * (m - q) + (b + h) * (g.partial_expectation(q) - below);
    }
    if (q <= q_dagger(inst)) {
      return (b - (b + h) * gm) * (m - q);
    }
    return h * (q - lam);
  }

  if (q < lam) {
    return vanilla_regret(g, inst.cost(), q);
  }
  const double qs = inst.q_star();
  return b * (qs - q) + (b + h) * ((q - lam) +
                                   g.strict_partial_expectation(lam) -
                                   g.partial_expectation(qs));
}

RestrictedFamilyMember::RestrictedFamilyMember(const Instance& inst, double p)
    : inst_(&inst), p_(p) {
  const double room = 1.0 - inst.g_minus();
  if (!(p >= 0.0) || p > room + 1e-15) {
    throw std::invalid_argument(
        "restricted family: p must lie in [0, 1 - G^-(lambda)]");
  }
  p_ = std::min(p, room);
  mass_at_cap_ = std::max(0.0, room - p_);
  first_moment_below_ =
      inst.demand().partial_first_moment(inst.lambda(), Bound::strict);
}

namespace {

// Upper atom; equals M whenever lambda <= M.
double upper_atom(const Instance& inst) {
  return std::max(inst.cap(), inst.lambda());
}

} // namespace

double RestrictedFamilyMember::cdf(double x) const {
  if (x < inst_->lambda()) {
    return inst_->demand().cdf(x);
  }
  if (x < upper_atom(*inst_)) {
    return inst_->g_minus() + p_;
  }
  return 1.0;
}

double RestrictedFamilyMember::total_mass() const {
  return inst_->g_minus() + p_ + mass_at_cap_;
}

double RestrictedFamilyMember::mean() const {
  return first_moment_below_ + p_ * inst_->lambda() +
         mass_at_cap_ * upper_atom(*inst_);
}

double RestrictedFamilyMember::partial_expectation(double q) const {
  const double lam = inst_->lambda();
  if (q < lam) {
    return inst_->demand().partial_expectation(q);
  }
  double pe = q * inst_->g_minus() - first_moment_below_;
  pe += p_ * (q - lam);
  const double top = upper_atom(*inst_);
  if (q >= top) {
    pe += mass_at_cap_ * (q - top);
  }
  return pe;
}

double RestrictedFamilyMember::cost(double q) const {
  const CostParameters& cp = inst_->cost();
  return cp.b() * (mean() - q) + (cp.b() + cp.h()) * partial_expectation(q);
}

double RestrictedFamilyMember::optimal_quantity() const {
  const double rho = inst_->cost().rho();
  const double gm = inst_->g_minus();
  if (gm >= rho) {
    return inst_->q_star();
  }
  // compare p against rho - G^- so the bracketing grid points stay exact
  if (p_ >= rho - gm) {
    return inst_->lambda();
  }
  return upper_atom(*inst_);
}

double worst_case_regret_oracle(const Instance& inst, double q,
                                std::size_t grid_size) {
  if (grid_size < 2) {
    throw std::invalid_argument("oracle: grid_size must be >= 2");
  }
  q = checked_order(inst, q, "worst_case_regret_oracle");
  const double room = 1.0 - inst.g_minus();
  std::vector<double> ps;
  ps.reserve(grid_size + 2);
  for (std::size_t i = 0; i < grid_size; ++i) {
    ps.push_back(room * static_cast<double>(i) /
                 static_cast<double>(grid_size - 1));
  }
  ps.back() = room;
  const double boundary = inst.cost().rho() - inst.g_minus();
  if (boundary > 0.0 && boundary <= room) {
    ps.push_back(boundary);
    ps.push_back(std::nextafter(boundary, 0.0));
  }

  double worst = -std::numeric_limits<double>::infinity();
  for (double p : ps) {
    const RestrictedFamilyMember f(inst, p);
    worst = std::max(worst, f.cost(q) - f.cost(f.optimal_quantity()));
  }
  return worst;
}

std::string to_string(HardRegime regime) {
  switch (regime) {
  case HardRegime::strictly_identifiable:
    return "id";
  case HardRegime::knife_edge:
    return "ke";
  case HardRegime::strictly_unidentifiable:
    return "ui";
  }
  return "unknown";
}

HardRegime parse_hard_regime(const std::string& name) {
  if (name == "id" || name == "strictly-identifiable") {
    return HardRegime::strictly_identifiable;
  }
  if (name == "ke" || name == "knife-edge") {
    return HardRegime::knife_edge;
  }
  if (name == "ui" || name == "strictly-unidentifiable") {
    return HardRegime::strictly_unidentifiable;
  }
  throw std::invalid_argument("unknown regime '" + name +
                              "' (expected id, ke or ui)");
}

namespace {

void check_lower_bound_args(double lambda, double cap, std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("sample size N must be >= 1");
  }
  if (!(lambda < cap)) {
    throw std::invalid_argument("lower bound requires lambda < M");
  }
}

double knife_edge_separation(double rho, std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::min({rho / 2.0, (1.0 - rho) / 2.0,
                   0.25 * std::sqrt((1.0 - rho) / nd)});
}

} // namespace

HardInstancePair hard_instances(HardRegime regime, const CostParameters& cp,
                                double lambda, double cap, std::size_t n) {
  check_lower_bound_args(lambda, cap, n);
  const double rho = cp.rho();
  const double nd = static_cast<double>(n);

  switch (regime) {
  case HardRegime::strictly_unidentifiable: {
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw std::invalid_argument("ui hard instances need lambda in (0, 1)");
    }
    if (!(3.0 * rho - 1.0 > 0.0)) {
      throw std::invalid_argument(
          "ui hard instances are unsupported for rho <= 1/3");
    }
    const double d0 = std::min(rho / 2.0, (1.0 - rho) / 2.0);
    const double d1 = std::min({rho / 4.0, (3.0 * rho - 1.0) / 4.0,
                                0.5 * std::sqrt((1.0 - rho) / nd)});
    HardInstancePair out{
        regime,
        DemandDistribution::bernoulli(1.0 - rho + d0),
        DemandDistribution::bernoulli(1.0 - rho + d0 + d1),
    };
    out.delta0_ui = d0;
    out.delta1_ui = d1;
    out.separation = d0;
    out.lower_bound = lower_bound(regime, cp, lambda, cap, n);
    return out;
  }
  case HardRegime::knife_edge: {
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw std::invalid_argument("ke hard instances need lambda in (0, 1)");
    }
    const double d = knife_edge_separation(rho, n);
    HardInstancePair out{
        regime,
        DemandDistribution::bernoulli(1.0 - rho + d),
        DemandDistribution::bernoulli(1.0 - rho - d),
    };
    out.delta_ke = d;
    out.separation = d;
    out.lower_bound = lower_bound(regime, cp, lambda, cap, n);
    return out;
  }
  case HardRegime::strictly_identifiable: {
    if (!(lambda > 0.0)) {
      throw std::invalid_argument("id hard instances need lambda > 0");
    }
    const double d = knife_edge_separation(rho, n);
    const double top = lambda / 2.0;
    HardInstancePair out{
        regime,
        DemandDistribution::point_mass_mixture(
            {{0.0, rho - d}, {top, 1.0 - rho + d}}),
        DemandDistribution::point_mass_mixture(
            {{0.0, rho + d}, {top, 1.0 - rho - d}}),
    };
    out.delta_id = d;
    out.atom_h = top;
    out.separation = d;
    out.lower_bound = lower_bound(regime, cp, lambda, cap, n);
    return out;
  }
  }
  throw std::invalid_argument("unknown regime");
}

double lower_bound(HardRegime regime, const CostParameters& cp, double lambda,
                   double cap, std::size_t n) {
  check_lower_bound_args(lambda, cap, n);
  const double rho = cp.rho();
  const double common = std::sqrt(1.0 - rho) * std::min(rho, 1.0 - rho) *
                        std::exp(-0.5) / std::sqrt(static_cast<double>(n));
  switch (regime) {
  case HardRegime::strictly_identifiable:
    return lambda * (cp.b() + cp.h()) * common / 64.0;
  case HardRegime::knife_edge:
    return lambda * (cp.b() + cp.h()) * common / 32.0;
  case HardRegime::strictly_unidentifiable:
    return cp.h() * (cap - lambda) * common *
           std::min(rho, 3.0 * rho - 1.0) / 64.0;
  }
  return 0.0;
}

std::uint64_t sample_complexity(const CostParameters& cp, double lambda,
                                double cap, double epsilon, double delta) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("sample_complexity: epsilon must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_complexity: delta must lie in (0, 1)");
  }
  const double b = cp.b();
  const double h = cp.h();
  const double ratio = std::max((b / h) * (b / h), 1.0);
  const double spread = std::max(lambda * lambda,
                                 ratio * (cap - lambda) * (cap - lambda));
  const double n = 2.0 * (b + h) * (b + h) * std::log(2.0 / delta) /
                   (epsilon * epsilon) * spread;
  // absorb last-ulp rounding so integral values are not bumped up by one
  return static_cast<std::uint64_t>(std::ceil(n * (1.0 - 1e-12)));
}

} // namespace censnv
