#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "censnv/distributions.hpp"
#include "censnv/newsvendor.hpp"

namespace censnv {

enum class Regime { identifiable, unidentifiable };

std::string to_string(Regime regime);

/// True demand G, observable boundary lambda, cap M on the optimal order and
/// the cost parameters. G^-(lambda) and q*_G are evaluated once.
class Instance {
public:
  Instance(DemandDistribution demand, double lambda, double cap,
           CostParameters cost);

  const DemandDistribution& demand() const { return demand_; }
  double lambda() const { return lambda_; }
  double cap() const { return cap_; }
  const CostParameters& cost() const { return cost_; }

  /// G^-(lambda) = Pr(D < lambda).
  double g_minus() const { return g_minus_; }
  double q_star() const { return q_star_; }
  /// Ties G^-(lambda) == rho count as identifiable.
  Regime regime() const {
    return g_minus_ >= cost_.rho() ? Regime::identifiable
                                   : Regime::unidentifiable;
  }

private:
  DemandDistribution demand_;
  double lambda_;
  double cap_;
  CostParameters cost_;
  double g_minus_;
  double q_star_;
};

struct MinimaxSolution {
  Regime regime;
  double q_delta;
  double delta;
};

/// Minimax-optimal order in the unidentifiable regime, between lambda and M.
double q_dagger(const Instance& inst);

/// Closed-form minimax risk and the order that attains it.
MinimaxSolution minimax_risk(const Instance& inst);

/// sup over the ambiguity set of C_F(q) - C_F(q*_F), for q in [0, M].
double worst_case_regret(const Instance& inst, double q);

/// Member F_p of the two-atom family: G below lambda, mass p at lambda and
/// the remainder at M.
class RestrictedFamilyMember {
public:
  RestrictedFamilyMember(const Instance& inst, double p);

  double p() const { return p_; }
  double cdf(double x) const;
  double total_mass() const;
  double mean() const;
  /// E_F[(q - D) 1{D <= q}].
  double partial_expectation(double q) const;
  double cost(double q) const;
  /// q*_F from the three-way case split on G^-(lambda) + p against rho.
  double optimal_quantity() const;

private:
  const Instance* inst_;
  double p_;
  double mass_at_cap_;
  double first_moment_below_; // E_G[D 1{D < lambda}]
};

/// Brute-force worst-case regret: maximum of C_F(q) - C_F(q*_F) over F_p on a
/// uniform p-grid plus the p values bracketing G^-(lambda) + p = rho.
double worst_case_regret_oracle(const Instance& inst, double q,
                                std::size_t grid_size);

enum class HardRegime { strictly_identifiable, knife_edge, strictly_unidentifiable };

std::string to_string(HardRegime regime);
HardRegime parse_hard_regime(const std::string& name);

/// Two-point distributions used in the lower-bound construction.
struct HardInstancePair {
  HardRegime regime;
  DemandDistribution g0;
  DemandDistribution g1;
  double lower_bound = 0.0;
  double delta0_ui = 0.0;
  double delta1_ui = 0.0;
  double delta_ke = 0.0;
  double delta_id = 0.0;
  double atom_h = 0.0; // H, identifiable regime only
  /// Separation delta for which Regret(q) - Delta >= (b+h) delta |q - q^Delta|.
  double separation = 0.0;
};

HardInstancePair hard_instances(HardRegime regime, const CostParameters& cp,
                                double lambda, double cap, std::size_t n);

double lower_bound(HardRegime regime, const CostParameters& cp, double lambda,
                   double cap, std::size_t n);

/// Smallest N with worst-case regret within Delta + epsilon w.p. 1 - 2 delta.
std::uint64_t sample_complexity(const CostParameters& cp, double lambda,
                                double cap, double epsilon, double delta);

} // namespace censnv
