#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "censnv/evaluation.hpp"

namespace censnv {

namespace {

double between(RngStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

DemandDistribution random_distribution(RngStream& rng) {
  switch (rng.uniform_int(0, 4)) {
  case 0: {
    const long long low = rng.uniform_int(0, 20);
    return DemandDistribution::discrete_uniform(low,
                                                low + rng.uniform_int(10, 200));
  }
  case 1:
    return DemandDistribution::exponential(between(rng, 10.0, 150.0));
  case 2:
    return DemandDistribution::poisson(between(rng, 5.0, 120.0));
  case 3:
    return DemandDistribution::truncated_normal(between(rng, 20.0, 150.0),
                                                between(rng, 5.0, 60.0));
  default: {
    std::vector<Atom> atoms;
    const auto k = rng.uniform_int(2, 6);
    double total = 0.0;
    for (std::int64_t i = 0; i < k; ++i) {
      const double w = between(rng, 0.05, 1.0);
      atoms.push_back({std::round(between(rng, 0.0, 200.0) * 2.0) / 2.0, w});
      total += w;
    }
    for (Atom& a : atoms) {
      a.probability /= total;
    }
    // absorb rounding so the weights sum to one within 1e-12
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
      rest -= atoms[i].probability;
    }
    atoms.back().probability = rest;
    return DemandDistribution::point_mass_mixture(std::move(atoms));
  }
  }
}

} // namespace

Instance random_oracle_instance(RngStream& rng, Regime regime) {
  const DemandDistribution g = random_distribution(rng);
  const CostParameters cp(std::exp(between(rng, std::log(0.2), std::log(50.0))),
                          between(rng, 0.5, 3.0));
  const double rho = cp.rho();
  const double q_star = optimal_quantity(g, cp);
  double lambda = 0.0;
  if (regime == Regime::identifiable) {
    // G^-(lambda) >= G(quantile(u)) >= u >= rho
    const double u = rho + (1.0 - rho) * between(rng, 0.0, 0.95);
    lambda = g.quantile(std::max(u, rho)) + between(rng, 1e-3, 20.0);
  } else {
    // G^-(lambda) <= G^-(quantile(u)) <= u < rho
    const double u = rho * between(rng, 0.05, 0.95);
    lambda = g.quantile(u) * between(rng, 0.5, 1.0);
  }
  const double cap =
      std::max(q_star, lambda) * between(rng, 1.05, 2.5) + between(rng, 1e-3, 10.0);
  return Instance(g, lambda, cap, cp);
}

std::vector<OrderProbe> oracle_probes(const Instance& inst, RngStream& rng) {
  const double lam = inst.lambda();
  const double cap = inst.cap();
  std::vector<OrderProbe> probes;
  if (inst.regime() == Regime::identifiable) {
    probes.push_back({0.0, lam > 0.0 ? "id:below" : "id:above"});
    if (lam > 0.0) {
      probes.push_back({lam * rng.uniform(), "id:below"});
    }
    const double top = std::min(lam, cap);
    probes.push_back({top, top < lam ? "id:below" : "id:above"});
    if (lam < cap) {
      probes.push_back({between(rng, lam, cap), "id:above"});
    }
    probes.push_back({inst.q_star(), inst.q_star() < lam ? "id:below" : "id:above"});
    probes.push_back({cap, cap < lam ? "id:below" : "id:above"});
    return probes;
  }
  const double qd = q_dagger(inst);
  probes.push_back({0.0, lam > 0.0 ? "ui:below" : "ui:hedge"});
  if (lam > 0.0) {
    probes.push_back({lam * rng.uniform(), "ui:below"});
  }
  probes.push_back({lam, "ui:hedge"});
  probes.push_back({between(rng, lam, qd), "ui:hedge"});
  probes.push_back({qd, "ui:hedge"});
  if (qd < cap) {
    probes.push_back({between(rng, qd, cap), "ui:above"});
    probes.push_back({cap, "ui:above"});
  }
  return probes;
}

OracleCheckSummary run_oracle_check(std::uint64_t seed, std::size_t count,
                                    std::size_t grid_size) {
  OracleCheckSummary s;
  std::map<std::string, std::size_t> branches;
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(seed, i);
    const Regime regime =
        i % 2 == 0 ? Regime::identifiable : Regime::unidentifiable;
    const Instance inst = random_oracle_instance(rng, regime);
    (regime == Regime::identifiable ? s.identifiable : s.unidentifiable) += 1;
    bool ok = true;
    for (const OrderProbe& probe : oracle_probes(inst, rng)) {
      const double closed = worst_case_regret(inst, probe.q);
      const double oracle = worst_case_regret_oracle(inst, probe.q, grid_size);
      const double err = std::abs(closed - oracle);
      const double tol = std::max(1e-6, 1e-3 * std::abs(oracle));
      s.max_abs_error = std::max(s.max_abs_error, err);
      if (std::abs(oracle) > 1e-6) {
        s.max_rel_error = std::max(s.max_rel_error, err / std::abs(oracle));
      }
      ++s.evaluations;
      ++branches[probe.branch];
      if (!(err <= tol)) {
        ok = false;
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "instance %zu (%s, lambda=%.6g, M=%.6g, b=%.6g, h=%.6g) "
                      "q=%.6g: closed=%.10g oracle=%.10g",
                      i, inst.demand().describe().c_str(), inst.lambda(),
                      inst.cap(), inst.cost().b(), inst.cost().h(), probe.q,
                      closed, oracle);
        s.failures.emplace_back(buf);
      }
    }
    ++s.instances;
    s.passed += ok ? 1 : 0;
  }
  s.branch_counts.assign(branches.begin(), branches.end());
  return s;
}

} // namespace censnv
