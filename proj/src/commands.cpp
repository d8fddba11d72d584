#include "censnv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "censnv/policies.hpp"

namespace censnv {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& key,
                  const std::string& where) {
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(where + ": '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& key,
                      const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw std::invalid_argument(where + ": '" + key +
                                "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

// A scalar is accepted wherever a list is expected.
std::vector<double> get_numbers(const json& j, const std::string& key,
                                const std::string& where) {
  const json& v = j.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  if (!v.is_array() || v.empty()) {
    throw std::invalid_argument(where + ": '" + key +
                                "' must be a number or a non-empty array");
  }
  for (const json& x : v) {
    if (!x.is_number()) {
      throw std::invalid_argument(where + ": '" + key + "' must hold numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& where) {
  if (!j.at(key).is_string()) {
    throw std::invalid_argument(where + ": '" + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SalesCsvOptions sales_options_from_json(const json& j, const std::string& where,
                                        std::uint64_t default_seed) {
  reject_unknown(j,
                 {"path", "category", "date_column", "category_column",
                  "quantity_column", "date_format", "holidays", "date_from",
                  "date_to", "sample_count", "seed"},
                 where);
  for (const char* key : {"path", "category"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(where + ": missing '" + key + "'");
    }
  }
  SalesCsvOptions o;
  o.category = get_string(j, "category", where);
  if (j.contains("date_column")) {
    o.date_column = get_string(j, "date_column", where);
  }
  if (j.contains("category_column")) {
    o.category_column = get_string(j, "category_column", where);
  }
  if (j.contains("quantity_column")) {
    o.quantity_column = get_string(j, "quantity_column", where);
  }
  if (j.contains("date_format")) {
    o.date_format = get_string(j, "date_format", where);
  }
  if (j.contains("holidays")) {
    for (const json& h : j.at("holidays")) {
      if (!h.is_string()) {
        throw std::invalid_argument(where + ": holidays must be date strings");
      }
      o.holidays.push_back(h.get<std::string>());
    }
  }
  if (j.contains("date_from")) {
    o.date_from = get_string(j, "date_from", where);
  }
  if (j.contains("date_to")) {
    o.date_to = get_string(j, "date_to", where);
  }
  if (j.contains("sample_count")) {
    o.sample_count = get_count(j, "sample_count", where);
  }
  o.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
  return o;
}

json nullable(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

} // namespace

ExperimentConfig experiment_config_from_json(const json& j,
                                             const std::string& base_dir) {
  const std::string where = "config";
  reject_unknown(j,
                 {"distribution", "sales_csv", "h", "b", "lambda",
                  "lambda_fractions", "reference_rho", "n", "replications",
                  "delta", "cap", "seed", "groups", "integer_order_quantities",
                  "uncensored", "policies", "output"},
                 where);
  for (const char* key : {"b", "n", "cap"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(where + ": missing '" + key + "'");
    }
  }
  ExperimentConfig cfg;
  ExperimentTemplate& t = cfg.experiment;
  t.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;

  const bool has_dist = j.contains("distribution");
  const bool has_csv = j.contains("sales_csv");
  if (has_dist == has_csv) {
    throw std::invalid_argument(
        where + ": give exactly one of 'distribution' or 'sales_csv'");
  }
  if (has_dist) {
    const json& d = j.at("distribution");
    t.distribution = d.is_string() ? parse_distribution_spec(d.get<std::string>())
                                   : distribution_from_json(d);
  } else {
    SalesCsvOptions o = sales_options_from_json(j.at("sales_csv"),
                                                where + ".sales_csv", t.seed);
    std::filesystem::path p = get_string(j.at("sales_csv"), "path", where);
    if (p.is_relative()) {
      p = std::filesystem::path(base_dir) / p;
    }
    t.distribution = ingest_sales_csv(p.string(), o);
  }

  t.h = j.contains("h") ? get_number(j, "h", where) : 1.0;
  t.b_values = get_numbers(j, "b", where);
  const bool has_lambda = j.contains("lambda");
  const bool has_fractions = j.contains("lambda_fractions");
  if (has_lambda == has_fractions) {
    throw std::invalid_argument(
        where + ": give exactly one of 'lambda' or 'lambda_fractions'");
  }
  if (has_lambda) {
    t.lambdas = get_numbers(j, "lambda", where);
  } else {
    t.lambda_fractions = get_numbers(j, "lambda_fractions", where);
  }
  if (j.contains("reference_rho")) {
    t.reference_rho = get_number(j, "reference_rho", where);
    if (!(t.reference_rho > 0.0 && t.reference_rho < 1.0)) {
      throw std::invalid_argument(where + ": reference_rho must lie in (0, 1)");
    }
  }
  for (double n : get_numbers(j, "n", where)) {
    if (!(n >= 1.0) || n != std::floor(n)) {
      throw std::invalid_argument(where + ": 'n' values must be positive integers");
    }
    t.n_values.push_back(static_cast<std::size_t>(n));
  }
  if (j.contains("replications")) {
    t.replications = get_count(j, "replications", where);
  }
  if (j.contains("delta")) {
    t.delta = get_number(j, "delta", where);
  }
  t.cap = get_number(j, "cap", where);
  if (j.contains("groups")) {
    t.num_groups = get_count(j, "groups", where);
  }
  if (j.contains("integer_order_quantities")) {
    t.integer_order_quantities = j.at("integer_order_quantities").get<bool>();
  }
  if (j.contains("uncensored")) {
    t.provide_uncensored = j.at("uncensored").get<bool>();
  }
  if (j.contains("policies")) {
    for (const json& p : j.at("policies")) {
      if (!p.is_string()) {
        throw std::invalid_argument(where + ": policies must be names");
      }
      t.policies.push_back(parse_policy(p.get<std::string>()));
    }
  } else {
    t.policies = all_policies();
  }
  if (j.contains("output")) {
    cfg.output = get_string(j, "output", where);
  }

  // validate before any computation
  for (double b : t.b_values) {
    CostParameters check(b, t.h);
    (void)check;
  }
  if (t.replications == 0) {
    throw std::invalid_argument(where + ": replications must be >= 1");
  }
  if (t.num_groups == 0) {
    throw std::invalid_argument(where + ": groups must be >= 1");
  }
  if (!(t.delta > 0.0 && t.delta < 1.0)) {
    throw std::invalid_argument(where + ": delta must lie in (0, 1)");
  }
  if (!(t.cap > 0.0) || !std::isfinite(t.cap)) {
    throw std::invalid_argument(where + ": cap must be positive and finite");
  }
  for (const GridPoint& gp : expand_grid(t)) {
    if (!(gp.lambda > 0.0) || !std::isfinite(gp.lambda)) {
      throw std::invalid_argument(where + ": every lambda must be positive");
    }
  }
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  const json j = parse_json_text(read_text(path), path);
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return experiment_config_from_json(j, parent.empty() ? "." : parent.string());
}

DemandDistribution resolve_distribution(const std::string& arg) {
  if (arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0) {
    return distribution_from_json(parse_json_text(read_text(arg), arg));
  }
  return parse_distribution_spec(arg);
}

json cmd_risk(const Instance& inst) {
  const MinimaxSolution sol = minimax_risk(inst);
  json out;
  out["distribution"] = inst.demand().describe();
  out["b"] = inst.cost().b();
  out["h"] = inst.cost().h();
  out["rho"] = inst.cost().rho();
  out["lambda"] = inst.lambda();
  out["cap"] = inst.cap();
  out["regime"] = to_string(sol.regime);
  out["g_minus"] = inst.g_minus();
  out["q_star"] = inst.q_star();
  out["q_delta"] = sol.q_delta;
  out["delta"] = sol.delta;
  out["q_dagger"] =
      sol.regime == Regime::unidentifiable ? json(q_dagger(inst)) : json(nullptr);
  return out;
}

std::string cmd_regret_curve(const Instance& inst, std::size_t points) {
  if (points < 2) {
    throw std::invalid_argument("regret curve: grid needs at least 2 points");
  }
  std::vector<double> qs;
  for (std::size_t i = 0; i < points; ++i) {
    qs.push_back(inst.cap() * static_cast<double>(i) /
                 static_cast<double>(points - 1));
  }
  qs.back() = inst.cap();
  const double qd = minimax_risk(inst).q_delta;
  if (qd <= inst.cap()) {
    qs.push_back(qd);
  }
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::string out = "q,regret\n";
  char buf[64];
  for (double q : qs) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", q,
                  worst_case_regret(inst, q));
    out += buf;
  }
  return out;
}

json cmd_decide(const DatasetFile& file, const std::string& policy,
                double delta, std::optional<double> cap) {
  const PolicyKind kind = parse_policy(policy);
  const double m = cap.value_or(file.cap);
  const double rho = file.cost.rho();
  json out;
  out["policy"] = to_string(kind);
  out["lambda"] = file.dataset.boundary();
  switch (kind) {
  case PolicyKind::rcn:
  case PolicyKind::rcn_plus: {
    const PolicyDecision d = kind == PolicyKind::rcn
                                 ? rcn(file.dataset, file.cost, m, delta)
                                 : rcn_plus(file.dataset, file.cost, m, delta);
    out["q"] = d.q;
    out["branch"] = d.branch ? json(to_string(*d.branch)) : json(nullptr);
    out["g_minus_hat"] = nullable(d.g_minus_hat);
    out["zeta"] = nullable(d.zeta);
    if (kind == PolicyKind::rcn_plus) {
      out["likely_identifiable_groups"] = d.likely_identifiable_groups;
    }
    break;
  }
  case PolicyKind::naive_saa:
    out["q"] = naive_saa(file.dataset, rho);
    break;
  case PolicyKind::subsample_saa:
    out["q"] = subsample_saa(file.dataset, rho);
    break;
  case PolicyKind::kaplan_meier:
    out["q"] = kaplan_meier(file.dataset, rho);
    break;
  case PolicyKind::true_saa:
    if (!file.uncensored) {
      throw std::invalid_argument(
          "true_saa needs the 'uncensored' demands in the dataset file");
    }
    out["q"] = true_saa(*file.uncensored, rho);
    break;
  case PolicyKind::censored_saa:
    throw std::runtime_error("censored_saa is not implemented");
  }
  return out;
}

std::string cmd_simulate(const ExperimentConfig& config, std::size_t jobs) {
  return reports_to_csv(run_replications(config.experiment, jobs));
}

DatasetFile cmd_ingest(const IngestOptions& options) {
  const DemandDistribution g = ingest_sales_csv(options.path, options.csv);
  double top = 0.0;
  for (const Atom& a : g.atoms()) {
    top = std::max(top, a.value);
  }
  const double cap = options.cap.value_or(top);
  if (!(cap > 0.0) || !std::isfinite(cap)) {
    throw std::invalid_argument("ingest: cap must be positive and finite");
  }
  GenerationConfig cfg{g, options.lambda, options.num_groups,
                       options.samples_per_group, options.seed, true};
  GeneratedData data = generate_dataset(cfg);
  return {options.cost, cap, std::move(data.dataset), std::move(data.demands)};
}

json cmd_lower_bound(const std::string& regime, const CostParameters& cp,
                     double lambda, double cap, std::size_t n) {
  auto one = [&](HardRegime r) {
    auto atoms = [](const DemandDistribution& d) {
      json a = json::array();
      for (const Atom& x : d.atoms()) {
        a.push_back({x.value, x.probability});
      }
      return a;
    };
    json out;
    out["regime"] = to_string(r);
    out["lower_bound"] = lower_bound(r, cp, lambda, cap, n);
    // the bound is a formula; the two-point construction has a narrower domain
    try {
      const HardInstancePair pair = hard_instances(r, cp, lambda, cap, n);
      out["separation"] = pair.separation;
      out["g0"] = atoms(pair.g0);
      out["g1"] = atoms(pair.g1);
    } catch (const std::invalid_argument& e) {
      out["separation"] = nullptr;
      out["g0"] = nullptr;
      out["g1"] = nullptr;
      out["construction_error"] = e.what();
    }
    return out;
  };
  if (regime == "all") {
    json out = json::array();
    for (HardRegime r : {HardRegime::strictly_identifiable,
                         HardRegime::knife_edge,
                         HardRegime::strictly_unidentifiable}) {
      out.push_back(one(r));
    }
    return out;
  }
  return one(parse_hard_regime(regime));
}

json cmd_sample_complexity(const CostParameters& cp, double lambda, double cap,
                           double epsilon, double delta) {
  json out;
  out["epsilon"] = epsilon;
  out["delta"] = delta;
  out["n"] = sample_complexity(cp, lambda, cap, epsilon, delta);
  return out;
}

std::string format_oracle_summary(const OracleCheckSummary& s) {
  std::string out = std::to_string(s.passed) + "/" +
                    std::to_string(s.instances) +
                    " instances within tolerance\n";
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "regimes: %zu identifiable, %zu unidentifiable; %zu orders; "
                "max abs error %.3g; max rel error %.3g\n",
                s.identifiable, s.unidentifiable, s.evaluations,
                s.max_abs_error, s.max_rel_error);
  out += buf;
  for (const auto& [branch, count] : s.branch_counts) {
    out += "  " + branch + ": " + std::to_string(count) + "\n";
  }
  for (const std::string& f : s.failures) {
    out += "FAIL " + f + "\n";
  }
  return out;
}

} // namespace censnv
