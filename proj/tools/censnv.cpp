// Command-line front end. Exit codes: 0 success, 2 usage or validation
// error, 1 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "censnv/commands.hpp"

namespace {

using namespace censnv;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + out_path + "'");
  }
  out << text;
}

struct InstanceArgs {
  std::string dist;
  double b = 1.0;
  double h = 1.0;
  double lambda = 0.0;
  double cap = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dist", dist,
                    "demand: exponential:80, poisson:80, uniform:0:100, "
                    "normal:80:30, atoms:0=0.4,10=0.6, empirical:1,2,3 or a "
                    ".json file")
        ->required();
    cmd->add_option("--b", b, "underage cost")->default_val(1.0);
    cmd->add_option("--h", h, "overage cost")->default_val(1.0);
    cmd->add_option("--lambda", lambda, "observable boundary")->required();
    cmd->add_option("--cap", cap, "upper bound M on the optimal order")
        ->required();
  }

  Instance build() const {
    return Instance(resolve_distribution(dist), lambda, cap,
                    CostParameters(b, h));
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Censored newsvendor: minimax risk, policies and experiments"};
  // -h is taken by the overage cost
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  // risk
  InstanceArgs risk_args;
  auto* risk = app.add_subcommand("risk", "minimax risk of one instance (JSON)");
  risk_args.attach(risk);

  // regret-curve
  InstanceArgs curve_args;
  std::size_t grid = 201;
  auto* curve =
      app.add_subcommand("regret-curve", "worst-case regret over [0, M] (CSV)");
  curve_args.attach(curve);
  curve->add_option("--grid", grid, "number of grid orders")->default_val(201);
  curve->add_option("--out", out_path, "output file (default stdout)");

  // decide
  std::string dataset_path;
  std::string policy = "rcn";
  double delta = kDefaultConfidence;
  std::optional<double> decide_cap;
  auto* decide = app.add_subcommand("decide", "run a policy on a dataset (JSON)");
  decide->add_option("dataset", dataset_path, "dataset JSON file")->required();
  decide->add_option("--policy", policy,
                     "rcn, rcn_plus, naive_saa, subsample_saa, kaplan_meier, "
                     "true_saa")
      ->default_val("rcn");
  decide->add_option("--delta", delta, "confidence parameter")
      ->default_val(kDefaultConfidence);
  decide->add_option("--cap", decide_cap, "override the file's cap M");

  // simulate
  std::string config_path;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate =
      app.add_subcommand("simulate", "replicated experiment sweep (CSV)");
  simulate->add_option("config", config_path, "experiment config JSON")
      ->required();
  simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--jobs", jobs, "worker threads")->default_val(1);
  simulate->add_option("--out", out_path, "output file (overrides config)");

  // ingest
  IngestOptions ingest_opts;
  double ingest_b = 1.0;
  double ingest_h = 1.0;
  std::optional<double> ingest_cap;
  std::string dist_out;
  auto* ingest = app.add_subcommand(
      "ingest", "sales CSV to a censored dataset JSON");
  ingest->add_option("csv", ingest_opts.path, "sales CSV file")->required();
  ingest->add_option("--category", ingest_opts.csv.category)->required();
  ingest->add_option("--date-column", ingest_opts.csv.date_column)
      ->default_val("order_date");
  ingest->add_option("--category-column", ingest_opts.csv.category_column)
      ->default_val("category");
  ingest->add_option("--quantity-column", ingest_opts.csv.quantity_column)
      ->default_val("quantity");
  ingest->add_option("--date-format", ingest_opts.csv.date_format)
      ->default_val("%Y-%m-%d");
  ingest->add_option("--holiday", ingest_opts.csv.holidays,
                     "date to exclude (repeatable)");
  ingest->add_option("--from", ingest_opts.csv.date_from);
  ingest->add_option("--to", ingest_opts.csv.date_to);
  ingest->add_option("--sample-count", ingest_opts.csv.sample_count,
                     "daily totals drawn without replacement (0 = all)")
      ->default_val(0);
  ingest->add_option("--b", ingest_b)->default_val(1.0);
  ingest->add_option("--h", ingest_h)->default_val(1.0);
  ingest->add_option("--lambda", ingest_opts.lambda)->required();
  ingest->add_option("--cap", ingest_cap, "default: largest daily demand");
  ingest->add_option("--groups", ingest_opts.num_groups)->default_val(2);
  ingest->add_option("--n", ingest_opts.samples_per_group)->default_val(100);
  ingest->add_option("--seed", seed)->default_val(0);
  ingest->add_option("--out", out_path, "dataset file (default stdout)");
  ingest->add_option("--distribution-out", dist_out,
                     "also write the empirical distribution JSON");

  // lower-bound
  std::string lb_regime = "all";
  double lb_b = 1.0;
  double lb_h = 1.0;
  double lb_lambda = 1.0;
  double lb_cap = 2.0;
  std::size_t lb_n = 1;
  auto* lb = app.add_subcommand("lower-bound", "hard-instance lower bounds (JSON)");
  lb->add_option("--regime", lb_regime, "id, ke, ui or all")->default_val("all");
  lb->add_option("--b", lb_b)->default_val(1.0);
  lb->add_option("--h", lb_h)->default_val(1.0);
  lb->add_option("--lambda", lb_lambda)->required();
  lb->add_option("--cap", lb_cap)->default_val(2.0);
  lb->add_option("--n", lb_n, "samples per group")->default_val(1);

  // sample-complexity
  double sc_b = 1.0;
  double sc_h = 1.0;
  double sc_lambda = 0.0;
  double sc_cap = 0.0;
  double sc_eps = 0.0;
  double sc_delta = kDefaultConfidence;
  auto* sc = app.add_subcommand("sample-complexity",
                                "samples per group for a target excess (JSON)");
  sc->add_option("--b", sc_b)->default_val(1.0);
  sc->add_option("--h", sc_h)->default_val(1.0);
  sc->add_option("--lambda", sc_lambda)->required();
  sc->add_option("--cap", sc_cap)->required();
  sc->add_option("--epsilon", sc_eps)->required();
  sc->add_option("--delta", sc_delta)->default_val(kDefaultConfidence);

  // oracle-check
  std::size_t oc_count = 200;
  std::size_t oc_grid = 10000;
  auto* oc = app.add_subcommand(
      "oracle-check", "closed-form regret against the brute-force oracle");
  oc->add_option("--instances", oc_count)->default_val(200);
  oc->add_option("--grid", oc_grid, "p-grid size")->default_val(10000);
  oc->add_option("--seed", seed)->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*risk) {
    emit(cmd_risk(risk_args.build()).dump(2) + "\n", "");
  } else if (*curve) {
    emit(cmd_regret_curve(curve_args.build(), grid), out_path);
  } else if (*decide) {
    const DatasetFile file = read_dataset_file(dataset_path);
    emit(cmd_decide(file, policy, delta, decide_cap).dump(2) + "\n", "");
  } else if (*simulate) {
    ExperimentConfig cfg = read_experiment_config(config_path);
    if (sim_seed) {
      cfg.experiment.seed = *sim_seed;
    }
    if (out_path.empty() && cfg.output) {
      out_path = *cfg.output;
    }
    emit(cmd_simulate(cfg, jobs), out_path);
  } else if (*ingest) {
    ingest_opts.cost = CostParameters(ingest_b, ingest_h);
    ingest_opts.cap = ingest_cap;
    ingest_opts.seed = seed;
    ingest_opts.csv.seed = seed;
    if (!dist_out.empty()) {
      emit(distribution_to_json(ingest_sales_csv(ingest_opts.path,
                                                 ingest_opts.csv))
                   .dump(2) +
               "\n",
           dist_out);
    }
    emit(dataset_to_json(cmd_ingest(ingest_opts)).dump(2) + "\n", out_path);
  } else if (*lb) {
    emit(cmd_lower_bound(lb_regime, CostParameters(lb_b, lb_h), lb_lambda,
                         lb_cap, lb_n)
                 .dump(2) +
             "\n",
         "");
  } else if (*sc) {
    emit(cmd_sample_complexity(CostParameters(sc_b, sc_h), sc_lambda, sc_cap,
                               sc_eps, sc_delta)
                 .dump(2) +
             "\n",
         "");
  } else if (*oc) {
    const OracleCheckSummary s = run_oracle_check(seed, oc_count, oc_grid);
    emit(format_oracle_summary(s), "");
    return s.passed == s.instances ? 0 : 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
