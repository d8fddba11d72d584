#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "censnv/commands.hpp"
#include "censnv/data.hpp"
#include "censnv/evaluation.hpp"
#include "censnv/minimax.hpp"
#include "censnv/newsvendor.hpp"
#include "censnv/policies.hpp"

namespace py = pybind11;
using namespace censnv;

PYBIND11_MODULE(_censnv, m) {
  m.doc() = "Censored newsvendor: minimax risk, RCN policies and baselines";

  py::register_exception<std::invalid_argument>(m, "InvalidArgument",
                                                PyExc_ValueError);

  py::class_<DemandDistribution>(m, "DemandDistribution")
      .def_static("discrete_uniform", &DemandDistribution::discrete_uniform,
                  py::arg("low"), py::arg("high"))
      .def_static("exponential", &DemandDistribution::exponential,
                  py::arg("mean"))
      .def_static("poisson", &DemandDistribution::poisson, py::arg("mean"))
      .def_static("truncated_normal", &DemandDistribution::truncated_normal,
                  py::arg("mean"), py::arg("sd"))
      .def_static(
          "point_mass_mixture",
          [](const std::vector<std::pair<double, double>>& atoms) {
            std::vector<Atom> xs;
            for (const auto& [v, p] : atoms) {
              xs.push_back({v, p});
            }
            return DemandDistribution::point_mass_mixture(std::move(xs));
          },
          py::arg("atoms"))
      .def_static(
          "empirical",
          [](const std::vector<double>& samples) {
            return empirical_from_samples(samples);
          },
          py::arg("samples"))
      .def_static("parse", &parse_distribution_spec, py::arg("spec"))
      .def("cdf", &DemandDistribution::cdf, py::arg("x"))
      .def("cdf_strict", &DemandDistribution::cdf_strict, py::arg("x"))
      .def("quantile", &DemandDistribution::quantile, py::arg("p"))
      .def("mean", &DemandDistribution::mean)
      .def("partial_expectation", &DemandDistribution::partial_expectation,
           py::arg("q"))
      .def("__repr__", &DemandDistribution::describe);

  py::class_<CostParameters>(m, "CostParameters")
      .def(py::init<double, double>(), py::arg("b"), py::arg("h"))
      .def_property_readonly("b", &CostParameters::b)
      .def_property_readonly("h", &CostParameters::h)
      .def_property_readonly("rho", &CostParameters::rho);

  m.def("cost", &cost, py::arg("demand"), py::arg("cost"), py::arg("q"));
  m.def("optimal_quantity", &optimal_quantity, py::arg("demand"),
        py::arg("cost"));
  m.def("vanilla_regret", &vanilla_regret, py::arg("demand"), py::arg("cost"),
        py::arg("q"));

  py::enum_<Regime>(m, "Regime")
      .value("identifiable", Regime::identifiable)
      .value("unidentifiable", Regime::unidentifiable);

  py::class_<Instance>(m, "Instance")
      .def(py::init<DemandDistribution, double, double, CostParameters>(),
           py::arg("demand"), py::arg("lam"), py::arg("cap"), py::arg("cost"))
      .def_property_readonly("lam", &Instance::lambda)
      .def_property_readonly("cap", &Instance::cap)
      .def_property_readonly("g_minus", &Instance::g_minus)
      .def_property_readonly("q_star", &Instance::q_star)
      .def_property_readonly("regime", &Instance::regime);

  py::class_<MinimaxSolution>(m, "MinimaxSolution")
      .def_readonly("regime", &MinimaxSolution::regime)
      .def_readonly("q_delta", &MinimaxSolution::q_delta)
      .def_readonly("delta", &MinimaxSolution::delta);

  m.def("minimax_risk", &minimax_risk, py::arg("instance"));
  m.def("q_dagger", &q_dagger, py::arg("instance"));
  m.def("worst_case_regret", &worst_case_regret, py::arg("instance"),
        py::arg("q"));
  m.def("worst_case_regret_oracle", &worst_case_regret_oracle,
        py::arg("instance"), py::arg("q"), py::arg("grid_size") = 10000);
  m.def(
      "lower_bound",
      [](const std::string& regime, const CostParameters& cp, double lam,
         double cap, std::size_t n) {
        return lower_bound(parse_hard_regime(regime), cp, lam, cap, n);
      },
      py::arg("regime"), py::arg("cost"), py::arg("lam"), py::arg("cap"),
      py::arg("n"));
  m.def("sample_complexity", &sample_complexity, py::arg("cost"),
        py::arg("lam"), py::arg("cap"), py::arg("epsilon"),
        py::arg("delta") = kDefaultConfidence);

  py::class_<SalesGroup>(m, "SalesGroup")
      .def(py::init<double, std::vector<double>>(), py::arg("order_quantity"),
           py::arg("sales"))
      .def_readonly("order_quantity", &SalesGroup::order_quantity)
      .def_readonly("sales", &SalesGroup::sales);

  py::class_<CensoredDataset>(m, "CensoredDataset")
      .def(py::init<std::vector<SalesGroup>>(), py::arg("groups"))
      .def_property_readonly("groups", &CensoredDataset::groups)
      .def_property_readonly("boundary", &CensoredDataset::boundary);

  py::class_<PolicyDecision>(m, "PolicyDecision")
      .def_readonly("policy", &PolicyDecision::policy)
      .def_readonly("q", &PolicyDecision::q)
      .def_property_readonly("branch",
                             [](const PolicyDecision& d) -> py::object {
                               if (!d.branch) {
                                 return py::none();
                               }
                               return py::str(to_string(*d.branch));
                             })
      .def_readonly("g_minus_hat", &PolicyDecision::g_minus_hat)
      .def_readonly("zeta", &PolicyDecision::zeta)
      .def_readonly("likely_identifiable_groups",
                    &PolicyDecision::likely_identifiable_groups);

  m.def("rcn", &rcn, py::arg("dataset"), py::arg("cost"), py::arg("cap"),
        py::arg("delta") = kDefaultConfidence);
  m.def("rcn_plus", &rcn_plus, py::arg("dataset"), py::arg("cost"),
        py::arg("cap"), py::arg("delta") = kDefaultConfidence);
  m.def("naive_saa", &naive_saa, py::arg("dataset"), py::arg("rho"));
  m.def("subsample_saa", &subsample_saa, py::arg("dataset"), py::arg("rho"));
  m.def("kaplan_meier", &kaplan_meier, py::arg("dataset"), py::arg("rho"));
  m.def(
      "true_saa",
      [](const std::vector<std::vector<double>>& demands, double rho) {
        return true_saa(demands, rho);
      },
      py::arg("demands"), py::arg("rho"));

  m.def(
      "censor",
      [](const std::vector<double>& demands, double q_off) {
        return censor(demands, q_off);
      },
      py::arg("demands"), py::arg("q_off"));
  m.def(
      "generate_dataset",
      [](const DemandDistribution& d, double lam, std::size_t groups,
         std::size_t n, std::uint64_t seed) {
        GeneratedData g = generate_dataset(
            GenerationConfig{d, lam, groups, n, seed, false});
        return py::make_tuple(g.dataset, g.demands);
      },
      py::arg("demand"), py::arg("lam"), py::arg("groups") = 2,
      py::arg("n") = 100, py::arg("seed") = 0);

  m.def("relative_regret_ui", &relative_regret_ui, py::arg("regret"),
        py::arg("delta"));
  m.def("relative_regret_id", &relative_regret_id, py::arg("cost_q"),
        py::arg("cost_star"));
  m.def(
      "simulate",
      [](const std::string& config_path, std::size_t jobs) {
        py::gil_scoped_release release;
        return cmd_simulate(read_experiment_config(config_path), jobs);
      },
      py::arg("config_path"), py::arg("jobs") = 1,
      "Run an experiment config and return the report CSV.");
  m.def(
      "oracle_check",
      [](std::uint64_t seed, std::size_t count, std::size_t grid) {
        const OracleCheckSummary s = run_oracle_check(seed, count, grid);
        return py::make_tuple(s.passed, s.instances);
      },
      py::arg("seed") = 0, py::arg("count") = 200, py::arg("grid") = 10000);
}
