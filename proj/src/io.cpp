#include "censnv/io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace censnv {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + ": expected a JSON object");
  }
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      throw std::invalid_argument(where + ": unknown key '" + item.key() +
                                  "'");
    }
  }
}

double number_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw std::invalid_argument(where + ": missing numeric field '" + key +
                                "'");
  }
  return j.at(key).get<double>();
}

std::vector<double> number_array(const json& j, const char* key,
                                 const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(where + ": missing array field '" + key + "'");
  }
  std::vector<double> out;
  for (const json& v : j.at(key)) {
    if (!v.is_number()) {
      throw std::invalid_argument(where + ": '" + key +
                                  "' must contain numbers only");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

} // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
}

DatasetFile dataset_from_json(const json& j) {
  require_keys(j, {"cost", "cap", "groups", "uncensored"}, "dataset");
  if (!j.contains("cost")) {
    throw std::invalid_argument("dataset: missing 'cost'");
  }
  const json& c = j.at("cost");
  require_keys(c, {"b", "h"}, "dataset.cost");
  CostParameters cost(number_field(c, "b", "dataset.cost"),
                      number_field(c, "h", "dataset.cost"));
  const double cap = number_field(j, "cap", "dataset");

  if (!j.contains("groups") || !j.at("groups").is_array()) {
    throw std::invalid_argument("dataset: missing 'groups' array");
  }
  std::vector<SalesGroup> groups;
  for (const json& g : j.at("groups")) {
    require_keys(g, {"order_quantity", "sales"}, "dataset.groups[]");
    groups.push_back({number_field(g, "order_quantity", "dataset.groups[]"),
                      number_array(g, "sales", "dataset.groups[]")});
  }
  CensoredDataset ds(std::move(groups));

  std::optional<std::vector<std::vector<double>>> uncensored;
  if (j.contains("uncensored") && !j.at("uncensored").is_null()) {
    const json& u = j.at("uncensored");
    if (!u.is_array() || u.size() != ds.num_groups()) {
      throw std::invalid_argument(
          "dataset: 'uncensored' must mirror 'groups' one-to-one");
    }
    uncensored.emplace();
    for (std::size_t k = 0; k < u.size(); ++k) {
      require_keys(u[k], {"order_quantity", "demands"},
                   "dataset.uncensored[]");
      const double q = number_field(u[k], "order_quantity",
                                    "dataset.uncensored[]");
      if (q != ds.groups()[k].order_quantity) {
        throw std::invalid_argument(
            "dataset: uncensored group order quantities differ from groups");
      }
      uncensored->push_back(
          number_array(u[k], "demands", "dataset.uncensored[]"));
    }
  }
  return {cost, cap, std::move(ds), std::move(uncensored)};
}

json dataset_to_json(const DatasetFile& file) {
  json j;
  j["cost"] = {{"b", file.cost.b()}, {"h", file.cost.h()}};
  j["cap"] = file.cap;
  json groups = json::array();
  for (const SalesGroup& g : file.dataset.groups()) {
    groups.push_back({{"order_quantity", g.order_quantity}, {"sales", g.sales}});
  }
  j["groups"] = std::move(groups);
  if (file.uncensored) {
    json u = json::array();
    for (std::size_t k = 0; k < file.uncensored->size(); ++k) {
      u.push_back({{"order_quantity", file.dataset.groups()[k].order_quantity},
                   {"demands", (*file.uncensored)[k]}});
    }
    j["uncensored"] = std::move(u);
  }
  return j;
}

DatasetFile read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return dataset_from_json(parse_json_text(buf.str(), path));
}

void write_dataset_file(const std::string& path, const DatasetFile& file) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write dataset file '" + path + "'");
  }
  out << dataset_to_json(file).dump(2) << '\n';
}

DemandDistribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw std::invalid_argument("distribution: missing 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  const std::string where = "distribution(" + family + ")";
  if (family == "discrete_uniform") {
    require_keys(j, {"family", "low", "high"}, where);
    return DemandDistribution::discrete_uniform(
        static_cast<long long>(number_field(j, "low", where)),
        static_cast<long long>(number_field(j, "high", where)));
  }
  if (family == "exponential") {
    require_keys(j, {"family", "mean"}, where);
    return DemandDistribution::exponential(number_field(j, "mean", where));
  }
  if (family == "poisson") {
    require_keys(j, {"family", "mean"}, where);
    return DemandDistribution::poisson(number_field(j, "mean", where));
  }
  if (family == "truncated_normal") {
    require_keys(j, {"family", "mean", "sd"}, where);
    return DemandDistribution::truncated_normal(number_field(j, "mean", where),
                                                number_field(j, "sd", where));
  }
  if (family == "point_mass_mixture") {
    require_keys(j, {"family", "atoms"}, where);
    std::vector<Atom> atoms;
    for (const json& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2) {
        throw std::invalid_argument(where + ": atoms are [value, probability]");
      }
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return DemandDistribution::point_mass_mixture(std::move(atoms));
  }
  if (family == "empirical") {
    require_keys(j, {"family", "samples"}, where);
    const std::vector<double> xs = number_array(j, "samples", where);
    return empirical_from_samples(xs);
  }
  throw std::invalid_argument("distribution: unknown family '" + family + "'");
}

json distribution_to_json(const DemandDistribution& d) {
  const auto params = d.parameters();
  switch (d.family()) {
  case Family::discrete_uniform:
    return {{"family", "discrete_uniform"},
            {"low", static_cast<long long>(params.a)},
            {"high", static_cast<long long>(params.b)}};
  case Family::exponential:
    return {{"family", "exponential"}, {"mean", params.a}};
  case Family::poisson:
    return {{"family", "poisson"}, {"mean", params.a}};
  case Family::truncated_normal:
    return {{"family", "truncated_normal"}, {"mean", params.a},
            {"sd", params.b}};
  case Family::point_mass_mixture:
  case Family::empirical: {
    json atoms = json::array();
    for (const Atom& a : d.atoms()) {
      atoms.push_back({a.value, a.probability});
    }
    return {{"family", "point_mass_mixture"}, {"atoms", atoms}};
  }
  }
  return {};
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    out.push_back(cur);
  }
  return out;
}

double to_number(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw std::invalid_argument("bad number '" + s + "' in distribution '" +
                                spec + "'");
  }
  return v;
}

} // namespace

DemandDistribution parse_distribution_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  const auto args = split(rest, ':');
  auto arity = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("distribution '" + spec + "' expects " +
                                  std::to_string(n) + " parameter(s)");
    }
  };
  if (family == "exponential") {
    arity(1);
    return DemandDistribution::exponential(to_number(args[0], spec));
  }
  if (family == "poisson") {
    arity(1);
    return DemandDistribution::poisson(to_number(args[0], spec));
  }
  if (family == "uniform" || family == "discrete_uniform") {
    arity(2);
    return DemandDistribution::discrete_uniform(
        static_cast<long long>(to_number(args[0], spec)),
        static_cast<long long>(to_number(args[1], spec)));
  }
  if (family == "normal" || family == "truncated_normal") {
    arity(2);
    return DemandDistribution::truncated_normal(to_number(args[0], spec),
                                                to_number(args[1], spec));
  }
  if (family == "atoms" || family == "point_mass_mixture") {
    arity(1);
    std::vector<Atom> atoms;
    for (const std::string& item : split(args[0], ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("atoms are written value=probability");
      }
      atoms.push_back({to_number(item.substr(0, eq), spec),
                       to_number(item.substr(eq + 1), spec)});
    }
    return DemandDistribution::point_mass_mixture(std::move(atoms));
  }
  if (family == "empirical") {
    arity(1);
    std::vector<double> xs;
    for (const std::string& item : split(args[0], ',')) {
      xs.push_back(to_number(item, spec));
    }
    return empirical_from_samples(xs);
  }
  throw std::invalid_argument("unknown distribution family '" + family + "'");
}

} // namespace censnv
