#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "censnv/io.hpp"
#include "censnv/minimax.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("censnv_cli_" + name);
}

Run run_cli(const std::string& args) {
  const auto err_path = temp_path("stderr.txt");
  const std::string cmd =
      std::string("\"") + CENSNV_CLI_PATH + "\" " + args + " 2>\"" + err_path.string() + "\"";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  std::ifstream in(err_path);
  std::stringstream err;
  err << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = temp_path(name);
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string boundary_dataset(const std::string& sales) {
  return R"({"cost": {"b": 1, "h": 1}, "cap": 100, "groups": [{"order_quantity": 10, "sales": )" +
         sales + "}]}";
}

} // namespace

TEST_CASE("risk") {
  const double lam = -80.0 * std::log(0.6);
  const Run r = run_cli("risk --dist exponential:80 --b 1 --h 1 --lambda " +
                        std::to_string(lam) + " --cap 200");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["regime"] == "unidentifiable");
  CHECK(j["g_minus"].get<double>() == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(j["delta"].get<double>() == doctest::Approx(26.522).epsilon(1e-4));
  CHECK(j["q_dagger"].get<double>() == doctest::Approx(67.389).epsilon(1e-4));

  const Run id = run_cli("risk --dist exponential:80 --lambda 80 --cap 200");
  REQUIRE(id.code == 0);
  const json k = json::parse(id.out);
  CHECK(k["regime"] == "identifiable");
  CHECK(k["delta"].get<double>() == 0.0);
  CHECK(k["q_delta"].get<double>() == doctest::Approx(80.0 * std::log(2.0)));
  CHECK(k["q_dagger"].is_null());

  CHECK(run_cli("risk --dist gamma:3 --lambda 1 --cap 2").code == 2);
  CHECK(run_cli("risk --dist exponential:80 --lambda 1").code == 2);
  CHECK(run_cli("risk --dist exponential:80 --lambda 1 --cap 2 --b -1").code == 2);
  CHECK(run_cli("risk --dist /nonexistent/d.json --lambda 1 --cap 2").code == 1);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("regret-curve") {
  const double lam = -80.0 * std::log(0.6);
  const std::string args = "--dist exponential:80 --lambda " + std::to_string(lam) + " --cap 200";
  const Run r = run_cli("regret-curve " + args + " --grid 101");
  REQUIRE(r.code == 0);
  const json risk = json::parse(run_cli("risk " + args).out);
  const double q_dagger = risk["q_dagger"].get<double>();
  const double delta = risk["delta"].get<double>();

  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "q,regret");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  CHECK(rows.size() == 102);
  bool found = false;
  double best = 1e300;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      CHECK(rows[i].first > rows[i - 1].first);
    }
    best = std::min(best, rows[i].second);
    if (std::abs(rows[i].first - q_dagger) < 1e-6) {
      found = true;
      CHECK(rows[i].second == doctest::Approx(delta).epsilon(1e-8));
    }
  }
  CHECK(found);
  CHECK(best == doctest::Approx(delta).epsilon(1e-8));

  // identifiable: the curve is the vanilla regret up to lambda, and above it beyond
  const Run id = run_cli("regret-curve --dist uniform:0:100 --lambda 95 --cap 200 --b 9 --grid 11");
  REQUIRE(id.code == 0);
  const censnv::Instance inst(censnv::DemandDistribution::discrete_uniform(0, 100), 95.0, 200.0,
                              censnv::CostParameters(9.0, 1.0));
  std::istringstream in2(id.out);
  std::getline(in2, line);
  while (std::getline(in2, line)) {
    const auto comma = line.find(',');
    const double q = std::stod(line.substr(0, comma));
    const double regret = std::stod(line.substr(comma + 1));
    const double vanilla = censnv::vanilla_regret(inst.demand(), inst.cost(), q);
    if (q <= 95.0) {
      CHECK(regret == doctest::Approx(vanilla).epsilon(1e-8));
    } else {
      CHECK(regret > vanilla);
    }
  }
}

TEST_CASE("decide") {
  const auto a = write_file("a.json", boundary_dataset("[1, 2, 3, 4, 5, 6, 7, 10]"));
  const auto b = write_file("b.json", boundary_dataset("[1, 2, 3, 4, 10, 10, 10, 10]"));
  const auto c = write_file("c.json", boundary_dataset("[10, 10, 10, 10, 10, 10, 10, 10]"));

  const json ja = json::parse(run_cli("decide " + a).out);
  CHECK(ja["q"].get<double>() == 4.0);
  CHECK(ja["branch"] == "likely-identifiable");
  CHECK(ja["zeta"].get<double>() == doctest::Approx(0.3444).epsilon(1e-3));
  const json jb = json::parse(run_cli("decide " + b + " --policy rcn").out);
  CHECK(jb["q"].get<double>() == 10.0);
  CHECK(jb["branch"] == "knife-edge");
  const json jc = json::parse(run_cli("decide " + c).out);
  CHECK(jc["q"].get<double>() == doctest::Approx(55.0));
  CHECK(jc["branch"] == "likely-unidentifiable");
  const json jcap = json::parse(run_cli("decide " + c + " --cap 50").out);
  CHECK(jcap["q"].get<double>() == doctest::Approx(30.0));

  CHECK(json::parse(run_cli("decide " + a + " --policy naive_saa").out)["q"].get<double>() == 4.0);
  CHECK(json::parse(run_cli("decide " + c + " --policy kaplan_meier").out)["q"].get<double>() ==
        10.0);
  CHECK(run_cli("decide " + a + " --policy oracle").code == 2);
  CHECK(run_cli("decide " + a + " --policy true_saa").code == 2);
  CHECK(run_cli("decide " + a + " --policy censored_saa").code == 1);
  CHECK(run_cli("decide " + a + " --delta 1.5").code == 2);

  const auto broken = write_file("broken.json", "{\n  \"cap\": 100,\n  \"groups\": [,\n}\n");
  const Run bad = run_cli("decide " + broken);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(run_cli("decide /nonexistent/x.json").code == 1);
}

TEST_CASE("lower-bound and sample-complexity") {
  const Run r = run_cli("lower-bound --regime id --b 1 --h 1 --lambda 1 --cap 2 --n 1");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["lower_bound"].get<double>() == doctest::Approx(0.006701).epsilon(1e-4));
  const json all = json::parse(run_cli("lower-bound --lambda 0.5 --cap 2").out);
  CHECK(all.size() == 3);
  CHECK(run_cli("lower-bound --regime nope --lambda 1").code == 2);
  CHECK(run_cli("lower-bound --lambda 1 --cap 0.5").code == 2);

  // outside the two-point construction's domain the raw bound is still reported
  const json low = json::parse(run_cli("lower-bound --regime ui --b 1 --h 3 --lambda 0.5 --cap 2").out);
  CHECK(low["lower_bound"].get<double>() <= 0.0);
  CHECK(low["g0"].is_null());
  CHECK(low.contains("construction_error"));

  const Run sc = run_cli("sample-complexity --b 1 --h 1 --lambda 10 --cap 100 --epsilon 5");
  REQUIRE(sc.code == 0);
  CHECK(json::parse(sc.out)["n"].get<std::uint64_t>() ==
        censnv::sample_complexity(censnv::CostParameters(1, 1), 10, 100, 5, 0.3));
  CHECK(run_cli("sample-complexity --lambda 10 --cap 100 --epsilon 0").code == 2);
}

TEST_CASE("oracle-check") {
  const Run r = run_cli("oracle-check --instances 20 --grid 2000 --seed 5");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("20/20 instances within tolerance", 0) == 0);
}

TEST_CASE("simulate") {
  const std::string cfg = write_file("sim.json", R"({
    "distribution": "uniform:0:100", "h": 1, "b": [9], "lambda": [57.21, 108.07],
    "n": [40], "replications": 3, "cap": 320, "seed": 5
  })");
  const Run one = run_cli("simulate " + cfg + " --jobs 1");
  const Run four = run_cli("simulate " + cfg + " --jobs 4");
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == run_cli("simulate " + cfg).out);
  CHECK(one.out != run_cli("simulate " + cfg + " --seed 6").out);
  // 2 points x 3 replications x 6 policies + header
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 37);

  const auto out = temp_path("sim.csv");
  CHECK(run_cli("simulate " + cfg + " --out " + out.string()).code == 0);
  std::ifstream in(out, std::ios::binary);
  std::stringstream got;
  got << in.rdbuf();
  CHECK(got.str() == one.out);

  const std::string unknown = write_file("unknown.json", R"({"distribution": "uniform:0:9", "h": 1,
    "b": [9], "lambda": [5], "n": [4], "cap": 20, "seeed": 1})");
  const Run bad = run_cli("simulate " + unknown);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("seeed") != std::string::npos);
}

TEST_CASE("ingest") {
  const std::string csv = std::string(CENSNV_TEST_DATA) + "/sales.csv";
  const auto dist_out = temp_path("dist.json");
  const Run r = run_cli("ingest " + csv + " --category Furniture --lambda 4 --n 5 --seed 3 --b 9 "
                        "--distribution-out " + dist_out.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["cap"].get<double>() == 6.0);
  CHECK(j["groups"].size() == 2);
  CHECK(j["groups"][0]["order_quantity"].get<double>() == 4.0);
  CHECK(j["cost"]["b"].get<double>() == 9.0);
  CHECK(r.out == run_cli("ingest " + csv + " --category Furniture --lambda 4 --n 5 --seed 3 --b 9").out);
  std::ifstream din(dist_out);
  const json d = json::parse(din);
  CHECK(censnv::distribution_from_json(d).mean() == doctest::Approx(12.0 / 5.0));

  CHECK(run_cli("ingest " + csv + " --category Garden --lambda 4").code == 2);
  CHECK(run_cli("ingest /nonexistent.csv --category Furniture --lambda 4").code == 1);
}
