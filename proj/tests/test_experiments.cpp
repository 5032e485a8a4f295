#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hydrolim/experiments.hpp"

using namespace hydrolim;

TEST_CASE("registry and unknown names") {
  CHECK(experiment_names().size() == 9);
  try {
    run_experiment("no-such-experiment", Json::object());
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& n : experiment_names()) CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("schema violations are rejected before running") {
  CHECK_THROWS_AS(run_experiment("gram-scan", Json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("gram-scan", Json{{"J", "eight"}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("gram-scan", Json{{"J", Json::array({4, 0, 8})}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("gram-scan", Json{{"tolerances", {{"slope", -1.0}}}}),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment("gram-scan", Json{{"experiment", "pde"}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("pde", Json{{"scheme", "implicit"}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("hydro-compare", Json{{"N", Json::array({64, 100})}}),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment("hydro-compare", Json{{"profile", {{"mean", 0.2}}}}), ConfigError);
  CHECK_THROWS_AS(run_experiment("lsi-bound", Json::array()), ConfigError);
  CHECK_THROWS_AS(parse_potential(Json{{"perturbation", {{"family", "quartic"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_potential(Json{{"perturbation", {{"family", "cosine"}, {"width", 1.0}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_profile(Json{{"mode", 1.5}}), ConfigError);
}

TEST_CASE("potential and profile parsing") {
  auto g = parse_potential(Json{{"perturbation", {{"family", "zero"}}}});
  CHECK(g.is_gaussian());
  CHECK(g.a() == 0.0);
  auto c = parse_potential(
      Json{{"a", 0.2}, {"perturbation", {{"family", "cosine"}, {"amplitude", 0.3}}}});
  CHECK(c.a() == 0.2);
  CHECK(c.family() == "cosine");
  CHECK(parse_potential(Json()).family() == "cosine");
  Profile p = parse_profile(Json{{"mean", 0.1}, {"amplitude", 2.0}, {"mode", 3}, {"phase", 0.5}});
  CHECK(p(0.2) == doctest::Approx(0.1 + 2.0 * std::sin(6 * M_PI * 0.2 + 0.5)).epsilon(1e-15));
}

TEST_CASE("gram-scan report and files") {
  ExperimentReport r = run_experiment("gram-scan", Json::object());
  CHECK(r.passed());
  CHECK(r.experiment == "gram-scan");
  CHECK(!r.verifies.empty());
  CHECK(r.fits.at("gram_L1").slope == doctest::Approx(-2.0).epsilon(1e-10));

  const auto dir = std::filesystem::temp_directory_path() / "hydrolim_test_experiments";
  std::filesystem::remove_all(dir);
  auto files = write_report(r, Json::object(), dir);
  CHECK(files.size() == r.tables.size() + 1);
  std::ifstream in(dir / "gram-scan_summary.json");
  Json s = Json::parse(in);
  CHECK(s["schema_version"] == kSummarySchemaVersion);
  CHECK(s["passed"] == true);
  CHECK(s["verifies"].is_string());
  CHECK(s["checks"].size() == r.checks.size());
  std::ifstream csv(dir / "gram-scan_gram.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "L,J,deviation,inverse_J_squared");
  std::filesystem::remove_all(dir);
}

TEST_CASE("reruns give identical CSV bodies") {
  Json cfg = {{"N", 16}, {"T", 0.002}, {"ensemble", 4}, {"seed", 9},
              {"sample_times", Json::array({0.0, 0.001, 0.002})}};
  ExperimentReport a = run_experiment("simulate", cfg), b = run_experiment("simulate", cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i)
    CHECK(format_csv(a.tables[i]) == format_csv(b.tables[i]));
  cfg["seed"] = 10;
  CHECK(format_csv(run_experiment("simulate", cfg).tables[0]) != format_csv(a.tables[0]));
  CHECK(a.passed());
  // Trajectory rows hold t and N states of mean zero.
  const auto& row = a.tables[1].rows.back();
  REQUIRE(row.size() == 17);
  double mean = 0.0;
  for (int j = 1; j <= 16; ++j) mean += row[j] / 16;
  CHECK(std::abs(mean) < 1e-14);
}

TEST_CASE("failed checks mark the report") {
  // An impossible tolerance on the Gram slope must fail.
  ExperimentReport r =
      run_experiment("gram-scan", Json{{"L", Json::array({2})}, {"J", Json::array({2, 3, 4})},
                                       {"tolerances", {{"slope", 1e-9}}}});
  CHECK_FALSE(r.passed());
}

TEST_CASE("pde experiment on the Gaussian heat equation") {
  Json cfg = {{"potential", {{"perturbation", {{"family", "zero"}}}}},
              {"G", 64},
              {"T", 0.01},
              {"scheme", "explicit"},
              {"offset", 0.5}};
  ExperimentReport r = run_experiment("pde", cfg);
  CHECK(r.passed());
  bool found = false;
  for (const auto& c : r.checks)
    if (c.name == "gaussian_heat_decay") found = true;
  CHECK(found);
}
