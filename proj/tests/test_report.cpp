#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tauer/report.hpp"
#include "tauer/serialize.hpp"

using namespace tauer;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tauer_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config settings") {
  ScenarioConfig config;
  apply_setting(config, " depth ", " 4");
  apply_setting(config, "grid", "0, 1/2");
  apply_setting(config, "tol", "1e-9");
  CHECK(config.depth == 4);
  CHECK(*config.grid == "0, 1/2");
  CHECK(config.tolerance == 1e-9);
  CHECK_THROWS_AS(apply_setting(config, "depth", "four"), ConfigError);
  CHECK_THROWS_AS(apply_setting(config, "colour", "red"), ConfigError);

  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "# scenario\nlevel = 3\nseed = 9  # trailing\n\n";
  load_config_file(config, dir / "run.cfg");
  CHECK(config.level == 3);
  CHECK(config.seed == 9);
  std::ofstream(dir / "bad.cfg") << "level 3\n";
  CHECK_THROWS_AS(load_config_file(config, dir / "bad.cfg"), ConfigError);
  CHECK_THROWS_AS(load_config_file(config, dir / "missing.cfg"), ConfigError);
}

TEST_CASE("grid resolution") {
  const PrimeTower tower = build_prime_tower(3);
  ScenarioConfig config;
  CHECK(resolve_grid(config, tower).size() == 7);
  config.grid = "1";
  CHECK(resolve_grid(config, tower).size() == 3);
  config.grid = "5/6, 0, 1/2, 0";
  const auto points = resolve_grid(config, tower);
  REQUIRE(points.size() == 3);
  CHECK(points[0].is_zero());
  CHECK(points[2].to_string() == "5/6");
  config.grid = "";
  CHECK_THROWS_WITH_AS(resolve_grid(config, tower), "empty parameter grid", ConfigError);
  config.grid = "1/42";
  CHECK_THROWS_AS(resolve_grid(config, tower), ConfigError);
  config.grid = "1/5";
  CHECK_THROWS_AS(resolve_grid(config, tower), ConfigError);
  config.grid = "3";
  CHECK_THROWS_AS(resolve_grid(config, tower), ConfigError);
  config.grid.reset();
  config.level = 4;
  CHECK_THROWS_AS(resolve_grid(config, tower), ConfigError);
}

TEST_CASE("subcommands write their artifacts") {
  ScenarioConfig config;
  config.grid = "1";
  config.out = scratch("run");
  config.threads = 2;
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run("tower", config, out, err) == 0);
  CHECK(run("family", config, out, err) == 0);
  CHECK(run("approximant", config, out, err) == 0);
  CHECK(run("distances", config, out, err) == 0);
  CHECK(run("certify", config, out, err) == 0);
  CHECK(run("gamma", config, out, err) == 0);
  CHECK(err.str().empty());
  for (const char* name : {"tower.json", "family.csv", "family_leg3.json", "approximants_L2.txt",
                           "distances.csv", "gaps.json", "certificates.json", "certificates.csv",
                           "gamma.csv", "gamma_witnesses.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(config.out / name), name);
  }
  const std::string csv = slurp(config.out / "distances.csv");
  CHECK(csv.rfind("s,t,lower,upper,bound,claim\n", 0) == 0);
  const auto gaps = nlohmann::json::parse(slurp(config.out / "gaps.json"));
  CHECK(gaps.size() == 3);
  const auto certs = nlohmann::json::parse(slurp(config.out / "certificates.json"));
  for (const auto& c : certs) CHECK(c["pass"].get<bool>());
}

TEST_CASE("undefined distances are reported per pair") {
  ScenarioConfig config;
  config.out = scratch("undefined");
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run("distances", config, out, err) == 1);
  const auto gaps = nlohmann::json::parse(slurp(config.out / "gaps.json"));
  REQUIRE(gaps.size() == 21);
  // 1/6 has no masa approximant at level 2.
  CHECK(gaps[0].contains("error"));
  CHECK_FALSE(gaps[0].contains("lower"));
  int defined = 0;
  for (const auto& g : gaps) defined += g.contains("lower") ? 1 : 0;
  CHECK(defined == 3);
  CHECK(err.str().find("labels do not form a complete masa") != std::string::npos);
  // Exact Gamma rows do not depend on the distance.
  CHECK(run("gamma", config, out, err) == 0);
}

TEST_CASE("runs are deterministic") {
  ScenarioConfig a;
  a.level = 3;
  a.grid = "0,1/2,1/1";
  a.out = scratch("det_a");
  ScenarioConfig b = a;
  b.out = scratch("det_b");
  b.threads = 3;
  std::ostringstream sink;
  REQUIRE(run("distances", a, sink, sink) == 0);
  REQUIRE(run("distances", b, sink, sink) == 0);
  CHECK(slurp(a.out / "distances.csv") == slurp(b.out / "distances.csv"));
}

TEST_CASE("configuration errors exit with status 2") {
  ScenarioConfig config;
  config.out = scratch("errors");
  std::ostringstream out;
  std::ostringstream err;
  config.grid = "";
  CHECK(run("distances", config, out, err) == 2);
  CHECK(err.str().find("empty parameter grid") != std::string::npos);
  config.grid.reset();
  CHECK(run("frobnicate", config, out, err) == 2);
  config.depth = 9;
  CHECK(run("approximant", config, out, err) == 2);
  CHECK(run("tower", config, out, err) == 0);
}

TEST_CASE("json round trips") {
  const PrimeTower tower = build_prime_tower(5);
  CHECK(tower_from_json(to_json(tower)) == tower);
  CHECK(to_json(tower)["products"][4] == "3270666");
  for (const auto& t : grid(tower, 2)) CHECK(rational_from_json(tower, to_json(t)) == t);
  const TowerRational deep(tower, 12345, 5);
  CHECK(rational_from_json(tower, to_json(deep)) == deep);

  const OrthoFamily f(3, 2);
  const auto j = to_json(f);
  CHECK(j["p"] == 3);
  CHECK(j["bases"].size() == 2);
  const auto entry = j["bases"][1][3 * 0 + 1];
  const ComplexVector v = f.vector(1, 0);
  CHECK(entry[0].get<double>() == doctest::Approx(v(1).real()));
  CHECK(entry[1].get<double>() == doctest::Approx(v(1).imag()));

  Certificate cert{CertificateKind::kCutdown};
  cert.params = {{"n", "2"}};
  const auto cj = to_json(cert);
  CHECK(cj["kind"] == "cutdown");
  CHECK(cj["pass"] == true);
  CHECK(cj["params"]["n"] == "2");
}

TEST_CASE("output directory default") {
  ::setenv("TAUER_OUT", "/tmp/somewhere", 1);
  CHECK(default_output_dir() == "/tmp/somewhere");
  ::unsetenv("TAUER_OUT");
  CHECK(default_output_dir() == "tauer_out");
}
