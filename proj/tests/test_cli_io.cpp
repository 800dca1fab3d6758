#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcond/config.hpp"
#include "pcond/report.hpp"
#include "pcond/runner.hpp"

using namespace pcond;
using namespace pcond::io;

namespace {

const char* kMinimalConfig = R"json({
  "scenario": {
    "domain": {"kind": "circle", "center": [0, 0], "radius": 1.0},
    "inclusions": [
      {"kind": "superconducting", "shape": "circle", "center": [0.2, 0], "radius": 0.3}
    ],
    "sigma_background": 1.0,
    "p": 2.0
  },
  "method": "enclose",
  "enclosure": {"directions": 8, "tau_grid": [5, 6.5, 8, 10, 12.5], "classify_first": false},
  "output": {"dir": "OUTDIR", "svg": true},
  "seed": 3
})json";

std::string config_with_dir(const std::string& dir) {
  std::string s = kMinimalConfig;
  auto pos = s.find("OUTDIR");
  s.replace(pos, 6, dir);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal config parses") {
  auto out = parse_config_text(config_with_dir("/tmp/pcond_t1"));
  CHECK(out.errors.empty());
  REQUIRE(out.config.has_value());
  CHECK(out.config->method == Method::Enclose);
  CHECK(out.config->enclosure.directions == 8);
  CHECK(out.config->scenario.inclusions.size() == 1);
}

TEST_CASE("config validation reports every error") {
  std::string bad = R"json({
    "scenario": {
      "domain": {"kind": "circle", "radius": 1.0},
      "inclusions": [{"kind": "mystery", "shape": "circle", "center": [0,0], "radius": 0.2}],
      "p": 1.0
    },
    "method": "warp",
    "thread_count": 2
  })json";
  auto out = parse_config_text(bad);
  CHECK_FALSE(out.config.has_value());
  CHECK(out.errors.size() >= 3);  // bad kind, bad exponent, bad method, unknown key
  bool has_exponent = false, has_unknown = false;
  for (const auto& e : out.errors) {
    if (e.find("BadExponent") != std::string::npos) has_exponent = true;
    if (e.find("unknown key") != std::string::npos) has_unknown = true;
  }
  CHECK(has_exponent);
  CHECK(has_unknown);
}

TEST_CASE("json syntax errors are reported with context") {
  auto out = parse_config_text("{ not json");
  CHECK_FALSE(out.config.has_value());
  REQUIRE(out.errors.size() == 1);
  CHECK(out.errors[0].find("ParseError") != std::string::npos);
}

TEST_CASE("enclosure run writes artifacts deterministically") {
  std::string dir1 = "/tmp/pcond_run_a", dir2 = "/tmp/pcond_run_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  auto cfg1 = parse_config_text(config_with_dir(dir1));
  auto cfg2 = parse_config_text(config_with_dir(dir2));
  REQUIRE(cfg1.config.has_value());
  REQUIRE(cfg2.config.has_value());
  auto rep1 = run(*cfg1.config);
  auto rep2 = run(*cfg2.config);
  CHECK(rep1.exit_code == 0);
  CHECK(std::filesystem::exists(dir1 + "/hull.csv"));
  CHECK(std::filesystem::exists(dir1 + "/hull_polygon.csv"));
  CHECK(std::filesystem::exists(dir1 + "/hull.svg"));
  // Identical config + seed -> byte-identical artifacts.
  CHECK(slurp(dir1 + "/hull.csv") == slurp(dir2 + "/hull.csv"));
  CHECK(slurp(dir1 + "/hull_polygon.csv") == slurp(dir2 + "/hull_polygon.csv"));
  CHECK(slurp(dir1 + "/hull.svg") == slurp(dir2 + "/hull.svg"));
  // 8 directions, none dropped.
  std::string table = slurp(dir1 + "/hull.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 9);
}

TEST_CASE("forward run exports solution and flux") {
  std::string cfg_text = R"json({
    "scenario": {
      "domain": {"kind": "circle", "radius": 1.0},
      "inclusions": [{"kind": "insulating", "shape": "circle", "center": [0.2, 0], "radius": 0.3}],
      "p": 3.0
    },
    "method": "forward",
    "forward": {"h_max": 0.15, "boundary_data": {"kind": "coordinate", "direction": [1, 0]}},
    "output": {"dir": "/tmp/pcond_fwd"}
  })json";
  std::filesystem::remove_all("/tmp/pcond_fwd");
  auto cfg = parse_config_text(cfg_text);
  REQUIRE(cfg.config.has_value());
  auto rep = run(*cfg.config);
  CHECK(rep.exit_code == 0);
  CHECK(std::filesystem::exists("/tmp/pcond_fwd/solution.csv"));
  CHECK(std::filesystem::exists("/tmp/pcond_fwd/flux.csv"));
  bool has_energy = false;
  for (const auto& n : rep.notes) has_energy |= n.find("energy=") == 0;
  CHECK(has_energy);
}

TEST_CASE("probe run on an empty scenario writes a header-only cloud") {
  std::string cfg_text = R"json({
    "scenario": {"domain": {"kind": "circle", "radius": 1.0}, "p": 2.0},
    "method": "probe",
    "probe": {"needles": 4, "t_grid": 12, "k": 2, "h_max": 0.1},
    "output": {"dir": "/tmp/pcond_probe_empty"}
  })json";
  std::filesystem::remove_all("/tmp/pcond_probe_empty");
  auto cfg = parse_config_text(cfg_text);
  REQUIRE(cfg.config.has_value());
  auto rep = run(*cfg.config);
  CHECK(rep.exit_code == 0);
  std::string cloud = slurp("/tmp/pcond_probe_empty/cloud.csv");
  // All needles present, no hits (hit column is the fifth field).
  CHECK(std::count(cloud.begin(), cloud.end(), '\n') == 5);
  std::istringstream lines(cloud);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int i = 0; i < 5; ++i) std::getline(cells, cell, ',');
    CHECK(cell == "0");
  }
}

TEST_CASE("bem-check run emits the cross-check table") {
  std::string cfg_text = R"json({
    "scenario": {
      "domain": {"kind": "circle", "radius": 1.0},
      "inclusions": [{"kind": "superconducting", "shape": "circle", "center": [0.2, 0], "radius": 0.3}],
      "p": 2.0
    },
    "method": "bem-check",
    "bem_check": {"panels": 128, "h_max": 0.06},
    "output": {"dir": "/tmp/pcond_bem"}
  })json";
  std::filesystem::remove_all("/tmp/pcond_bem");
  auto cfg = parse_config_text(cfg_text);
  REQUIRE(cfg.config.has_value());
  auto rep = run(*cfg.config);
  CHECK(rep.exit_code == 0);
  std::string table = slurp("/tmp/pcond_bem/bem.csv");
  CHECK(table.find("norm_K") != std::string::npos);
  CHECK(table.find("gap_relative_difference") != std::string::npos);
  CHECK(std::filesystem::exists("/tmp/pcond_bem/equilibrium.csv"));
}

TEST_CASE("verify runs the method's acceptance checks") {
  std::string cfg_text = R"json({
    "scenario": {
      "domain": {"kind": "circle", "radius": 1.0},
      "inclusions": [{"kind": "superconducting", "shape": "circle", "center": [0.2, 0], "radius": 0.3}],
      "p": 2.0
    },
    "method": "bem-check",
    "output": {"dir": "/tmp/pcond_verify"}
  })json";
  auto cfg = parse_config_text(cfg_text);
  REQUIRE(cfg.config.has_value());
  auto rep = verify(*cfg.config);
  CHECK(rep.exit_code == 0);
  REQUIRE(rep.notes.size() == 1);
  CHECK(rep.notes[0].find("[PASS] 10") == 0);
}

TEST_CASE("report JSON carries warnings with machine codes") {
  RunReport rep;
  rep.method = "forward";
  rep.warn("RegimeNotReached", "direction dropped");
  CHECK(rep.exit_code == 2);
  auto js = rep.to_json();
  CHECK(js.find("\"RegimeNotReached\"") != std::string::npos);
}

TEST_CASE("atomic writes leave no partial file behind") {
  std::string path = "/tmp/pcond_atomic.csv";
  std::filesystem::remove(path);
  write_file_atomic(path, "a,b\n1,2\n");
  CHECK(slurp(path) == "a,b\n1,2\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}
