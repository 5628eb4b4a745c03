#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ksg/errors.hpp"
#include "ksg/run.hpp"
#include "ksg/sweep.hpp"

using namespace ksg;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"({
  "grid": {"Lx": 1, "Ly": 1, "nx": 12, "ny": 12},
  "model": {"chi": 0.5, "tau": 0, "source": {"kind": "gompertz", "alpha": 1, "K": 1}},
  "initial": {"kind": "gaussian", "center": [0.4, 0.5], "width": 0.15, "total_mass": 1},
  "time": {"t_end": 0.05},
  "analysis": {"multistarts": 3, "ascent_iterations": 10}
})";

std::string sweep_doc(const std::string& axes) {
  return std::string("{\"base\": ") + kBase + ", \"axes\": " + axes + "}";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ksg_test_sweep_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// drop the trailing wall-time column from every row
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("axis expansion and run ids") {
  auto s = parse_sweep_config(sweep_doc(R"([{"param": "chi", "values": [0.01, 1]},
                                              {"param": "total_mass", "values": [0.1, 10, 20]}])"));
  auto pts = expand_axes(s);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0] == std::vector<std::pair<std::string, double>>{{"chi", 0.01}, {"total_mass", 0.1}});
  CHECK(pts[1] == std::vector<std::pair<std::string, double>>{{"chi", 0.01}, {"total_mass", 10}});
  CHECK(pts[3] == std::vector<std::pair<std::string, double>>{{"chi", 1}, {"total_mass", 0.1}});
  CHECK(run_id_for(pts[0]) != run_id_for(pts[1]));
  CHECK(run_id_for(pts[0]) == run_id_for(pts[0]));
  CHECK(run_id_for(pts[0]).size() == 16);
}

TEST_CASE("sweep configs are validated up front") {
  CHECK_THROWS_AS(parse_sweep_config(sweep_doc(R"([{"param": "chi", "values": [1, -1]}])")), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(sweep_doc(R"([{"param": "colour", "values": [1]}])")), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(sweep_doc(R"([{"param": "nx", "values": [2]}])")), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(sweep_doc("[]").insert(1, "\"jobs\": \"many\", ")), ConfigError);
  auto big = std::string("{\"base\": ") + kBase + R"(, "max_runs": 3, "axes": [{"param": "chi", "values": [1, 2, 3, 4]}]})";
  CHECK_THROWS_AS(parse_sweep_config(big), ConfigError);
}

TEST_CASE("apply_parameter edits the right field") {
  auto s = parse_sweep_config(sweep_doc("[]"));
  SimConfig c = s.base;
  apply_parameter(c, "alpha", 2.5);
  apply_parameter(c, "K", 0.7);
  apply_parameter(c, "nx", 20);
  apply_parameter(c, "mass0", 3.0);
  CHECK(std::get<Gompertz>(c.model.source) == Gompertz{2.5, 0.7});
  CHECK(c.grid.nx == 20);
  CHECK(std::get<GaussianInit>(c.initial).total_mass == 3.0);
}

TEST_CASE("a 1x1 sweep reproduces a single run") {
  const fs::path root = fresh_dir("single");
  auto s = parse_sweep_config(sweep_doc("[]"));
  auto result = run_sweep(s, root / "sweep", 1);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.failures == 0);

  fs::create_directories(root);
  {
    std::ofstream f(root / "cfg.json");
    f << kBase;
  }
  std::ostringstream log;
  CHECK(run_command(root / "cfg.json", root / "run", false, log) == kExitSuccess);

  const fs::path run_dir = root / "sweep" / result.rows[0].run_id;
  CHECK(slurp(run_dir / "diagnostics.csv") == slurp(root / "run" / "diagnostics.csv"));
  CHECK(slurp(run_dir / "theorem_report.json") == slurp(root / "run" / "theorem_report.json"));
  auto v1 = nlohmann::json::parse(slurp(run_dir / "verdict.json"));
  auto v2 = nlohmann::json::parse(slurp(root / "run" / "verdict.json"));
  v1.erase("wall_s");
  v2.erase("wall_s");
  CHECK(v1 == v2);
  fs::remove_all(root);
}

TEST_CASE("2x2 sweep rows carry the rowwise condition check") {
  const fs::path root = fresh_dir("grid");
  auto s = parse_sweep_config(sweep_doc(R"([{"param": "chi", "values": [0.01, 1]},
                                              {"param": "total_mass", "values": [0.1, 10]}])"));
  auto result = run_sweep(s, root, 2);
  REQUIRE(result.rows.size() == 4);
  const GnChoice gn = choose_gn_constant(s.base);
  std::size_t i = 0;
  for (double chi : {0.01, 1.0}) {
    for (double mass : {0.1, 10.0}) {
      const SweepRow& row = result.rows[i++];
      CHECK(row.chi == chi);
      CHECK(row.mass0 == doctest::Approx(mass).epsilon(1e-12));
      ModelParams p = s.base.model;
      p.chi = chi;
      auto report = check_conditions(p, row.mass0, 1.0, gn.value);
      CHECK(row.cond_K == (report.cond_K ? "true" : "false"));
      CHECK(row.cond_chiM == (report.cond_chiM ? "true" : "false"));
      CHECK(row.status == "CompletedHorizon");
    }
  }
  // chi M = 10 exceeds 1/(2 c^4) for any c >= 1
  CHECK(result.rows[3].cond_chiM == "false");
  CHECK(result.rows[0].cond_chiM == "true");

  const std::string summary = slurp(root / "summary.csv");
  CHECK(summary.substr(0, summary.find('\n')) == kSweepHeader);
  fs::remove_all(root);
}

TEST_CASE("sweeps are deterministic across job counts and resumable") {
  const std::string axes = R"([{"param": "chi", "values": [0.01, 1]}, {"param": "nx", "values": [8, 10]}])";
  auto s = parse_sweep_config(sweep_doc(axes));
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  run_sweep(s, a, 1);
  run_sweep(s, b, 4);
  const std::string csv_a = slurp(a / "summary.csv");
  CHECK(without_wall_time(csv_a) == without_wall_time(slurp(b / "summary.csv")));

  auto again = run_sweep(s, a, 2);
  CHECK(again.resumed == 4);
  CHECK(slurp(a / "summary.csv") == csv_a);

  // a damaged record is recomputed
  const auto victim = a / again.rows[1].run_id / "result.json";
  {
    std::ofstream f(victim, std::ios::trunc);
    f << "{";
  }
  auto third = run_sweep(s, a, 1);
  CHECK(third.resumed == 3);
  CHECK(without_wall_time(slurp(a / "summary.csv")) == without_wall_time(csv_a));
  fs::remove_all(a);
  fs::remove_all(b);
}
