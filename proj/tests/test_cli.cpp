#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "ksg_test_cli";

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + KSG_CLI_PATH + "\" " + args + " > \"" +
                          (kRoot / "stdout.txt").string() + "\" 2> \"" + (kRoot / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSteady = R"({
  "grid": {"Lx": 1, "Ly": 1, "nx": 12, "ny": 12},
  "model": {"chi": 1, "tau": 0, "source": {"kind": "gompertz", "alpha": 1, "K": 1}},
  "initial": {"kind": "uniform", "value": 1},
  "time": {"t_end": 0.05},
  "analysis": {"multistarts": 2, "ascent_iterations": 5}
})";

const char* kBlowup = R"({
  "grid": {"Lx": 1, "Ly": 1, "nx": 32, "ny": 32},
  "model": {"chi": 1, "tau": 0, "source": {"kind": "none"}},
  "initial": {"kind": "gaussian", "center": [0.5, 0.5], "width": 0.05, "total_mass": 60},
  "time": {"t_end": 1, "overflow_factor": 2}
})";

}  // namespace

TEST_CASE("steady state run exits 0 with constant rows") {
  fs::remove_all(kRoot);
  const auto cfg = write_config("steady.json", kSteady);
  const auto out = kRoot / "steady";
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 0);
  for (const char* f : {"manifest.json", "diagnostics.csv", "theorem_report.json", "verdict.json"})
    CHECK(fs::exists(out / f));
  std::istringstream csv(slurp(out / "diagnostics.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,dt,mass,entropy,grad_v_energy,F,u_max,u_min,u_l2,v_max");
  int rows = 0;
  while (std::getline(csv, line)) {
    const std::string tail = line.substr(line.find(',', line.find(',') + 1) + 1);
    CHECK(tail == "1,0,0,0,1,1,1,1");
    ++rows;
  }
  CHECK(rows >= 2);
  auto verdict = nlohmann::json::parse(slurp(out / "verdict.json"));
  CHECK(verdict["verdict"] == "Bounded");
  auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["config"]["time"]["dt_max"] == 0.01);
  CHECK(manifest.contains("simd_backend"));
}

TEST_CASE("configuration errors exit 1 and leave a failure record") {
  const auto cfg = write_config("bad.json", replace(kSteady, "\"tau\": 0", "\"tau\": 2"));
  const auto out = kRoot / "bad";
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 1);
  auto failure = nlohmann::json::parse(slurp(out / "failure.json"));
  CHECK(failure["exit_code"] == 1);
  CHECK(failure["message"].get<std::string>().find("tau") != std::string::npos);
  CHECK(slurp(kRoot / "stderr.txt").find("tau") != std::string::npos);

  CHECK(run_cli("run --config \"" + (kRoot / "missing.json").string() + "\" --out \"" + out.string() + "\"") == 1);
  CHECK(run_cli("run --out x") == 1);
  CHECK(run_cli("frobnicate") == 1);
}

TEST_CASE("unwritable output directory exits 1 with an I/O message") {
  const auto cfg = write_config("steady2.json", kSteady);
  const auto blocker = write_config("blocker", "not a directory");
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + (blocker / "sub").string() + "\"") == 1);
  CHECK(slurp(kRoot / "stderr.txt").find("I/O") != std::string::npos);
}

TEST_CASE("numerical failure exits 2") {
  std::string text = replace(kSteady, R"("kind": "uniform", "value": 1},)",
                             R"("kind": "gaussian", "center": [0.3, 0.6], "width": 0.1, "total_mass": 1},
  "solver": {"rel_tol": 1e-15, "max_iter": 1},)");
  const auto cfg = write_config("starved.json", text);
  const auto out = kRoot / "starved";
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 2);
  CHECK(fs::exists(out / "failure.json"));
}

TEST_CASE("blow-up exits 3 only with --fail-on-blowup") {
  const auto cfg = write_config("blowup.json", kBlowup);
  const auto out = kRoot / "blowup";
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\" --fail-on-blowup") == 3);
  auto verdict = nlohmann::json::parse(slurp(out / "verdict.json"));
  CHECK(verdict["verdict"] == "BlowupSuspect");
  CHECK(verdict["reason"] == "LinfOverflow");
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 0);
}

TEST_CASE("check and estimate-gn print JSON") {
  const auto cfg = write_config("steady3.json", kSteady);
  CHECK(run_cli("check --config \"" + cfg.string() + "\" --gn-constant 1") == 0);
  auto report = nlohmann::json::parse(slurp(kRoot / "stdout.txt"));
  CHECK(report["cond_K"] == true);
  CHECK(report["c_gn_used"] == 1.0);
  CHECK(report["M"] == doctest::Approx(1.0));
  CHECK(report["cond_chiM"] == false);

  CHECK(run_cli("estimate-gn --lx 1 --ly 1 --nx 12 --ny 12 --budget 3 --seed 4 --iterations 10") == 0);
  auto est = nlohmann::json::parse(slurp(kRoot / "stdout.txt"));
  CHECK(est["c_gn_lower"].get<double>() >= 1.0);
  CHECK(run_cli("estimate-gn --lx 1 --ly 1 --nx 2 --ny 12 --budget 3 --seed 4") == 1);
}

TEST_CASE("sweep subcommand") {
  std::string doc = std::string("{\"base\": ") + kSteady +
                    R"(, "axes": [{"param": "chi", "values": [0.1, 0.2]}]})";
  const auto cfg = write_config("sweep.json", doc);
  const auto out = kRoot / "sweep";
  CHECK(run_cli("sweep --config \"" + cfg.string() + "\" --out \"" + out.string() + "\" --jobs 2") == 0);
  std::istringstream csv(slurp(out / "summary.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
  fs::remove_all(kRoot);
}
