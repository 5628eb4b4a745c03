#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ksg/config.hpp"
#include "ksg/errors.hpp"

using namespace ksg;

namespace {

const char* kMinimal = R"({
  "grid": {"Lx": 1, "Ly": 1, "nx": 16, "ny": 16},
  "model": {"chi": 0.5, "tau": 0, "source": {"kind": "gompertz", "alpha": 1, "K": 1}},
  "initial": {"kind": "uniform", "value": 0.5}
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal document fills defaults") {
  auto c = parse_config(kMinimal);
  CHECK(c.model.tau == 0);
  CHECK(std::get<Gompertz>(c.model.source) == Gompertz{1.0, 1.0});
  CHECK(std::get<UniformInit>(c.initial).value == 0.5);
  CHECK(c.control == StepControl{});
  CHECK(c.solver == SolveSpec{});
  CHECK(c.classifier.bounded_factor == 10.0);
  CHECK_FALSE(c.analysis.gn_constant.has_value());
  CHECK(c.seed == 0);
  CHECK(c.warnings.empty());
}

TEST_CASE("semantic errors name the field") {
  CHECK(config_error(replace(kMinimal, "\"tau\": 0", "\"tau\": 2")).find("tau") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"K\": 1", "\"K\": 0")).find("K") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"nx\": 16", "\"nx\": 2")).find("nx") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"value\": 0.5", "\"value\": 0")).find("u0") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"value\": 0.5", "\"value\": -1")).find("u0") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"chi\": 0.5", "\"chi\": 0.5, \"colour\": 3")).find("colour") !=
        std::string::npos);
  CHECK(config_error(replace(kMinimal, "\"gompertz\"", "\"bogus\"")).find("kind") != std::string::npos);
}

TEST_CASE("syntax errors report a position") {
  const auto msg = config_error("{\n  \"grid\": {\"Lx\": 1,,}\n}");
  CHECK(msg.find("syntax error") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("tau = 1 needs a nonnegative v0 and tau = 0 ignores it with a warning") {
  auto tau1 = replace(kMinimal, "\"tau\": 0", "\"tau\": 1");
  CHECK(config_error(tau1).find("v0") != std::string::npos);
  auto with_v0 = replace(tau1, "\"initial\"", "\"v0\": {\"kind\": \"uniform\", \"value\": 0.2},\n  \"initial\"");
  auto c = parse_config(with_v0);
  REQUIRE(c.v0.has_value());
  CHECK(std::get<UniformInit>(*c.v0).value == 0.2);

  auto ignored = replace(kMinimal, "\"initial\"", "\"v0\": {\"kind\": \"uniform\", \"value\": 0.2},\n  \"initial\"");
  auto c0 = parse_config(ignored);
  CHECK(c0.warnings.size() == 1);
  CHECK_FALSE(build_initial_v(c0, make_grid(c0.grid)).has_value());
}

TEST_CASE("rendered configs parse back to an equal config") {
  const std::string doc = R"({
    "grid": {"Lx": 2, "Ly": 0.75, "nx": 20, "ny": 12},
    "model": {"chi": 0.123456789012345, "tau": 1, "source": {"kind": "sublogistic", "a": 2, "b": 0.1}},
    "initial": {"kind": "sum_of_gaussians", "bumps": [
      {"center": [0.3, 0.2], "width": 0.05, "total_mass": 3},
      {"center": [1.5, 0.5], "width": 0.1, "total_mass": 0.7}]},
    "initial_floor": 1e-6,
    "v0": {"kind": "gaussian", "center": [1, 0.4], "width": 0.2, "total_mass": 1},
    "time": {"t_end": 3, "dt_max": 0.005, "record_every": 0.1, "overflow_factor": 50},
    "solver": {"rel_tol": 1e-11},
    "classifier": {"bounded_factor": 20},
    "analysis": {"gn_constant": 1.25, "multistarts": 3},
    "seed": 42,
    "output": "out/run"
  })";
  auto c = parse_config(doc);
  auto again = parse_config(render_config(c));
  CHECK(again == c);
  CHECK(render_config(again) == render_config(c));

  auto m = parse_config(kMinimal);
  CHECK(parse_config(render_config(m)) == m);
}

TEST_CASE("initial data construction") {
  auto c = parse_config(R"({
    "grid": {"Lx": 1, "Ly": 1, "nx": 32, "ny": 32},
    "model": {"chi": 1, "tau": 0, "source": {"kind": "none"}},
    "initial": {"kind": "gaussian", "center": [0.5, 0.5], "width": 0.05, "total_mass": 7}
  })");
  const Grid g = make_grid(c.grid);
  auto u = build_initial_u(c, g);
  CHECK(integrate(u) == doctest::Approx(7.0).epsilon(1e-13));
  CHECK(field_norms(u).min > 0.0);
  CHECK(field_norms(u).min <= 2e-8 * field_norms(u).linf_max);
}

TEST_CASE("file initial data") {
  const auto dir = std::filesystem::temp_directory_path() / "ksg_test_config_file";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "u0.txt");
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) f << (i == 0 ? "" : ", ") << 1 + i + 4 * j;
      f << "\n";
    }
  }
  const std::string doc = R"({
    "grid": {"Lx": 1, "Ly": 1, "nx": 4, "ny": 4},
    "model": {"chi": 1, "tau": 0, "source": {"kind": "none"}},
    "initial": {"kind": "file", "path": "u0.txt"}
  })";
  {
    std::ofstream f(dir / "cfg.json");
    f << doc;
  }
  auto c = load_config(dir / "cfg.json");
  auto u = build_initial_u(c, make_grid(c.grid));
  CHECK(u.at(0, 0) == 1.0);
  CHECK(u.at(3, 0) == 4.0);
  CHECK(u.at(0, 1) == 5.0);
  CHECK(u.at(3, 3) == 16.0);

  {
    std::ofstream f(dir / "u0.txt");
    f << "1 2 3\n";
  }
  CHECK_THROWS_AS(build_initial_u(c, make_grid(c.grid)), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("classifier scale follows the source equilibrium") {
  auto c = parse_config(replace(kMinimal, "\"K\": 1", "\"K\": 3"));
  CHECK(classifier_for(c).scale == 3.0);
  auto none = parse_config(replace(kMinimal, R"({"kind": "gompertz", "alpha": 1, "K": 1})", R"({"kind": "none"})"));
  CHECK(classifier_for(none).scale == 0.0);
}
