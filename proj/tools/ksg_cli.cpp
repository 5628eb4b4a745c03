// Command-line front end: run | sweep | check | estimate-gn.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ksg/analysis.hpp"
#include "ksg/errors.hpp"
#include "ksg/run.hpp"
#include "ksg/sweep.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel chemotaxis simulator with Gompertz growth"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ksg::kVersion);

  std::string config_path;
  std::string out_dir;
  bool fail_on_blowup = false;
  auto* run = app.add_subcommand("run", "Simulate one configuration");
  run->add_option("--config", config_path, "JSON configuration file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--fail-on-blowup", fail_on_blowup, "Exit with 3 when blow-up is suspected");

  long jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "JSON sweep file")->required();
  sweep->add_option("--out", out_dir, "Output root")->required();
  sweep->add_option("--jobs", jobs, "Concurrent runs (default: value in the sweep file)");

  std::optional<double> gn_constant;
  auto* check = app.add_subcommand("check", "Evaluate the boundedness conditions for a configuration");
  check->add_option("--config", config_path, "JSON configuration file")->required();
  check->add_option("--gn-constant", gn_constant, "Use this Gagliardo-Nirenberg constant");

  double lx = 1.0, ly = 1.0;
  long nx = 32, ny = 32, budget = 8, iterations = 200;
  std::uint64_t seed = 0;
  auto* gn = app.add_subcommand("estimate-gn", "Estimate the Gagliardo-Nirenberg constant");
  gn->add_option("--lx", lx)->required();
  gn->add_option("--ly", ly)->required();
  gn->add_option("--nx", nx)->required();
  gn->add_option("--ny", ny)->required();
  gn->add_option("--budget", budget, "Number of multistarts")->required();
  gn->add_option("--seed", seed)->required();
  gn->add_option("--iterations", iterations, "Ascent iterations per start");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ksg::kExitConfigError;
  }

  try {
    if (*run) return ksg::run_command(config_path, out_dir, fail_on_blowup, std::cerr);
    if (*sweep) return ksg::sweep_command(config_path, out_dir, jobs, std::cerr);
    if (*check) return ksg::check_command(config_path, gn_constant, std::cout, std::cerr);
    if (*gn) {
      const ksg::Grid grid = ksg::build_grid(lx, ly, nx, ny);
      if (budget < 1) throw ksg::ConfigError("estimate-gn: --budget must be >= 1");
      const auto est = ksg::estimate_gn(grid, {budget, iterations}, seed);
      std::cout << ksg::gn_estimate_json(est, seed) << "\n";
      return ksg::kExitSuccess;
    }
  } catch (const ksg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return ksg::kExitConfigError;
  } catch (const ksg::PreconditionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return ksg::kExitConfigError;
  } catch (const ksg::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return ksg::kExitNumericalFailure;
  }
  return ksg::kExitConfigError;
}
