#pragma once

// Parameter sweeps: cross products over a base configuration, executed on
// a fixed-size worker pool, one subdirectory per run.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ksg/config.hpp"

namespace ksg {

struct SweepAxis {
  // chi | alpha | K | total_mass | nx | ny | tau
  std::string param;
  std::vector<double> values;
};

struct SweepConfig {
  SimConfig base;
  std::vector<SweepAxis> axes;
  long jobs = 1;
  long max_runs = 10000;
};

inline constexpr const char* kSweepHeader =
    "run_id,chi,alpha,K,mass0,nx,cond_K,cond_chiM,verdict,sup_mass,sup_F,sup_umax,status,wall_s";

SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

// Sets one swept parameter on a configuration. Throws ConfigError for an
// unknown parameter or one that does not apply to the base (e.g. alpha on
// a non-Gompertz source).
void apply_parameter(SimConfig& config, const std::string& param, double value);

// Cross product in row-major order (last axis fastest). Each entry lists
// (param, value) pairs.
std::vector<std::vector<std::pair<std::string, double>>> expand_axes(const SweepConfig& sweep);

// Stable identifier (hex FNV-1a of the canonical parameter string).
std::string run_id_for(const std::vector<std::pair<std::string, double>>& point);

struct SweepRow {
  std::string run_id;
  double chi = 0.0;
  std::string alpha;  // empty for non-Gompertz sources
  std::string K;
  double mass0 = 0.0;
  long nx = 0;
  std::string cond_K;     // true | false | NA
  std::string cond_chiM;  // true | false | NA
  std::string verdict;
  double sup_mass = 0.0;
  double sup_F = 0.0;
  double sup_umax = 0.0;
  std::string status;
  double wall_s = 0.0;
  bool failed = false;
};

std::string format_row(const SweepRow& row);

struct SweepResult {
  std::vector<SweepRow> rows;  // in cross-product order
  long failures = 0;
  long resumed = 0;
};

// Executes every point (skipping points whose directory already holds a
// completed result) and writes summary.csv under out_root.
SweepResult run_sweep(const SweepConfig& sweep, const std::filesystem::path& out_root, long jobs);

// `sweep` subcommand.
int sweep_command(const std::filesystem::path& config_path, const std::filesystem::path& out_root,
                  long jobs, std::ostream& log);

}  // namespace ksg
