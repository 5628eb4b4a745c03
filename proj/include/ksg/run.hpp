#pragma once

// Single-run orchestration and persistence.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ksg/analysis.hpp"
#include "ksg/config.hpp"
#include "ksg/diagnostics.hpp"

namespace ksg {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfigError = 1,
  kExitNumericalFailure = 2,
  kExitBlowup = 3,
};

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kDiagnosticsHeader =
    "t,dt,mass,entropy,grad_v_energy,F,u_max,u_min,u_l2,v_max";

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

void write_diagnostics_csv(std::ostream& out, const DiagnosticsSeries& series);

struct GnChoice {
  double value;
  bool heuristic;                    // true when estimated
  std::optional<GnEstimate> estimate;
};

// User override if present, otherwise a fresh estimate on the run grid.
GnChoice choose_gn_constant(const SimConfig& config);

struct RunOutcome {
  SimulationResult sim;
  RunVerdict verdict;
  std::optional<TheoremReport> theorem;  // Gompertz sources only
  std::optional<GnEstimate> gn_estimate;
  double mass0 = 0.0;
  double sup_mass = 0.0;
  double sup_F = 0.0;
  double sup_umax = 0.0;
  double wall_s = 0.0;
};

// Runs the simulation, the classifier and (for Gompertz) the condition
// check. `gn_hint` skips the estimate when the caller already has one.
RunOutcome execute_run(const SimConfig& config, const std::optional<GnChoice>& gn_hint = std::nullopt);

int exit_code_for(const RunOutcome& outcome, bool fail_on_blowup);

// Writes manifest.json, diagnostics.csv, theorem_report.json and
// verdict.json into dir (created if needed). Throws std::runtime_error on
// I/O failure.
void write_run_artifacts(const SimConfig& config, const RunOutcome& outcome,
                         const std::filesystem::path& dir);

// Machine-readable failure record (failure.json); best effort.
void write_failure_record(const std::filesystem::path& dir, int exit_code, const std::string& kind,
                          const std::string& message);

// `run` subcommand. Messages go to `log`.
int run_command(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                bool fail_on_blowup, std::ostream& log);

// `check` subcommand: prints the condition report as JSON.
int check_command(const std::filesystem::path& config_path, std::optional<double> gn_constant,
                  std::ostream& out, std::ostream& log);

std::string theorem_report_json(const TheoremReport& report, const std::optional<GnEstimate>& estimate,
                                double u0_mass);

std::string gn_estimate_json(const GnEstimate& estimate, std::uint64_t seed);

}  // namespace ksg
