#pragma once

// Run configuration: JSON documents describing grid, model, initial data,
// time control, solver and classifier settings. The schema is documented in
// the configuration section of README.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ksg/analysis.hpp"
#include "ksg/diagnostics.hpp"
#include "ksg/linsolve.hpp"
#include "ksg/stepper.hpp"

namespace ksg {

struct GridSpec {
  double lx = 1.0;
  double ly = 1.0;
  long nx = 32;
  long ny = 32;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct UniformInit {
  double value;
  friend bool operator==(const UniformInit&, const UniformInit&) = default;
};

struct GaussianInit {
  double cx;
  double cy;
  double width;
  double total_mass;
  friend bool operator==(const GaussianInit&, const GaussianInit&) = default;
};

struct SumOfGaussiansInit {
  std::vector<GaussianInit> bumps;
  friend bool operator==(const SumOfGaussiansInit&, const SumOfGaussiansInit&) = default;
};

// Whitespace- or comma-separated cell values, row-major by y then x.
struct FileInit {
  std::string path;
  friend bool operator==(const FileInit&, const FileInit&) = default;
};

using InitialSpec = std::variant<UniformInit, GaussianInit, SumOfGaussiansInit, FileInit>;

struct AnalysisSpec {
  std::optional<double> gn_constant;  // user-supplied constant overrides the estimate
  SearchBudget budget{};
  friend bool operator==(const AnalysisSpec& a, const AnalysisSpec& b) {
    return a.gn_constant == b.gn_constant && a.budget.multistarts == b.budget.multistarts &&
           a.budget.ascent_iterations == b.budget.ascent_iterations;
  }
};

struct SimConfig {
  GridSpec grid;
  ModelParams model;
  InitialSpec initial = UniformInit{1.0};
  double initial_floor = 1e-8;  // relative to the peak of Gaussian data
  std::optional<InitialSpec> v0;
  StepControl control;
  SolveSpec solver;
  ClassifierConfig classifier;
  AnalysisSpec analysis;
  std::uint64_t seed = 0;
  std::string output;

  // Non-fatal notes from parsing (e.g. v0 ignored for tau = 0).
  std::vector<std::string> warnings;

  friend bool operator==(const SimConfig& a, const SimConfig& b) {
    return a.grid == b.grid && a.model == b.model && a.initial == b.initial &&
           a.initial_floor == b.initial_floor && a.v0 == b.v0 && a.control == b.control &&
           a.solver == b.solver && a.classifier == b.classifier && a.analysis == b.analysis &&
           a.seed == b.seed && a.output == b.output;
  }
};

// Parses and validates. Relative file paths in the document are resolved
// against base_dir. Throws ConfigError (syntax errors carry line/column).
SimConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
SimConfig load_config(const std::filesystem::path& path);

// Pretty-printed JSON with every default filled in.
std::string render_config(const SimConfig& config);

// Throws ConfigError naming the offending field.
void validate(const SimConfig& config);

Grid make_grid(const GridSpec& spec);

// Builds u0 (strictly positive) and, for tau = 1, v0.
ScalarField build_initial_u(const SimConfig& config, const Grid& grid);
std::optional<ScalarField> build_initial_v(const SimConfig& config, const Grid& grid);

SimulationInput make_simulation_input(const SimConfig& config);

// Carrying-capacity-like reference level for the classifier.
ClassifierConfig classifier_for(const SimConfig& config);

// Convenience: build the input and run it.
SimulationResult simulate(const SimConfig& config, const StepObserver& observer = {});

}  // namespace ksg
