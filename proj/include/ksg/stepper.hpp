#pragma once

// IMEX time integration of the chemotaxis-growth system
//
//   u_t = Lap u - chi div(u grad v) + f(u)
//   tau v_t = Lap v - v + u,             tau in {0, 1}
//
// with homogeneous Neumann data. Per step: the signal v is obtained first
// (elliptic solve for tau = 0, one implicit Euler step for tau = 1), then u
// takes an explicit donor-cell advection + explicit reaction update
// followed by an implicit diffusion solve.

#include <functional>
#include <optional>

#include "ksg/kinetics.hpp"
#include "ksg/linsolve.hpp"
#include "ksg/mesh.hpp"
#include "ksg/series.hpp"

namespace ksg {

struct ModelParams {
  double chi = 1.0;
  int tau = 0;
  SourceKind source = NoSource{};

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Throws ConfigError naming the offending field.
void validate(const ModelParams& params);

struct State {
  ScalarField u;
  ScalarField v;
  double t = 0.0;
};

struct StepControl {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  double cfl_safety = 0.5;
  double record_every = 0.0;   // time between records; 0 records every step
  long record_every_steps = 0; // when > 0, overrides record_every
  double overflow_factor = 1e6;

  friend bool operator==(const StepControl&, const StepControl&) = default;
};

void validate(const StepControl& control);

// -(1/h) * sum of donor-cell face fluxes chi * u_upwind * (dv/h). Boundary
// fluxes vanish, so the result integrates to zero up to rounding.
ScalarField chemotactic_divergence(const ScalarField& u, const ScalarField& v, double chi);

struct ExplicitBounds {
  double advective;  // 1 / max over cells of the donor-cell outflow rate
  double reaction;   // 0.5 / max |f(u)/u|
};

// Component limits before safety and clamping; +infinity where a term is
// absent.
ExplicitBounds explicit_bounds(const ScalarField& u, const ScalarField& v, const ModelParams& params);

// cfl_safety / (1/advective + 1/reaction), clamped to dt_max. Throws
// NumericalFailure(DtCollapse) if the result is below dt_min.
double stable_dt(const State& state, const ModelParams& params, const StepControl& control);

// The signal used by a step of size dt from `state`.
ScalarField advance_signal(const State& state, const ModelParams& params, double dt,
                           const SolveSpec& solver);

// One IMEX step. For tau = 0 the returned v solves the elliptic equation
// for the returned u. Throws NumericalFailure on positivity loss, non-finite
// values or solver failure.
State step(const State& state, const ModelParams& params, double dt, const SolveSpec& solver);

// Same as step() with a precomputed signal from advance_signal().
State step_with_signal(const State& state, const ScalarField& signal, const ModelParams& params,
                       double dt, const SolveSpec& solver);

// For tau = 0, solves the elliptic equation for v. For tau = 1 checks v0.
State make_initial_state(ScalarField u0, const ScalarField* v0, const ModelParams& params,
                         const SolveSpec& solver);

struct SimulationInput {
  ScalarField u0;
  std::optional<ScalarField> v0;
  ModelParams params;
  StepControl control;
  SolveSpec solver;
};

struct SimulationResult {
  DiagnosticsSeries series;
  TerminationStatus status;
  State final_state;
  long steps = 0;
};

// Optional hook called after every accepted step.
using StepObserver = std::function<void(const State&, double dt)>;

SimulationResult simulate(const SimulationInput& input, const StepObserver& observer = {});

// Threshold for LinfOverflow: overflow_factor * max(||u0||_inf, equilibrium).
double overflow_threshold(const ScalarField& u0, const ModelParams& params, const StepControl& control);

}  // namespace ksg
