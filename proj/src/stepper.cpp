#include "ksg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ksg/diagnostics.hpp"
#include "ksg/errors.hpp"

namespace ksg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolveSpec with_coeffs(const SolveSpec& base, double a, double b) {
  SolveSpec s = base;
  s.a = a;
  s.b = b;
  return s;
}

ScalarField elliptic_signal(const ScalarField& u, const ScalarField* guess, const SolveSpec& solver) {
  return solve_shifted_poisson(u, with_coeffs(solver, 1.0, 1.0), guess);
}

void require_nonnegative(const ScalarField& u, const char* stage, double t) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] < 0.0) {
      std::ostringstream msg;
      msg << stage << ": negative density " << u[k] << " at cell " << k << " (t = " << t << ")";
      throw NumericalFailure(FailureKind::PositivityLoss, msg.str());
    }
  }
}

TerminationKind termination_for(FailureKind kind) {
  switch (kind) {
    case FailureKind::DtCollapse:
      return TerminationKind::DtCollapse;
    case FailureKind::PositivityLoss:
      return TerminationKind::PositivityLoss;
    case FailureKind::SolverDivergence:
    case FailureKind::NonFinite:
      return TerminationKind::SolverFailure;
  }
  return TerminationKind::SolverFailure;
}

}  // namespace

std::string_view to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::CompletedHorizon:
      return "CompletedHorizon";
    case TerminationKind::DtCollapse:
      return "DtCollapse";
    case TerminationKind::PositivityLoss:
      return "PositivityLoss";
    case TerminationKind::SolverFailure:
      return "SolverFailure";
    case TerminationKind::LinfOverflow:
      return "LinfOverflow";
  }
  return "Unknown";
}

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::NonFinite:
      return "non-finite";
    case FailureKind::PositivityLoss:
      return "positivity-loss";
    case FailureKind::SolverDivergence:
      return "solver-divergence";
    case FailureKind::DtCollapse:
      return "dt-collapse";
  }
  return "unknown";
}

void validate(const ModelParams& params) {
  if (!(params.chi > 0.0) || !std::isfinite(params.chi)) {
    throw ConfigError("model: chi must be positive and finite");
  }
  if (params.tau != 0 && params.tau != 1) {
    throw ConfigError("model: tau must be 0 or 1, got " + std::to_string(params.tau));
  }
  validate(params.source);
}

void validate(const StepControl& c) {
  if (!(c.t_end > 0.0)) throw ConfigError("time: t_end must be positive");
  if (!(c.dt_min > 0.0)) throw ConfigError("time: dt_min must be positive");
  if (!(c.dt_min <= c.dt_init)) throw ConfigError("time: dt_init must be >= dt_min");
  if (!(c.dt_init <= c.dt_max)) throw ConfigError("time: dt_max must be >= dt_init");
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) {
    throw ConfigError("time: cfl_safety must lie in (0, 1]");
  }
  if (c.record_every < 0.0) throw ConfigError("time: record_every must be >= 0");
  if (c.record_every_steps < 0) throw ConfigError("time: record_every_steps must be >= 0");
  if (!(c.overflow_factor > 1.0)) throw ConfigError("time: overflow_factor must exceed 1");
}

ScalarField chemotactic_divergence(const ScalarField& u, const ScalarField& v, double chi) {
  require_same_grid(u, v, "chemotactic_divergence");
  const Grid& g = u.grid();
  const std::size_t nx = g.nx();
  const std::size_t ny = g.ny();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();

  // Face fluxes chi * u_donor * dv/h; fx holds the face east of (i, j),
  // fy the face north of (i, j). Boundary faces carry no flux.
  std::vector<double> fx(nx * ny, 0.0);
  std::vector<double> fy(nx * ny, 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (i + 1 < nx) {
        const double vel = chi * (v[k + 1] - v[k]) * ihx;
        fx[k] = vel * (vel > 0.0 ? u[k] : u[k + 1]);
      }
      if (j + 1 < ny) {
        const double vel = chi * (v[k + nx] - v[k]) * ihy;
        fy[k] = vel * (vel > 0.0 ? u[k] : u[k + nx]);
      }
    }
  }

  ScalarField out(g);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      const double east = fx[k];
      const double west = i > 0 ? fx[k - 1] : 0.0;
      const double north = fy[k];
      const double south = j > 0 ? fy[k - nx] : 0.0;
      out[k] = -((east - west) * ihx + (north - south) * ihy);
    }
  }
  return out;
}

ExplicitBounds explicit_bounds(const ScalarField& u, const ScalarField& v, const ModelParams& params) {
  require_same_grid(u, v, "explicit_bounds");
  const Grid& g = u.grid();
  const std::size_t nx = g.nx();
  const std::size_t ny = g.ny();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();

  std::vector<double> outflow(g.cells(), 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (i + 1 < nx) {
        const double vel = params.chi * (v[k + 1] - v[k]) * ihx;
        outflow[vel > 0.0 ? k : k + 1] += std::abs(vel) * ihx;
      }
      if (j + 1 < ny) {
        const double vel = params.chi * (v[k + nx] - v[k]) * ihy;
        outflow[vel > 0.0 ? k : k + nx] += std::abs(vel) * ihy;
      }
    }
  }
  const double max_out = *std::max_element(outflow.begin(), outflow.end());

  double max_rate = 0.0;
  for (double s : u.values()) {
    if (s > 0.0) max_rate = std::max(max_rate, std::abs(source_rate(params.source, s)));
  }
  return {max_out > 0.0 ? 1.0 / max_out : kInf, max_rate > 0.0 ? 0.5 / max_rate : kInf};
}

double stable_dt(const State& state, const ModelParams& params, const StepControl& control) {
  const ExplicitBounds b = explicit_bounds(state.u, state.v, params);
  const double inv = 1.0 / b.advective + 1.0 / b.reaction;
  double dt = inv > 0.0 ? control.cfl_safety / inv : kInf;
  dt = std::min(dt, control.dt_max);
  if (dt < control.dt_min) {
    std::ostringstream msg;
    msg << "stable time step " << dt << " below dt_min " << control.dt_min << " at t = " << state.t;
    throw NumericalFailure(FailureKind::DtCollapse, msg.str());
  }
  return dt;
}

ScalarField advance_signal(const State& state, const ModelParams& params, double dt,
                           const SolveSpec& solver) {
  if (params.tau == 0) return elliptic_signal(state.u, &state.v, solver);
  // ((1 + dt) I - dt Lap) v_new = v + dt u
  ScalarField rhs = state.v;
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += dt * state.u[k];
  return solve_shifted_poisson(rhs, with_coeffs(solver, 1.0 + dt, dt), &state.v);
}

State step_with_signal(const State& state, const ScalarField& signal, const ModelParams& params,
                       double dt, const SolveSpec& solver) {
  const ScalarField adv = chemotactic_divergence(state.u, signal, params.chi);
  ScalarField explicit_u = state.u;
  for (std::size_t k = 0; k < explicit_u.size(); ++k) {
    const double u = state.u[k];
    explicit_u[k] = u + dt * (adv[k] + u * source_rate(params.source, u));
  }
  explicit_u.require_finite("explicit update");
  require_nonnegative(explicit_u, "explicit update", state.t);

  ScalarField u_new = solve_shifted_poisson(explicit_u, with_coeffs(solver, 1.0, dt), &explicit_u);
  u_new.require_finite("diffusion solve");
  require_nonnegative(u_new, "diffusion solve", state.t);

  ScalarField v_new = params.tau == 0 ? elliptic_signal(u_new, &signal, solver) : signal;
  v_new.require_finite("signal");
  return State{std::move(u_new), std::move(v_new), state.t + dt};
}

State step(const State& state, const ModelParams& params, double dt, const SolveSpec& solver) {
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  require_same_grid(state.u, state.v, "step");
  const ScalarField signal = advance_signal(state, params, dt, solver);
  return step_with_signal(state, signal, params, dt, solver);
}

State make_initial_state(ScalarField u0, const ScalarField* v0, const ModelParams& params,
                         const SolveSpec& solver) {
  u0.require_finite("initial u");
  require_nonnegative(u0, "initial u", 0.0);
  if (params.tau == 0) {
    ScalarField v = elliptic_signal(u0, &u0, solver);
    return State{std::move(u0), std::move(v), 0.0};
  }
  if (v0 == nullptr) throw ConfigError("initial: tau = 1 requires v0");
  require_same_grid(u0, *v0, "initial state");
  v0->require_finite("initial v");
  if (*std::min_element(v0->values().begin(), v0->values().end()) < 0.0) {
    throw ConfigError("initial: v0 must be non-negative");
  }
  return State{std::move(u0), *v0, 0.0};
}

double overflow_threshold(const ScalarField& u0, const ModelParams& params, const StepControl& control) {
  double scale = field_norms(u0).linf_max;
  if (auto eq = equilibrium_level(params.source)) scale = std::max(scale, *eq);
  return control.overflow_factor * scale;
}

SimulationResult simulate(const SimulationInput& input, const StepObserver& observer) {
  validate(input.params);
  validate(input.control);
  const StepControl& ctl = input.control;
  const ModelParams& params = input.params;

  SimulationResult result{{}, {}, make_initial_state(input.u0, input.v0 ? &*input.v0 : nullptr,
                                                     params, input.solver),
                          0};
  State& state = result.final_state;
  const double overflow = overflow_threshold(state.u, params, ctl);

  result.series.push_back(make_record(state, params, 0.0));
  double next_record = ctl.record_every;
  double last_dt = 0.0;
  bool last_recorded = true;

  auto terminate = [&](TerminationKind kind, std::string detail) {
    if (!last_recorded) result.series.push_back(make_record(state, params, last_dt));
    result.status = {kind, state.t, std::move(detail)};
    return result;
  };

  const double t_eps = 1e-12 * ctl.t_end;
  try {
    while (state.t < ctl.t_end - t_eps) {
      double dt = stable_dt(state, params, ctl);
      if (result.steps == 0) dt = std::min(dt, ctl.dt_init);
      dt = std::min(dt, ctl.t_end - state.t);

      ScalarField signal = advance_signal(state, params, dt, input.solver);
      if (params.tau == 1) {
        // The advective limit must hold for the signal actually used.
        for (int attempt = 0; attempt < 8; ++attempt) {
          State probe{state.u, signal, state.t};
          const double allowed = stable_dt(probe, params, ctl);
          if (dt <= allowed) break;
          dt = allowed;
          signal = advance_signal(state, params, dt, input.solver);
        }
      }

      state = step_with_signal(state, signal, params, dt, input.solver);
      ++result.steps;
      last_dt = dt;
      last_recorded = false;
      if (observer) observer(state, dt);

      const double u_max = field_norms(state.u).linf_max;
      if (u_max > overflow) {
        std::ostringstream msg;
        msg << "max u = " << u_max << " exceeded threshold " << overflow;
        return terminate(TerminationKind::LinfOverflow, msg.str());
      }

      bool record = false;
      if (ctl.record_every_steps > 0) {
        record = result.steps % ctl.record_every_steps == 0;
      } else if (ctl.record_every <= 0.0) {
        record = true;
      } else if (state.t >= next_record - t_eps) {
        record = true;
        while (next_record <= state.t + t_eps) next_record += ctl.record_every;
      }
      if (record) {
        result.series.push_back(make_record(state, params, dt));
        last_recorded = true;
      }
    }
  } catch (const NumericalFailure& failure) {
    return terminate(termination_for(failure.kind()), failure.what());
  }
  return terminate(TerminationKind::CompletedHorizon, "");
}

}  // namespace ksg
