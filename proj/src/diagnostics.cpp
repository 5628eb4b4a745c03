#include "ksg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ksg/errors.hpp"

namespace ksg {

double entropy(const ScalarField& u) {
  double acc = 0.0;
  for (double s : u.values()) {
    if (s < 0.0) throw PreconditionError("entropy: negative density");
    if (s > 0.0) acc += s * std::log(s);
  }
  return u.grid().cell_area() * acc;
}

double lyapunov_F(const ScalarField& u, const ScalarField& v, double chi, int tau) {
  const double i1 = entropy(u);
  if (tau == 0) return i1;
  return i1 + static_cast<double>(tau) * (chi / 2.0) * gradient_energy(v);
}

double mass_envelope(double z0, double alpha, double K, double area, double t) {
  if (!(z0 > 0.0) || !(alpha > 0.0) || !(K * area > 0.0)) {
    throw PreconditionError("mass_envelope: z0, alpha and K*area must be positive");
  }
  const double cap = K * area;
  return cap * std::exp(std::log(z0 / cap) * std::exp(-alpha * t));
}

double absorption_constant_c1(double M, double alpha, double K, double area) {
  return M * (alpha * std::log(K) + 2.0) / (4.0 * alpha) + alpha * area * K / std::numbers::e;
}

DiagnosticsRecord make_record(const State& state, const ModelParams& params, double dt_used) {
  DiagnosticsRecord r;
  r.t = state.t;
  r.dt_used = dt_used;
  r.mass = integrate(state.u);
  r.entropy = entropy(state.u);
  r.grad_v_energy = gradient_energy(state.v);
  r.lyapunov_F = r.entropy + params.tau * (params.chi / 2.0) * r.grad_v_energy;
  const FieldNorms un = field_norms(state.u);
  r.u_max = un.linf_max;
  r.u_min = un.min;
  r.u_l2 = un.l2;
  r.v_max = field_norms(state.v).linf_max;
  r.v_mass = integrate(state.v);
  return r;
}

std::string verdict_name(const RunVerdict& verdict) {
  if (std::holds_alternative<Bounded>(verdict)) return "Bounded";
  if (std::holds_alternative<BlowupSuspect>(verdict)) return "BlowupSuspect";
  return "Inconclusive";
}

namespace {

// Least-squares slope of ln(u_max) against t over the records with
// t >= t_from.
double terminal_log_slope(const DiagnosticsSeries& series, double t_from) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int n = 0;
  for (const auto& r : series) {
    if (r.t < t_from || !(r.u_max > 0.0)) continue;
    const double y = std::log(r.u_max);
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * stt - st * st;
  if (!(den > 0.0)) return 0.0;
  return (n * sty - st * sy) / den;
}

}  // namespace

RunVerdict classify(const DiagnosticsSeries& series, const TerminationStatus& status,
                    const ClassifierConfig& config) {
  if (series.empty()) throw PreconditionError("classify: empty series");
  switch (status.kind) {
    case TerminationKind::DtCollapse:
      return BlowupSuspect{BlowupReason::DtCollapse, status.t_event};
    case TerminationKind::LinfOverflow:
      return BlowupSuspect{BlowupReason::LinfOverflow, status.t_event};
    case TerminationKind::PositivityLoss:
    case TerminationKind::SolverFailure:
      return Inconclusive{"numerical failure: " + std::string(to_string(status.kind))};
    case TerminationKind::CompletedHorizon:
      break;
  }

  const double t0 = series.front().t;
  const double t1 = series.back().t;
  const double half = t0 + 0.5 * (t1 - t0);
  const double quarter = t0 + 0.75 * (t1 - t0);

  double sup_linf = 0.0;
  double sup_F = -std::numeric_limits<double>::infinity();
  double late_linf = 0.0;
  for (const auto& r : series) {
    sup_linf = std::max(sup_linf, r.u_max);
    sup_F = std::max(sup_F, r.lyapunov_F);
    if (r.t >= half) late_linf = std::max(late_linf, r.u_max);
  }

  const double limit = config.bounded_factor * std::max(series.front().u_max, config.scale);
  if (late_linf > limit) {
    return Inconclusive{"u_max in the second half exceeds bounded_factor times the initial scale"};
  }
  const double growth = terminal_log_slope(series, quarter) * (t1 - quarter);
  if (growth > config.terminal_growth_tol) {
    return Inconclusive{"u_max still growing at the end of the horizon"};
  }
  return Bounded{sup_linf, sup_F};
}

}  // namespace ksg
