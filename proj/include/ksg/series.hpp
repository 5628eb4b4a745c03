#pragma once

// Types shared by the stepper (which produces them) and the diagnostics
// (which evaluates them).

#include <string>
#include <string_view>
#include <vector>

namespace ksg {

struct DiagnosticsRecord {
  double t = 0.0;
  double dt_used = 0.0;
  double mass = 0.0;           // integral of u
  double entropy = 0.0;        // integral of u ln u, 0 ln 0 = 0
  double grad_v_energy = 0.0;  // integral of |grad v|^2
  double lyapunov_F = 0.0;     // entropy + tau (chi/2) grad_v_energy
  double u_max = 0.0;
  double u_min = 0.0;
  double u_l2 = 0.0;
  double v_max = 0.0;
  double v_mass = 0.0;  // integral of v; not part of the CSV schema
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

enum class TerminationKind { CompletedHorizon, DtCollapse, PositivityLoss, SolverFailure, LinfOverflow };

std::string_view to_string(TerminationKind kind);

struct TerminationStatus {
  TerminationKind kind = TerminationKind::CompletedHorizon;
  double t_event = 0.0;
  std::string detail;
};

}  // namespace ksg
