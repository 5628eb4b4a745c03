#pragma once

// Functionals monitored along trajectories, the closed-form mass envelope
// and the finite-horizon run classifier.

#include <variant>

#include "ksg/mesh.hpp"
#include "ksg/series.hpp"
#include "ksg/stepper.hpp"

namespace ksg {

// hx*hy*sum u ln u with 0 ln 0 = 0. Throws PreconditionError on negative
// entries.
double entropy(const ScalarField& u);

// entropy(u) + tau * (chi / 2) * gradient_energy(v).
double lyapunov_F(const ScalarField& u, const ScalarField& v, double chi, int tau);

// Solution of z' = alpha z ln(K area / z), z(0) = z0:
//   z(t) = K area exp(ln(z0 / (K area)) exp(-alpha t)).
double mass_envelope(double z0, double alpha, double K, double area, double t);

// c1 = M (alpha ln K + 2) / (4 alpha) + alpha area K / e, the explicit part
// of the absorption constant. Logged for reference only.
double absorption_constant_c1(double M, double alpha, double K, double area);

DiagnosticsRecord make_record(const State& state, const ModelParams& params, double dt_used);

struct ClassifierConfig {
  double bounded_factor = 10.0;
  // Reference level next to u_max(0), e.g. the carrying capacity. 0 = none.
  double scale = 0.0;
  // Inconclusive when the least-squares slope of ln(u_max) over the last
  // quarter of the record, times the window length, exceeds this.
  double terminal_growth_tol = 0.05;

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

enum class BlowupReason { DtCollapse, LinfOverflow };

struct Bounded {
  double sup_linf;
  double sup_F;
};

struct BlowupSuspect {
  BlowupReason reason;
  double t_event;
};

struct Inconclusive {
  std::string note;
};

using RunVerdict = std::variant<Bounded, BlowupSuspect, Inconclusive>;

std::string verdict_name(const RunVerdict& verdict);

// Throws PreconditionError on an empty series.
RunVerdict classify(const DiagnosticsSeries& series, const TerminationStatus& status,
                    const ClassifierConfig& config);

}  // namespace ksg
