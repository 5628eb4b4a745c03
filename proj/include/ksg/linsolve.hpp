#pragma once

// Shifted five-point Laplacian (a I - b Lap_h) with mirror-ghost Neumann
// boundaries, solved matrix-free by Jacobi-preconditioned conjugate
// gradients.

#include <optional>

#include "ksg/mesh.hpp"

namespace ksg {

struct SolveSpec {
  double a = 1.0;         // mass shift, >= 0
  double b = 1.0;         // diffusion weight, > 0
  double rel_tol = 1e-10;
  long max_iter = 0;      // <= 0 selects 10 * (nx + ny)

  friend bool operator==(const SolveSpec&, const SolveSpec&) = default;
};

struct SolveStats {
  long iterations = 0;
  double rel_residual = 0.0;
};

// a*w - b*Lap_h(w).
ScalarField apply_operator(const ScalarField& w, double a, double b);

// Returns w with ||(a I - b Lap_h) w - rhs||_2 <= rel_tol ||rhs||_2 (plain
// l2 over cells). For a > 0 the result is additionally shifted by a constant
// so that a * sum(w) == sum(rhs) to rounding; this only removes the mean of
// the residual. For a == 0 the zero-mean solution is returned.
//
// Throws ConfigError for an invalid spec or a singular (a == 0) system whose
// right-hand side has non-zero mean, NumericalFailure(SolverDivergence) if
// the tolerance is not reached within max_iter.
ScalarField solve_shifted_poisson(const ScalarField& rhs, const SolveSpec& spec,
                                  const ScalarField* guess = nullptr, SolveStats* stats = nullptr);

long effective_max_iter(const SolveSpec& spec, const Grid& grid);

}  // namespace ksg
