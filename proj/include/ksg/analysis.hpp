#pragma once

// Numerical lower bound for the Gagliardo-Nirenberg constant of the
// interpolation inequality
//
//   ||w||_4 <= C (||grad w||_2^{1/2} ||w||_2^{1/2} + ||w||_2)
//
// on a rectangle (w plays the role of sqrt(u)), and the check of the
// boundedness conditions K > exp(-2/alpha), chi M <= 1 / (2 C^4).

#include <cstdint>

#include "ksg/mesh.hpp"
#include "ksg/stepper.hpp"

namespace ksg {

// ||w||_4 / (||grad w||^{1/2} ||w||^{1/2} + ||w||) with the discrete norms
// of the mesh module. Throws PreconditionError for negative entries or an
// identically zero field.
double gn_ratio(const ScalarField& w);

struct SearchBudget {
  long multistarts = 8;        // number of starting fields, constant first
  long ascent_iterations = 200;
};

struct GnEstimate {
  double c_gn_lower;  // best ratio found; a lower bound on the true constant
  ScalarField argmax_field;
  SearchBudget budget;
  long start_index;   // which start produced the best ratio
  long evaluations;
};

// Multistart projected gradient ascent on log Q. Starting fields, in order:
// constant, centred Gaussians of decreasing width, corner bumps, then seeded
// random smooth fields. Deterministic for a fixed seed and budget.
GnEstimate estimate_gn(const Grid& grid, const SearchBudget& budget, std::uint64_t seed);

// The i-th starting field of the multistart sequence (exposed for tests).
ScalarField gn_start_field(const Grid& grid, long index, std::uint64_t seed);

struct TheoremReport {
  double M = 0.0;
  double alpha = 0.0;
  double K = 0.0;
  double chi = 0.0;
  double c_gn_used = 0.0;
  bool c_gn_heuristic = true;  // false when the user supplied the constant
  bool cond_K = false;
  double margin_K = 0.0;       // K - exp(-2/alpha)
  bool cond_chiM = false;
  double margin_chiM = 0.0;    // 1/(2 c^4) - chi M
  bool overall = false;
  double c1 = 0.0;             // explicit part of the absorption constant
};

// Throws ConfigError for a non-Gompertz source, PreconditionError for
// non-positive inputs.
TheoremReport check_conditions(const ModelParams& params, double u0_mass, double area, double c_gn,
                               bool c_gn_heuristic = true);

}  // namespace ksg
