#include "ksg/linsolve.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "ksg/errors.hpp"
#include "ksg/simd/kernels.hpp"

namespace ksg {
namespace {

simd::StencilCoeffs coeffs_for(const Grid& g, double a, double b) {
  return {a, b / (g.hx() * g.hx()), b / (g.hy() * g.hy())};
}

void validate(const SolveSpec& spec) {
  if (!(spec.a >= 0.0) || !std::isfinite(spec.a)) throw ConfigError("solver: a must be >= 0");
  if (!(spec.b > 0.0) || !std::isfinite(spec.b)) throw ConfigError("solver: b must be > 0");
  if (!(spec.rel_tol > 0.0 && spec.rel_tol < 1.0)) {
    throw ConfigError("solver: rel_tol must lie in (0, 1)");
  }
}

std::vector<double> inverse_diagonal(const Grid& g, const simd::StencilCoeffs& c) {
  std::vector<double> inv(g.cells());
  for (std::size_t j = 0; j < g.ny(); ++j) {
    const double ny_faces = (j > 0 ? 1.0 : 0.0) + (j + 1 < g.ny() ? 1.0 : 0.0);
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double nx_faces = (i > 0 ? 1.0 : 0.0) + (i + 1 < g.nx() ? 1.0 : 0.0);
      inv[g.index(i, j)] = 1.0 / (c.shift + c.wx * nx_faces + c.wy * ny_faces);
    }
  }
  return inv;
}

}  // namespace

long effective_max_iter(const SolveSpec& spec, const Grid& grid) {
  if (spec.max_iter > 0) return spec.max_iter;
  return 10 * static_cast<long>(grid.nx() + grid.ny());
}

ScalarField apply_operator(const ScalarField& w, double a, double b) {
  ScalarField out(w.grid());
  simd::kernels().shifted_laplacian(w.values(), out.values(), w.grid().nx(), w.grid().ny(),
                                    coeffs_for(w.grid(), a, b));
  return out;
}

ScalarField solve_shifted_poisson(const ScalarField& rhs, const SolveSpec& spec,
                                  const ScalarField* guess, SolveStats* stats) {
  validate(spec);
  rhs.require_finite("solve_shifted_poisson rhs");
  const Grid& g = rhs.grid();
  const auto& k = simd::kernels();
  const auto n = static_cast<double>(g.cells());
  const simd::StencilCoeffs c = coeffs_for(g, spec.a, spec.b);

  const double rhs_norm = std::sqrt(k.dot(rhs.values(), rhs.values()));
  if (spec.a == 0.0) {
    const double mean = k.sum(rhs.values()) / n;
    if (std::abs(mean) > spec.rel_tol * rhs_norm) {
      throw ConfigError("solver: singular Neumann system (a = 0) needs a zero-mean right-hand side");
    }
  }

  ScalarField x = guess != nullptr ? *guess : ScalarField(g);
  if (guess != nullptr) require_same_grid(rhs, *guess, "solve_shifted_poisson guess");
  if (rhs_norm == 0.0) {
    if (stats != nullptr) *stats = {};
    return ScalarField(g);
  }

  const long max_iter = effective_max_iter(spec, g);
  const double target = spec.rel_tol * rhs_norm;
  const std::vector<double> inv_diag = inverse_diagonal(g, c);
  const std::size_t size = g.cells();

  std::vector<double> r(size), z(size), p(size), q(size);
  auto true_residual = [&] {
    k.shifted_laplacian(x.values(), q, g.nx(), g.ny(), c);
    for (std::size_t i = 0; i < size; ++i) r[i] = rhs[i] - q[i];
    return std::sqrt(k.dot(r, r));
  };

  long iter = 0;
  double res = true_residual();
  // The recurrence residual drifts from the true one; restart from the true
  // residual whenever the recurrence claims convergence.
  while (res > target && iter < max_iter) {
    for (std::size_t i = 0; i < size; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = k.dot(r, z);
    while (iter < max_iter) {
      k.shifted_laplacian(p, q, g.nx(), g.ny(), c);
      const double pq = k.dot(p, q);
      if (!(pq > 0.0)) break;
      const double step = rz / pq;
      k.axpy(step, p, x.values());
      k.axpy(-step, q, r);
      ++iter;
      if (std::sqrt(k.dot(r, r)) <= target) break;
      for (std::size_t i = 0; i < size; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = k.dot(r, z);
      k.xpby(z, rz_next / rz, p);
      rz = rz_next;
    }
    const double previous = res;
    res = true_residual();
    if (!(res < previous) && res > target) break;
  }

  if (stats != nullptr) *stats = {iter, res / rhs_norm};
  if (!(res <= target) || !std::isfinite(res)) {
    std::ostringstream msg;
    msg << "solver: no convergence after " << iter << " iterations, relative residual "
        << res / rhs_norm << " (target " << spec.rel_tol << ")";
    throw NumericalFailure(FailureKind::SolverDivergence, msg.str());
  }

  if (spec.a > 0.0) {
    const double shift = (k.sum(rhs.values()) - spec.a * k.sum(x.values())) / (spec.a * n);
    for (double& v : x.values()) v += shift;
  } else {
    const double mean = k.sum(x.values()) / n;
    for (double& v : x.values()) v -= mean;
  }
  return x;
}

}  // namespace ksg
