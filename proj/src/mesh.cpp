#include "ksg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksg/errors.hpp"
#include "ksg/simd/kernels.hpp"

namespace ksg {

Grid build_grid(double lx, double ly, long nx, long ny) {
  if (!(lx > 0.0) || !std::isfinite(lx)) throw ConfigError("grid: Lx must be positive and finite");
  if (!(ly > 0.0) || !std::isfinite(ly)) throw ConfigError("grid: Ly must be positive and finite");
  if (nx < 3) throw ConfigError("grid: nx must be at least 3, got " + std::to_string(nx));
  if (ny < 3) throw ConfigError("grid: ny must be at least 3, got " + std::to_string(ny));
  return Grid(lx, ly, static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.cells(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells()) {
    throw PreconditionError("ScalarField: expected " + std::to_string(grid_.cells()) +
                            " values, got " + std::to_string(values_.size()));
  }
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ScalarField::require_finite(const char* context) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw NumericalFailure(FailureKind::NonFinite, std::string(context) +
                                                         ": non-finite value at cell " +
                                                         std::to_string(k));
    }
  }
}

ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn) {
  ScalarField w(grid);
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) w.at(i, j) = fn(grid.x_center(i), grid.y_center(j));
  }
  return w;
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* context) {
  if (!(a.grid() == b.grid())) throw PreconditionError(std::string(context) + ": grid mismatch");
}

double integrate(const ScalarField& w) {
  return w.grid().cell_area() * simd::kernels().sum(w.values());
}

double gradient_energy(const ScalarField& w) {
  const Grid& g = w.grid();
  const std::size_t nx = g.nx();
  const std::size_t ny = g.ny();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  double acc = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double c = w.at(i, j);
      if (i + 1 < nx) {
        const double d = (w.at(i + 1, j) - c) * ihx;
        acc += d * d;
      }
      if (j + 1 < ny) {
        const double d = (w.at(i, j + 1) - c) * ihy;
        acc += d * d;
      }
    }
  }
  return g.cell_area() * acc;
}

FieldNorms field_norms(const ScalarField& w) {
  const auto vals = w.values();
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const double l2 = std::sqrt(w.grid().cell_area() * simd::kernels().dot(vals, vals));
  return {*hi, *lo, l2};
}

}  // namespace ksg
