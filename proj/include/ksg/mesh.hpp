#pragma once

// Uniform cell-centred rectangle mesh with homogeneous Neumann boundaries.
//
// Cell (i, j) has centre ((i + 1/2) hx, (j + 1/2) hy) and lives at index
// j * nx + i. Boundary treatment uses mirror ghost cells: the ghost value
// equals the adjacent interior value, so every boundary-normal face
// difference is exactly zero.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ksg {

class Grid {
 public:
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t cells() const noexcept { return nx_ * ny_; }
  double hx() const noexcept { return lx_ / static_cast<double>(nx_); }
  double hy() const noexcept { return ly_ / static_cast<double>(ny_); }
  double h_min() const noexcept { return hx() < hy() ? hx() : hy(); }
  double cell_area() const noexcept { return hx() * hy(); }
  double area() const noexcept { return lx_ * ly_; }

  double x_center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * hx(); }
  double y_center(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * hy(); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(double lx, double ly, std::size_t nx, std::size_t ny) : lx_(lx), ly_(ly), nx_(nx), ny_(ny) {}
  friend Grid build_grid(double lx, double ly, long nx, long ny);

  double lx_;
  double ly_;
  std::size_t nx_;
  std::size_t ny_;
};

// Throws ConfigError unless lx, ly > 0 and nx, ny >= 3.
Grid build_grid(double lx, double ly, long nx, long ny);

// One value per cell.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double fill = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  double& at(std::size_t i, std::size_t j) noexcept { return values_[grid_.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[grid_.index(i, j)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const noexcept;
  // Throws NumericalFailure(NonFinite) naming `context` if any entry is NaN/Inf.
  void require_finite(const char* context) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Samples fn(x, y) at cell centres.
ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* context);

// Midpoint quadrature hx*hy*sum(w).
double integrate(const ScalarField& w);

// hx*hy * sum over interior faces of (face difference / spacing)^2.
double gradient_energy(const ScalarField& w);

struct FieldNorms {
  double linf_max;
  double min;
  double l2;
};

FieldNorms field_norms(const ScalarField& w);

}  // namespace ksg
