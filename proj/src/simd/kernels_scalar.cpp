#include <cstddef>

#include "ksg/simd/kernels.hpp"
#include "stencil_cell.hpp"

namespace ksg::simd {
namespace {

double dot_scalar(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = y[i] + alpha * x[i];
}

void xpby_scalar(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void shifted_laplacian_scalar(std::span<const double> w, std::span<double> out, std::size_t nx,
                              std::size_t ny, StencilCoeffs c) {
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = w.data() + j * nx;
    const double* south = j > 0 ? row - nx : row;
    const double* north = j + 1 < ny ? row + nx : row;
    double* dst = out.data() + j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      const double west = i > 0 ? row[i - 1] : row[i];
      const double east = i + 1 < nx ? row[i + 1] : row[i];
      dst[i] = detail::stencil_cell(row[i], west, east, south[i], north[i], c.shift, c.wx, c.wy);
    }
  }
}

const KernelTable kScalarTable{
    Backend::Scalar, dot_scalar, sum_scalar, axpy_scalar, xpby_scalar, shifted_laplacian_scalar,
};

}  // namespace

namespace detail {
const KernelTable& scalar_table() { return kScalarTable; }
}  // namespace detail

}  // namespace ksg::simd
