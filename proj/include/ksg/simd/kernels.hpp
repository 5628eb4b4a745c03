#pragma once

// Data-parallel inner loops used by the solver and the stepper.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from the CPU
// features; set KSG_SIMD=scalar|avx2 in the environment to force one.
//
// Elementwise kernels produce bit-identical results across backends (no
// fused multiply-add, same operation order). Reductions may differ in the
// last bits because the vector variant accumulates in four lanes.

#include <cstddef>
#include <span>
#include <string_view>

namespace ksg::simd {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

struct StencilCoeffs {
  double shift;  // a
  double wx;     // b / hx^2
  double wy;     // b / hy^2
};

struct KernelTable {
  Backend backend;

  double (*dot)(std::span<const double> x, std::span<const double> y);
  double (*sum)(std::span<const double> x);
  // y <- y + alpha * x
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // y <- x + beta * y
  void (*xpby)(std::span<const double> x, double beta, std::span<double> y);
  // out <- a*w - b*Lap_h(w), five-point stencil, mirror ghosts, row-major
  // by y then x.
  void (*shifted_laplacian)(std::span<const double> w, std::span<double> out,
                            std::size_t nx, std::size_t ny, StencilCoeffs c);
};

bool backend_available(Backend backend);

// Throws std::invalid_argument if the backend is not available here.
const KernelTable& kernels(Backend backend);

// Runtime-selected table.
const KernelTable& kernels();

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace ksg::simd
