#include <immintrin.h>

#include <cstddef>

#include "ksg/simd/kernels.hpp"
#include "stencil_cell.hpp"

namespace ksg::simd {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4])));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_avx2(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(&x[i]));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(&x[i + 4]));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(&y[i]);
    _mm256_storeu_pd(&y[i], _mm256_add_pd(yv, _mm256_mul_pd(a, _mm256_loadu_pd(&x[i]))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void xpby_avx2(std::span<const double> x, double beta, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d b = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(&y[i]);
    _mm256_storeu_pd(&y[i], _mm256_add_pd(_mm256_loadu_pd(&x[i]), _mm256_mul_pd(b, yv)));
  }
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void shifted_laplacian_avx2(std::span<const double> w, std::span<double> out, std::size_t nx,
                            std::size_t ny, StencilCoeffs c) {
  const __m256d shift = _mm256_set1_pd(c.shift);
  const __m256d wx = _mm256_set1_pd(c.wx);
  const __m256d wy = _mm256_set1_pd(c.wy);
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = w.data() + j * nx;
    const double* south = j > 0 ? row - nx : row;
    const double* north = j + 1 < ny ? row + nx : row;
    double* dst = out.data() + j * nx;

    auto cell = [&](std::size_t i) {
      const double west = i > 0 ? row[i - 1] : row[i];
      const double east = i + 1 < nx ? row[i + 1] : row[i];
      dst[i] = detail::stencil_cell(row[i], west, east, south[i], north[i], c.shift, c.wx, c.wy);
    };

    cell(0);
    std::size_t i = 1;
    for (; i + 4 < nx; i += 4) {
      const __m256d ctr = _mm256_loadu_pd(row + i);
      const __m256d lx = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(row + i - 1), ctr),
                                       _mm256_sub_pd(_mm256_loadu_pd(row + i + 1), ctr));
      const __m256d ly = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(south + i), ctr),
                                       _mm256_sub_pd(_mm256_loadu_pd(north + i), ctr));
      const __m256d lap = _mm256_add_pd(_mm256_mul_pd(wx, lx), _mm256_mul_pd(wy, ly));
      _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_mul_pd(shift, ctr), lap));
    }
    for (; i < nx; ++i) cell(i);
  }
}

const KernelTable kAvx2Table{
    Backend::Avx2, dot_avx2, sum_avx2, axpy_avx2, xpby_avx2, shifted_laplacian_avx2,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2Table; }
}  // namespace detail

}  // namespace ksg::simd
