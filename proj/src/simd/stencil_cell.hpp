#pragma once

// Shared per-cell formula so the scalar and vector paths agree bit for bit.
// A mirrored neighbour equals the centre value, so its difference is an
// exact zero.

namespace ksg::simd::detail {

inline double stencil_cell(double c, double west, double east, double south, double north,
                           double shift, double wx, double wy) {
  const double lx = (west - c) + (east - c);
  const double ly = (south - c) + (north - c);
  return shift * c - (wx * lx + wy * ly);
}

}  // namespace ksg::simd::detail
