#include "ksg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <variant>

#include "ksg/diagnostics.hpp"
#include "ksg/errors.hpp"
#include "ksg/linsolve.hpp"
#include "ksg/simd/kernels.hpp"

namespace ksg {
namespace {

struct GnParts {
  double s4;  // integral of w^4
  double g;   // integral of |grad w|^2
  double p;   // integral of w^2
};

GnParts gn_parts(const ScalarField& w) {
  double s4 = 0.0;
  for (double x : w.values()) s4 += (x * x) * (x * x);
  const double dA = w.grid().cell_area();
  return {dA * s4, gradient_energy(w), dA * simd::kernels().dot(w.values(), w.values())};
}

double log_ratio(const GnParts& q) {
  return 0.25 * std::log(q.s4) - std::log(std::pow(q.g * q.p, 0.25) + std::sqrt(q.p));
}

bool nonzero(const ScalarField& w) {
  return std::any_of(w.values().begin(), w.values().end(), [](double x) { return x > 0.0; });
}

// Gradient of log Q with respect to the cell values. Returns false where
// the gradient energy vanishes (log Q is not differentiable there).
bool log_ratio_gradient(const ScalarField& w, const GnParts& q, ScalarField& grad) {
  if (!(q.g > 1e-300)) return false;
  const double dA = w.grid().cell_area();
  const ScalarField neg_lap = apply_operator(w, 0.0, 1.0);
  const double gp = q.g * q.p;
  const double d = std::pow(gp, 0.25) + std::sqrt(q.p);
  const double c_root = 0.25 * std::pow(gp, -0.75);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double x = w[k];
    const double ds4 = 4.0 * dA * x * x * x;
    const double dg = 2.0 * dA * neg_lap[k];
    const double dp = 2.0 * dA * x;
    const double dd = c_root * (q.p * dg + q.g * dp) + 0.5 * dp / std::sqrt(q.p);
    grad[k] = 0.25 * ds4 / q.s4 - dd / d;
  }
  return true;
}

struct AscentResult {
  ScalarField field;
  double ratio;
  long evaluations;
};

AscentResult ascend(ScalarField w, long max_iter) {
  GnParts parts = gn_parts(w);
  double value = log_ratio(parts);
  long evals = 1;
  ScalarField grad(w.grid());
  ScalarField trial(w.grid());
  double step = 0.1;

  for (long it = 0; it < max_iter; ++it) {
    if (!log_ratio_gradient(w, parts, grad)) break;
    const auto gv = grad.values();
    const double gmax = std::abs(*std::max_element(gv.begin(), gv.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    }));
    if (!(gmax > 0.0)) break;
    const double wmax = *std::max_element(w.values().begin(), w.values().end());
    const double scale = wmax / gmax;

    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t k = 0; k < w.size(); ++k) trial[k] = std::max(0.0, w[k] + step * scale * grad[k]);
      if (nonzero(trial)) {
        const GnParts tp = gn_parts(trial);
        ++evals;
        const double tv = log_ratio(tp);
        if (std::isfinite(tv) && tv > value) {
          const double improvement = tv - value;
          std::swap(w, trial);
          parts = tp;
          value = tv;
          accepted = true;
          step = std::min(2.0 * step, 1.0);
          if (improvement < 1e-10 * std::abs(value) + 1e-300) it = max_iter;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    // Q is scale invariant; keep the iterate at unit L2 norm.
    const double norm = std::sqrt(parts.p);
    for (double& x : w.values()) x /= norm;
    parts = gn_parts(w);
    value = log_ratio(parts);
  }
  return {std::move(w), std::exp(value), evals};
}

double gaussian(double x, double y, double cx, double cy, double sigma) {
  const double dx = x - cx;
  const double dy = y - cy;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

}  // namespace

double gn_ratio(const ScalarField& w) {
  for (double x : w.values()) {
    if (x < 0.0 || !std::isfinite(x)) throw PreconditionError("gn_ratio: field must be finite and >= 0");
  }
  if (!nonzero(w)) throw PreconditionError("gn_ratio: field is identically zero");
  return std::exp(log_ratio(gn_parts(w)));
}

ScalarField gn_start_field(const Grid& grid, long index, std::uint64_t seed) {
  const double lx = grid.lx();
  const double ly = grid.ly();
  const double lmin = std::min(lx, ly);
  if (index == 0) return ScalarField(grid, 1.0);
  if (index <= 3) {
    const double sigma = lmin * 0.25 / static_cast<double>(1L << (index - 1));
    return sample(grid, [&](double x, double y) { return gaussian(x, y, lx / 2, ly / 2, sigma); });
  }
  if (index <= 7) {
    const double cx = (index - 4) % 2 == 0 ? 0.0 : lx;
    const double cy = (index - 4) / 2 == 0 ? 0.0 : ly;
    return sample(grid, [&](double x, double y) { return gaussian(x, y, cx, cy, 0.15 * lmin); });
  }

  // Random smooth field: square of a random low-frequency cosine series.
  // Mixing the index into the seed keeps start i independent of the budget.
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index)));
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kModes = 5;
  double coeff[kModes][kModes];
  for (auto& row : coeff) {
    for (double& c : row) c = normal(rng);
  }
  const double pi = std::numbers::pi;
  ScalarField w = sample(grid, [&](double x, double y) {
    double s = 0.0;
    for (int a = 0; a < kModes; ++a) {
      for (int b = 0; b < kModes; ++b) {
        s += coeff[a][b] / (1.0 + a * a + b * b) * std::cos(a * pi * x / lx) * std::cos(b * pi * y / ly);
      }
    }
    return s * s;
  });
  if (!nonzero(w)) return ScalarField(grid, 1.0);
  return w;
}

GnEstimate estimate_gn(const Grid& grid, const SearchBudget& budget, std::uint64_t seed) {
  if (budget.multistarts < 1) throw PreconditionError("estimate_gn: need at least one multistart");
  if (budget.ascent_iterations < 0) throw PreconditionError("estimate_gn: negative iteration budget");

  GnEstimate best{0.0, ScalarField(grid), budget, -1, 0};
  for (long s = 0; s < budget.multistarts; ++s) {
    ScalarField start = gn_start_field(grid, s, seed);
    const double start_ratio = gn_ratio(start);
    ++best.evaluations;
    if (start_ratio > best.c_gn_lower) {
      best.c_gn_lower = start_ratio;
      best.argmax_field = start;
      best.start_index = s;
    }
    AscentResult r = ascend(std::move(start), budget.ascent_iterations);
    best.evaluations += r.evaluations;
    if (r.ratio > best.c_gn_lower) {
      best.c_gn_lower = r.ratio;
      best.argmax_field = std::move(r.field);
      best.start_index = s;
    }
  }
  return best;
}

TheoremReport check_conditions(const ModelParams& params, double u0_mass, double area, double c_gn,
                               bool c_gn_heuristic) {
  const auto* g = std::get_if<Gompertz>(&params.source);
  if (g == nullptr) throw ConfigError("check: theorem conditions apply to the Gompertz source only");
  if (!(u0_mass > 0.0) || !(area > 0.0) || !(c_gn > 0.0) || !(params.chi > 0.0)) {
    throw PreconditionError("check_conditions: inputs must be positive");
  }
  TheoremReport r;
  r.M = *mass_cap(u0_mass, params.source, area);
  r.alpha = g->alpha;
  r.K = g->K;
  r.chi = params.chi;
  r.c_gn_used = c_gn;
  r.c_gn_heuristic = c_gn_heuristic;
  const double k_threshold = std::exp(-2.0 / g->alpha);
  r.cond_K = g->K > k_threshold;
  r.margin_K = g->K - k_threshold;
  const double chi_m_limit = 1.0 / (2.0 * std::pow(c_gn, 4));
  r.cond_chiM = params.chi * r.M <= chi_m_limit;
  r.margin_chiM = chi_m_limit - params.chi * r.M;
  r.overall = r.cond_K && r.cond_chiM;
  r.c1 = absorption_constant_c1(r.M, g->alpha, g->K, area);
  return r;
}

}  // namespace ksg
