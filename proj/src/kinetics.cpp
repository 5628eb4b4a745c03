#include "ksg/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ksg/errors.hpp"

namespace ksg {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite_coeff(double value, const char* name) {
  if (!std::isfinite(value)) throw ConfigError(std::string("source: ") + name + " must be finite");
}

// Golden-section maximization of f on [lo, hi] in log-space.
double refine_max(const SourceKind& kind, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  auto f = [&](double t) { return source_eval(kind, std::exp(t)); };
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

std::string_view source_name(const SourceKind& kind) {
  return std::visit(Overloaded{
                        [](const Gompertz&) { return std::string_view("gompertz"); },
                        [](const Logistic&) { return std::string_view("logistic"); },
                        [](const SubLogistic&) { return std::string_view("sublogistic"); },
                        [](const NoSource&) { return std::string_view("none"); },
                    },
                    kind);
}

void validate(const SourceKind& kind) {
  std::visit(Overloaded{
                 [](const Gompertz& g) {
                   require_finite_coeff(g.alpha, "alpha");
                   require_finite_coeff(g.K, "K");
                   if (!(g.alpha > 0.0)) throw ConfigError("source: alpha must be positive");
                   if (!(g.K > 0.0)) throw ConfigError("source: K must be positive");
                 },
                 [](const Logistic& l) {
                   require_finite_coeff(l.a, "a");
                   require_finite_coeff(l.b, "b");
                   if (!(l.b > 0.0)) throw ConfigError("source: b must be positive");
                 },
                 [](const SubLogistic& l) {
                   require_finite_coeff(l.a, "a");
                   require_finite_coeff(l.b, "b");
                   if (!(l.b > 0.0)) throw ConfigError("source: b must be positive");
                 },
                 [](const NoSource&) {},
             },
             kind);
}

double source_eval(const SourceKind& kind, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw PreconditionError("source_eval: argument must be finite and non-negative");
  }
  if (s == 0.0) return 0.0;
  return s * source_rate(kind, s);
}

double source_rate(const SourceKind& kind, double s) {
  if (s == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [s](const Gompertz& g) { return g.alpha * (std::log(g.K) - std::log(s)); },
                        [s](const Logistic& l) { return l.a - l.b * s; },
                        [s](const SubLogistic& l) {
                          return l.a - l.b * s / std::log1p(std::log1p(s / std::numbers::e));
                        },
                        [](const NoSource&) { return 0.0; },
                    },
                    kind);
}

double source_sup_bound(const SourceKind& kind) {
  return std::visit(
      Overloaded{
          [](const Gompertz& g) { return g.alpha * g.K / std::numbers::e; },
          [](const Logistic& l) { return l.a > 0.0 ? l.a * l.a / (4.0 * l.b) : 0.0; },
          [&kind](const SubLogistic&) {
            // Log-spaced scan over [1e-12, 1e12], then golden-section refinement
            // around the best sample. f(0) = 0 is always a candidate.
            constexpr int kSamples = 2400;
            constexpr double kLo = -12.0;
            constexpr double kHi = 12.0;
            double best = 0.0;
            int best_k = -1;
            for (int k = 0; k <= kSamples; ++k) {
              const double s = std::pow(10.0, kLo + (kHi - kLo) * k / kSamples);
              const double f = source_eval(kind, s);
              if (f > best) {
                best = f;
                best_k = k;
              }
            }
            if (best_k < 0) return 0.0;
            if (best_k == kSamples) return std::numeric_limits<double>::infinity();
            const double lo = std::pow(10.0, kLo + (kHi - kLo) * std::max(best_k - 1, 0) / kSamples);
            const double hi = std::pow(10.0, kLo + (kHi - kLo) * (best_k + 1) / kSamples);
            return std::max(best, refine_max(kind, lo, hi));
          },
          [](const NoSource&) { return 0.0; },
      },
      kind);
}

std::optional<double> equilibrium_level(const SourceKind& kind) {
  return std::visit(
      Overloaded{
          [](const Gompertz& g) -> std::optional<double> { return g.K; },
          [](const Logistic& l) -> std::optional<double> {
            if (l.a > 0.0) return l.a / l.b;
            return std::nullopt;
          },
          [&kind](const SubLogistic&) -> std::optional<double> {
            // rate(s) decreases from a - b e to -infinity; bisect on the sign change.
            double lo = 1e-12;
            double hi = 1.0;
            if (source_rate(kind, lo) <= 0.0) return std::nullopt;
            while (source_rate(kind, hi) > 0.0) {
              hi *= 2.0;
              if (hi > 1e300) return std::nullopt;
            }
            for (int it = 0; it < 200; ++it) {
              const double mid = 0.5 * (lo + hi);
              (source_rate(kind, mid) > 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
          },
          [](const NoSource&) -> std::optional<double> { return std::nullopt; },
      },
      kind);
}

std::optional<double> mass_cap(double u0_mass, const SourceKind& kind, double area) {
  const auto* g = std::get_if<Gompertz>(&kind);
  if (g == nullptr) return std::nullopt;
  if (!(u0_mass > 0.0) || !(area > 0.0)) {
    throw PreconditionError("mass_cap: u0_mass and area must be positive");
  }
  return std::max(u0_mass, g->K * area);
}

}  // namespace ksg
