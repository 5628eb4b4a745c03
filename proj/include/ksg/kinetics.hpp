#pragma once

// Kinetic source terms f(u) for the cell equation.

#include <optional>
#include <string_view>
#include <variant>

namespace ksg {

struct Gompertz {
  double alpha;  // intrinsic growth rate
  double K;      // carrying capacity
  friend bool operator==(const Gompertz&, const Gompertz&) = default;
};

// a s - b s^2
struct Logistic {
  double a;
  double b;
  friend bool operator==(const Logistic&, const Logistic&) = default;
};

// a s - b s^2 / ln(ln(s + e))
struct SubLogistic {
  double a;
  double b;
  friend bool operator==(const SubLogistic&, const SubLogistic&) = default;
};

struct NoSource {
  friend bool operator==(const NoSource&, const NoSource&) = default;
};

using SourceKind = std::variant<Gompertz, Logistic, SubLogistic, NoSource>;

std::string_view source_name(const SourceKind& kind);

// Throws ConfigError naming the offending coefficient.
void validate(const SourceKind& kind);

// f(s) for s >= 0, with f(0) = 0 for every kind. Throws PreconditionError
// for negative or non-finite s.
double source_eval(const SourceKind& kind, double s);

// Per-capita rate f(s)/s for s > 0. For s == 0 returns 0; the explicit
// reaction update u * (1 + dt * rate) leaves empty cells empty.
double source_rate(const SourceKind& kind, double s);

// sup_{s >= 0} f(s); +infinity when the scan finds no maximum.
double source_sup_bound(const SourceKind& kind);

// Positive zero of f, if any: K for Gompertz, a/b for Logistic, the root of
// a = b s / ln(ln(s + e)) for SubLogistic. nullopt for NoSource or when f
// has no positive equilibrium.
std::optional<double> equilibrium_level(const SourceKind& kind);

// max{u0_mass, K * area}; nullopt (not applicable) for non-Gompertz kinds.
std::optional<double> mass_cap(double u0_mass, const SourceKind& kind, double area);

}  // namespace ksg
