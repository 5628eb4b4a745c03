#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ksg/errors.hpp"
#include "ksg/kinetics.hpp"

using namespace ksg;

namespace {
constexpr double e = std::numbers::e;
}

TEST_CASE("source_eval examples") {
  CHECK(source_eval(Gompertz{1, 1}, 1.0) == 0.0);
  for (double alpha : {0.1, 1.0, 7.0})
    for (double K : {0.5, 2.0}) CHECK(source_eval(Gompertz{alpha, K}, 0.0) == 0.0);
  CHECK(source_eval(Gompertz{2, e}, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(source_eval(Logistic{2, 1}, 1.0) == 1.0);
  CHECK(source_eval(NoSource{}, 3.0) == 0.0);
}

TEST_CASE("SubLogistic matches the high-precision reference value") {
  // reference computed to 40 digits; s = e(e-1) makes ln(s+e) = 2 ln e
  const double s = 4.670774270471605;
  CHECK(source_eval(SubLogistic{1, 1}, s) == doctest::Approx(-26.80325158948474753).epsilon(1e-13));
}

TEST_CASE("source_eval rejects negative densities") {
  CHECK_THROWS_AS(source_eval(Gompertz{1, 1}, -1e-3), PreconditionError);
  CHECK_THROWS_AS(source_eval(Logistic{1, 1}, -2.0), PreconditionError);
}

TEST_CASE("validate names the offending coefficient") {
  auto message = [](const SourceKind& k) {
    try {
      validate(k);
    } catch (const ConfigError& err) {
      return std::string(err.what());
    }
    return std::string();
  };
  CHECK(message(Gompertz{1, 0}).find("K") != std::string::npos);
  CHECK(message(Gompertz{0, 1}).find("alpha") != std::string::npos);
  CHECK(message(Logistic{1, -1}).find("b") != std::string::npos);
  CHECK(message(Gompertz{1, 1}).empty());
  CHECK(message(NoSource{}).empty());
}

TEST_CASE("source_sup_bound examples") {
  CHECK(source_sup_bound(Gompertz{1, e}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(source_sup_bound(NoSource{}) == 0.0);
  CHECK(source_sup_bound(Logistic{2, 1}) == 1.0);
  // SubLogistic maxima from a 40-digit reference scan
  CHECK(source_sup_bound(SubLogistic{1, 1}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(source_sup_bound(SubLogistic{2, 0.1}) == doctest::Approx(9.454021153236670).epsilon(1e-10));
  CHECK(source_sup_bound(SubLogistic{3, 0.5}) == doctest::Approx(1.457614729591864).epsilon(1e-10));
}

TEST_CASE("mass_cap examples") {
  CHECK(mass_cap(2.0, Gompertz{1, 1}, 1.0).value() == 2.0);
  CHECK(mass_cap(0.5, Gompertz{1, 1}, 1.0).value() == 1.0);
  CHECK(mass_cap(3.0, Gompertz{1, 1.5}, 2.0).value() == 3.0);
  CHECK_FALSE(mass_cap(1.0, NoSource{}, 1.0).has_value());
}

TEST_CASE("equilibrium levels") {
  CHECK(equilibrium_level(Gompertz{1, 3}).value() == 3.0);
  CHECK(equilibrium_level(Logistic{2, 0.5}).value() == 4.0);
  CHECK(equilibrium_level(SubLogistic{2, 0.1}).value() == doctest::Approx(23.72678189016979).epsilon(1e-10));
  CHECK(equilibrium_level(SubLogistic{3, 0.5}).value() == doctest::Approx(3.741464100218914).epsilon(1e-10));
  CHECK_FALSE(equilibrium_level(SubLogistic{1, 1}).has_value());
  CHECK_FALSE(equilibrium_level(NoSource{}).has_value());
}

TEST_CASE("Gompertz sign pattern") {
  for (double K : {0.2, 1.0, 30.0}) {
    Gompertz g{1.3, K};
    for (double frac : {1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999}) CHECK(source_eval(g, frac * K) > 0.0);
    CHECK(source_eval(g, K) == 0.0);
    for (double frac : {1.001, 1.5, 10.0, 1e6}) CHECK(source_eval(g, frac * K) < 0.0);
  }
}

TEST_CASE("sources never exceed their sup bound") {
  const SourceKind kinds[] = {Gompertz{1, e}, Gompertz{0.3, 5}, Gompertz{4, 0.2}, Logistic{2, 1},
                              Logistic{0.5, 3}, SubLogistic{2, 0.1}, SubLogistic{3, 0.5},
                              SubLogistic{1, 1}};
  for (const auto& kind : kinds) {
    const double bound = source_sup_bound(kind);
    for (int k = -120; k <= 120; ++k) {
      const double s = std::pow(10.0, k / 10.0);
      CHECK(source_eval(kind, s) <= bound * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("damping strength ordering for large densities") {
  // with alpha = a and K = a/b, per-capita damping -f/s satisfies G < S < L beyond some s*
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.1}, std::pair{3.0, 0.5}}) {
    const SourceKind g = Gompertz{a, a / b};
    const SourceKind sl = SubLogistic{a, b};
    const SourceKind l = Logistic{a, b};
    double s_star = -1.0;
    for (int k = 0; k <= 140; ++k) {
      const double s = std::pow(10.0, k / 10.0);
      const double dg = -source_rate(g, s), ds = -source_rate(sl, s), dl = -source_rate(l, s);
      const bool ordered = dg < ds && ds < dl;
      if (!ordered) s_star = -1.0;
      else if (s_star < 0.0) s_star = s;
    }
    REQUIRE(s_star > 0.0);
    CHECK(s_star < 1e6);
  }
}
