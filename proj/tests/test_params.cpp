#include <cmath>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "doctest.h"
#include "leibenson/errors.hpp"
#include "leibenson/field.hpp"
#include "leibenson/params.hpp"
#include "leibenson/quadrature.hpp"

using namespace leibenson;

namespace {

// Mass of w(t, ·) for a trial constant C, by radial quadrature.
double mass_for(const LeibensonParams& base, double c, double t) {
  LeibensonParams p = base;
  p.c_norm = c;
  const RadialProfile prof(p);
  const double area = unit_sphere_area(p.d);
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-14;
  return integrate_radial([&](double r) { return area * prof.w(t, r) * std::pow(r, p.d - 1); },
                          0.0, prof.support_radius(t), o)
      .value;
}

double root_solved_c(const LeibensonParams& p, double t) {
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      [&](double c) { return mass_for(p, c, t) - 1.0; }, 1e-3 * p.c_norm, 1e3 * p.c_norm,
      boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("derived constants of the p-Laplace case d=2 p=3 q=1") {
    const LeibensonParams p = derive_constants(2, 3.0, 1.0);
    CHECK(p.beta == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.kappa == doctest::Approx(1.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-14));
    // 30-digit reference value of C.
    CHECK(p.c_norm == doctest::Approx(0.497920716492079111).epsilon(1e-13));
  }

  TEST_CASE("derived constants of the porous-medium case d=2 p=2 q=2") {
    const LeibensonParams p = derive_constants(2, 2.0, 2.0);
    CHECK(p.beta == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.kappa == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    // Porous medium m=2 in d=2: C = 1/sqrt(8π) (classical closed form).
    CHECK(p.c_norm == doctest::Approx(1.0 / std::sqrt(8.0 * M_PI)).epsilon(1e-13));
  }

  TEST_CASE("reference values of C in other dimensions") {
    CHECK(derive_constants(3, 3.0, 2.0).c_norm == doctest::Approx(0.184627595985854424).epsilon(1e-13));
    CHECK(derive_constants(3, 1.8, 3.0).c_norm == doctest::Approx(0.0509540636467630964).epsilon(1e-13));
    CHECK(derive_constants(1, 3.0, 1.0).c_norm == doctest::Approx(0.664693216105934370).epsilon(1e-13));
    CHECK(derive_constants(3, 1.5, 3.0).c_norm == doctest::Approx(0.0767764776602967732).epsilon(1e-13));
  }

  TEST_CASE("invalid exponents are rejected with the violated condition") {
    CHECK_THROWS_AS(derive_constants(2, 2.0, 1.0), RegimeError);
    try {
      derive_constants(2, 2.0, 1.0);
    } catch (const RegimeError& e) {
      CHECK(std::string(e.what()).find("q(p-1) > 1") != std::string::npos);
    }
    CHECK_THROWS_AS(derive_constants(2, 1.0, 3.0), DomainError);
    CHECK_THROWS_AS(derive_constants(2, 3.0, 0.0), DomainError);
    CHECK_THROWS_AS(derive_constants(0, 3.0, 1.0), DomainError);
  }

  TEST_CASE("closed-form C agrees with a root solve of the mass integral") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> up(1.2, 4.0);
    for (int i = 0; i < 8; ++i) {
      const int d = 1 + i % 3;
      const double p = up(gen);
      const double q = (1.0 + 0.1 + 2.0 * std::uniform_real_distribution<double>(0, 1)(gen)) / (p - 1.0);
      const LeibensonParams params = derive_constants(d, p, q);
      for (double t : {0.5, 2.0}) {
        CHECK(root_solved_c(params, t) == doctest::Approx(params.c_norm).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("exponent identities hold on a random grid") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const int d = 1 + i % 3;
      const double p = 1.05 + 4.0 * u(gen);
      const double q = (1.0 + 1e-3 + 3.0 * u(gen)) / (p - 1.0);
      const LeibensonParams c = derive_constants(d, p, q);
      CHECK(std::abs((c.gamma - 1.0) * (p - 2.0) + c.gamma * (q - 1.0) * (p - 1.0) - 1.0) <= 1e-12);
      CHECK(std::abs((p - 1.0) * (c.gamma * q - 1.0) - c.gamma) <= 1e-12 * c.gamma);
      CHECK(c.beta > p);
      CHECK(c.gamma > 0.0);
      CHECK(c.kappa > 0.0);
    }
  }

  TEST_CASE("regime classification examples") {
    const RegimeReport a = classify_regime(2, 3.0, 1.0);
    CHECK(a.barenblatt_ok);
    CHECK(a.superposition_ok);
    CHECK(a.markov_ok);
    CHECK(a.strong_solution_ok);
    CHECK(a.uniqueness_i_ok);
    CHECK(a.uniqueness_ii_ok);

    const RegimeReport b = classify_regime(2, 1.9, 1.1);  // q(p-1) = 0.99
    CHECK_FALSE(b.barenblatt_ok);
    CHECK_FALSE(b.superposition_ok);
    CHECK_FALSE(b.markov_ok);
    CHECK_FALSE(b.strong_solution_ok);
    CHECK_FALSE(b.uniqueness_i_ok);
    CHECK_FALSE(b.uniqueness_ii_ok);

    // p = d/(d-1) exactly: every predicate needing the strict bound is false.
    const RegimeReport c = classify_regime(3, 1.5, 3.0);
    CHECK(c.barenblatt_ok);
    CHECK(c.superposition_ok);
    CHECK_FALSE(c.strong_solution_ok);
    CHECK_FALSE(c.markov_ok);

    // Boundary of the slow-diffusion regime is excluded.
    CHECK_FALSE(classify_regime(2, 2.0, 1.0).barenblatt_ok);
    CHECK_FALSE(classify_regime(1, 3.0, 1.0).markov_ok);
  }

  TEST_CASE("regime invariants") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const int d = 1 + i % 4;
      const double p = 1.01 + 4.0 * u(gen);
      const double q = 0.05 + 4.0 * u(gen);
      const RegimeReport r = classify_regime(d, p, q);
      CHECK(r.strong_solution_ok == r.uniqueness_ii_ok);
      if (p > 2.0) {
        const bool expected = d >= 2 && p > static_cast<double>(d) / (d - 1) && q * (p - 1.0) > 1.0;
        CHECK(r.markov_ok == expected);
      }
      if (r.strong_solution_ok) CHECK(classify_regime(d, p, q + 0.5).strong_solution_ok);
    }
  }
}
