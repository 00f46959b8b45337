#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "leibenson/errors.hpp"
#include "leibenson/maximal.hpp"

using namespace leibenson;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBall = 4.0 * kPi / 3.0;

}  // namespace

TEST_SUITE("maximal") {
  TEST_CASE("cap height and area") {
    const CapGeometry g{1.0, 2.0};
    CHECK(cap_height(g, 2.0) == doctest::Approx(0.75));
    CHECK(cap_area(g, 2.0) == doctest::Approx(1.5 * kPi));
    CHECK(cap_height(g, 1.0) == 0.0);
    CHECK(cap_height(g, 0.5) == 0.0);
    CHECK(cap_height(g, 3.0) == doctest::Approx(2.0));
    CHECK(cap_height(g, 7.0) == 2.0);
    CHECK(cap_area(g, 7.0) == doctest::Approx(4.0 * kPi));
    CHECK_THROWS_AS(cap_height(CapGeometry{1.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(cap_height(CapGeometry{0.0, 1.0}, 1.0), DomainError);
  }

  TEST_CASE("closed form reference values") {
    CHECK(maximal_surface_d3({1.0, 2.0}) == doctest::Approx(3.0 / (4.0 * std::sqrt(27.0))).epsilon(1e-14));
    CHECK(maximal_surface_d3({1.0, 10.0}) == doctest::Approx(3.0 / 1331.0).epsilon(1e-14));
    CHECK(maximal_surface({1.0, 2.0}, 3) == maximal_surface_d3({1.0, 2.0}));
    CHECK_THROWS_AS(maximal_surface({1.0, 2.0}, 2), DomainError);
    CHECK_THROWS_AS(maximal_surface_d3({1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(maximal_surface_d3({1.0, 0.0}), DomainError);
  }

  TEST_CASE("branches agree on the switching sphere") {
    const double x = (std::sqrt(3.0) + 1.0) / (std::sqrt(3.0) - 1.0);
    const double branch1 = 2.0 * kPi / (kBall * std::sqrt(27.0)) / (x * (x - 1.0));
    const double branch2 = 4.0 * kPi / (kBall * std::pow(x + 1.0, 3));
    CHECK(std::abs(branch1 - branch2) <= 1e-12 * branch1);
    CHECK(maximal_surface_d3({1.0, x}) == doctest::Approx(branch1).epsilon(1e-12));
    CHECK(maximal_surface_d3({1.0, x * (1 + 1e-9)}) == doctest::Approx(branch1).epsilon(1e-8));
    CHECK(maximal_surface_d3({1.0, x * (1 - 1e-9)}) == doctest::Approx(branch1).epsilon(1e-8));
  }

  TEST_CASE("brute force agrees with the closed form") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> radius(0.2, 5.0), ratio(0.05, 12.0);
    int branch_one = 0, branch_two = 0;
    for (int i = 0; i < 100; ++i) {
      const double R = radius(gen);
      double x = R * ratio(gen);
      if (std::abs(x - R) < 1e-3 * R) x = 1.5 * R;
      const CapGeometry g{R, x};
      const double exact = maximal_surface_d3(g);
      const BruteForceMaximum b = maximal_surface_bruteforce(g);
      CHECK(std::abs(b.value - exact) <= 1e-6 * exact);
      CHECK(b.value <= exact * (1.0 + 1e-10));
      const bool interior = std::sqrt(3.0) * std::abs(x - R) <= x + R;
      if (interior) {
        ++branch_one;
        CHECK(b.argmax == doctest::Approx(std::sqrt(3.0) * std::abs(x - R)).epsilon(1e-6));
      } else {
        ++branch_two;
      }
    }
    CHECK(branch_one > 10);
    CHECK(branch_two > 10);
  }

  TEST_CASE("supremum property and tail decay") {
    const CapGeometry g{1.3, 0.4};
    const double m = maximal_surface_d3(g);
    for (int i = 1; i <= 400; ++i) {
      const double r = 0.01 * i;
      CHECK(cap_area(g, r) / (kBall * r * r * r) <= m * (1.0 + 1e-12));
    }
    const double edge = g.sphere_radius + g.x_norm;
    const double a = cap_area(g, 1.5 * edge) / (kBall * std::pow(1.5 * edge, 3));
    const double b = cap_area(g, 3.0 * edge) / (kBall * std::pow(3.0 * edge, 3));
    CHECK(a / b == doctest::Approx(8.0).epsilon(1e-12));
  }

  TEST_CASE("homogeneity and the blow-up near the sphere") {
    for (double lambda : {0.1, 3.0, 17.0}) {
      for (CapGeometry g : {CapGeometry{1.0, 2.0}, CapGeometry{1.0, 10.0}, CapGeometry{2.0, 0.7}}) {
        const CapGeometry scaled{lambda * g.sphere_radius, lambda * g.x_norm};
        CHECK(maximal_surface_d3(scaled) ==
              doctest::Approx(maximal_surface_d3(g) / lambda).epsilon(1e-12));
      }
    }
    const double limit = 2.0 * kPi / (kBall * std::sqrt(27.0));
    for (double eps : {1e-3, 1e-6}) {
      const double x = 1.0 + eps;
      CHECK(maximal_surface_d3({1.0, x}) * x * (x - 1.0) == doctest::Approx(limit).epsilon(1e-12));
    }
  }
}
