#include <cmath>
#include <vector>

#include "doctest.h"
#include "leibenson/certificates.hpp"
#include "leibenson/errors.hpp"
#include "leibenson/field.hpp"

using namespace leibenson;

TEST_SUITE("certificates") {
  TEST_CASE("superposition integrals match the reference values") {
    const SuperpositionCertificates c = certify_superposition(derive_constants(2, 3.0, 1.0), 1.0, 1e-10);
    CHECK(c.sp_int_1.converged);
    CHECK(c.sp_int_2.converged);
    CHECK(c.sp_int_1.value == doctest::Approx(0.340426883219625431790).epsilon(1e-9));
    CHECK(c.sp_int_2.value == doctest::Approx(0.407328174487364061945).epsilon(1e-9));
  }

  TEST_CASE("lemma integrals match the reference values") {
    const LemmaCertificates c = certify_lemma_bounds(derive_constants(2, 3.0, 1.0), 1.0, 1.0, 1e-10);
    CHECK(c.lemma62_bound.converged);
    CHECK(c.lemma65_weighted.converged);
    CHECK(c.lemma62_bound.value == doctest::Approx(4.5655028232501965623).epsilon(1e-9));
    CHECK(c.lemma65_weighted.value == doctest::Approx(7.3111518322197661991).epsilon(1e-9));
  }

  TEST_CASE("empty time interval gives zero") {
    const LeibensonParams params = derive_constants(2, 3.0, 1.0);
    const SuperpositionCertificates s = certify_superposition(params, 0.0, 1e-10);
    CHECK(s.sp_int_1.value == 0.0);
    CHECK(s.sp_int_2.value == 0.0);
    const LemmaCertificates l = certify_lemma_bounds(params, 1.0, 0.0, 1e-10);
    CHECK(l.lemma62_bound.value == 0.0);
    CHECK(l.lemma65_weighted.value == 0.0);
  }

  TEST_CASE("certificates grow with T and stay nonnegative") {
    const LeibensonParams params = derive_constants(3, 3.0, 2.0);
    double prev1 = 0.0, prev2 = 0.0, prev62 = 0.0, prev65 = 0.0;
    for (double T : {0.25, 0.5, 1.0}) {
      const SuperpositionCertificates s = certify_superposition(params, T, 1e-9);
      const LemmaCertificates l = certify_lemma_bounds(params, 0.5, T, 1e-9);
      CHECK(s.sp_int_1.value > prev1);
      CHECK(s.sp_int_2.value > prev2);
      CHECK(l.lemma62_bound.value > prev62);
      CHECK(l.lemma65_weighted.value > prev65);
      prev1 = s.sp_int_1.value;
      prev2 = s.sp_int_2.value;
      prev62 = l.lemma62_bound.value;
      prev65 = l.lemma65_weighted.value;
    }
  }

  TEST_CASE("regime gates") {
    CHECK_THROWS_AS(certify_lemma_bounds(derive_constants(2, 2.0, 2.0), 1.0, 1.0, 1e-8), RegimeError);
    CHECK_THROWS_AS(certify_lemma_bounds(derive_constants(2, 3.0, 1.0), 0.0, 1.0, 1e-8), DomainError);
    // p <= (1+d)/d violates the superposition gate.
    CHECK_THROWS_AS(certify_superposition(derive_constants(3, 1.3, 4.0), 1.0, 1e-8), RegimeError);
    CHECK_NOTHROW(certify_superposition(derive_constants(3, 1.8, 3.0), 0.5, 1e-6));
  }

  TEST_CASE("halving the tolerance moves converged values within the error estimates") {
    for (auto [d, p, q] : {std::tuple{2, 3.0, 1.0}, std::tuple{2, 2.0, 2.0}}) {
      const LeibensonParams params = derive_constants(d, p, q);
      const SuperpositionCertificates a = certify_superposition(params, 1.0, 2e-8);
      const SuperpositionCertificates b = certify_superposition(params, 1.0, 1e-8);
      CHECK(std::abs(a.sp_int_1.value - b.sp_int_1.value) <=
            a.sp_int_1.abs_error_estimate + b.sp_int_1.abs_error_estimate + 1e-15);
      CHECK(std::abs(a.sp_int_2.value - b.sp_int_2.value) <=
            a.sp_int_2.abs_error_estimate + b.sp_int_2.abs_error_estimate + 1e-15);
    }
    const LeibensonParams params = derive_constants(2, 3.0, 1.0);
    const LemmaCertificates a = certify_lemma_bounds(params, 1.0, 1.0, 2e-8);
    const LemmaCertificates b = certify_lemma_bounds(params, 1.0, 1.0, 1e-8);
    CHECK(std::abs(a.lemma62_bound.value - b.lemma62_bound.value) <=
          a.lemma62_bound.abs_error_estimate + b.lemma62_bound.abs_error_estimate + 1e-15);
    CHECK(std::abs(a.lemma65_weighted.value - b.lemma65_weighted.value) <=
          a.lemma65_weighted.abs_error_estimate + b.lemma65_weighted.abs_error_estimate + 1e-15);
  }

  TEST_CASE("inner integrals scale with the predicted power of time") {
    for (auto [d, p, q] : {std::tuple{2, 3.0, 1.0}, std::tuple{2, 2.0, 2.0}, std::tuple{3, 3.0, 2.0}}) {
      const LeibensonParams params = derive_constants(d, p, q);
      const double t1 = 0.01, t2 = 1.0;
      const double slope1 = std::log(sp_int_1_inner(params, t2).value / sp_int_1_inner(params, t1).value) /
                            std::log(t2 / t1);
      const double slope2 = std::log(sp_int_2_inner(params, t2).value / sp_int_2_inner(params, t1).value) /
                            std::log(t2 / t1);
      CHECK(std::abs(slope1 - sp_int_1_time_exponent(params)) <= 0.02);
      CHECK(std::abs(slope2 - sp_int_2_time_exponent(params)) <= 0.02);
      CHECK(sp_int_1_time_exponent(params) > -1.0);
      CHECK(sp_int_2_time_exponent(params) > -1.0);
    }
  }

  TEST_CASE("dyadic cutoffs have a geometric tail") {
    for (auto [d, p, q] : {std::tuple{2, 3.0, 1.0}, std::tuple{3, 3.0, 2.0}}) {
      const LeibensonParams params = derive_constants(d, p, q);
      for (LemmaCertificate which : {LemmaCertificate::bound62, LemmaCertificate::weighted65}) {
        const CutoffSequence seq = lemma_cutoff_sequence(params, 1.0, 1.0, which);
        CHECK(seq.converged);
        CHECK(seq.increments.size() == 24);
        CHECK(seq.tail_ratio <= 0.75);
        for (std::size_t k = 1; k < seq.partial_sums.size(); ++k) {
          CHECK(seq.partial_sums[k] >= seq.partial_sums[k - 1]);
        }
      }
    }
  }

  TEST_CASE("test function family") {
    const std::vector<TestFunction> family = standard_test_family(1.0);
    CHECK(family.size() == 6);
    for (const TestFunction& tf : family) {
      CHECK(tf.phi(tf.r_max) <= 1e-40);
      CHECK(tf.phi(tf.r_max * 1.1) == 0.0);
      // Derivative by central differences at an interior point.
      const double r = 0.5 * (tf.r_min + tf.r_max) + 0.1 * (tf.r_max - tf.r_min);
      const double h = 1e-6;
      CHECK(tf.dphi(r) == doctest::Approx((tf.phi(r + h) - tf.phi(r - h)) / (2 * h)).epsilon(1e-6));
      const double second = (tf.phi(r + h) - 2 * tf.phi(r) + tf.phi(r - h)) / (h * h);
      CHECK(tf.laplacian(r, 3) == doctest::Approx(second + 2.0 * tf.dphi(r) / r).epsilon(1e-4));
    }
    const TestFunction shell = radial_bump(1.0, 0.5);
    CHECK(shell.phi(0.0) == 0.0);
    CHECK(shell.phi(1.0) == 1.0);
    CHECK(shell.r_min == doctest::Approx(0.5));
  }

  TEST_CASE("weak residuals vanish and the formulations agree") {
    for (auto [d, p, q] : {std::tuple{2, 3.0, 1.0}, std::tuple{2, 2.0, 2.0}, std::tuple{3, 3.0, 2.0}}) {
      const LeibensonParams params = derive_constants(d, p, q);
      const FieldEvaluator field(params, 0.5);
      for (const TestFunction& tf : standard_test_family(field.shifted_support_radius(0.0))) {
        const WeakResidual fpe = fpe_weak_residual(params, 0.5, tf, 0.5);
        const WeakResidual lei = leibenson_weak_residual(params, 0.5, tf, 0.5);
        CHECK(fpe.converged);
        CHECK(lei.converged);
        CHECK(std::abs(fpe.residual) <= 1e-6 * fpe.scale);
        CHECK(std::abs(lei.residual) <= 1e-6 * lei.scale);
        CHECK(std::abs(fpe.residual - lei.residual) <= 1e-8 * std::max(fpe.scale, lei.scale));
      }
    }
  }

  TEST_CASE("residual of the reference bump") {
    const LeibensonParams params = derive_constants(2, 3.0, 1.0);
    const FieldEvaluator field(params, 0.5);
    const TestFunction tf = radial_bump(0.0, 2.0 * field.shifted_support_radius(0.0));
    const WeakResidual r = fpe_weak_residual(params, 0.5, tf, 0.5);
    CHECK(r.scale > 0.0);
    CHECK(std::abs(r.residual) <= 1e-6 * r.scale);
  }

  TEST_CASE("test functions away from the support give zero") {
    const LeibensonParams params = derive_constants(2, 3.0, 1.0);
    const FieldEvaluator field(params, 0.5);
    const double R = field.shifted_support_radius(0.5);
    const TestFunction far = radial_bump(3.0 * R, R);
    CHECK(fpe_weak_residual(params, 0.5, far, 0.5).residual == 0.0);
    CHECK(leibenson_weak_residual(params, 0.5, far, 0.5).residual == 0.0);

    TestFunction zero;
    zero.phi = [](double) { return 0.0; };
    zero.dphi = [](double) { return 0.0; };
    zero.laplacian = [](double, int) { return 0.0; };
    zero.r_max = R;
    CHECK(fpe_weak_residual(params, 0.5, zero, 0.5).residual == 0.0);
    CHECK(leibenson_weak_residual(params, 0.5, zero, 0.5).residual == 0.0);

    // Adding the far bump leaves the residual unchanged.
    const TestFunction near = radial_bump(0.0, 1.5 * R);
    TestFunction sum = near;
    sum.phi = [&](double r) { return near.phi(r) + far.phi(r); };
    sum.dphi = [&](double r) { return near.dphi(r) + far.dphi(r); };
    sum.laplacian = [&](double r, int d) { return near.laplacian(r, d) + far.laplacian(r, d); };
    sum.r_max = far.r_max;
    const WeakResidual a = fpe_weak_residual(params, 0.5, near, 0.5);
    const WeakResidual b = fpe_weak_residual(params, 0.5, sum, 0.5);
    CHECK(std::abs(a.residual - b.residual) <= 1e-10 * a.scale);
  }
}
