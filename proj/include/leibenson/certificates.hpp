#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "leibenson/params.hpp"
#include "leibenson/quadrature.hpp"

namespace leibenson {

/// Integrability certificates. Members that were not requested stay empty.
struct CertificateReport {
  std::optional<QuadratureResult> sp_int_1;
  std::optional<QuadratureResult> sp_int_2;
  std::optional<QuadratureResult> lemma62_bound;
  std::optional<QuadratureResult> lemma65_weighted;

  /// True iff every present member converged with a finite value.
  bool all_finite() const;
};

struct SuperpositionCertificates {
  QuadratureResult sp_int_1;  // ∫₀^T∫ ρ w dx dt
  QuadratureResult sp_int_2;  // ∫₀^T∫ |∇ρ| w dx dt
};

struct LemmaCertificates {
  QuadratureResult lemma62_bound;
  QuadratureResult lemma65_weighted;
};

/// Certificates for the Barenblatt solution itself (δ = 0, integrated from
/// t = 0). Throws RegimeError outside the superposition regime.
SuperpositionCertificates certify_superposition(const LeibensonParams& params, double T,
                                                double tol);

/// Dominating integrals of the strong-solution lemmas for w_δ:
///   lemma62 = ∫₀^T∫ [1 + |x|^{-s} + (R_δ(t) - |x|)^{-1}] w_δ dx dt
///   lemma65 = ∫₀^T∫ [f₊^{γ-1}|x|^s + f₊^{1+γ}|x|^{-s}] dx dt,   f at t + δ.
/// Throws RegimeError outside the strong-solution regime, DomainError for δ <= 0.
LemmaCertificates certify_lemma_bounds(const LeibensonParams& params, double delta, double T,
                                       double tol);

// Inner (spatial) integrals at a single time. Each is an exact power of the
// Barenblatt time, which the slope tests exploit.
QuadratureResult sp_int_1_inner(const LeibensonParams& params, double tau);
QuadratureResult sp_int_2_inner(const LeibensonParams& params, double tau);
double sp_int_1_time_exponent(const LeibensonParams& params);
double sp_int_2_time_exponent(const LeibensonParams& params);

enum class LemmaCertificate { bound62, weighted65 };

/// Certificate mass carried by dyadic shells approaching the singular sets.
/// Level k covers |x| ∈ [2^{-k-3}R, 2^{-k-2}R] and R - |x| ∈ [2^{-k-3}R, 2^{-k-2}R],
/// R = R_δ(t), integrated over t ∈ [0, T].
struct CutoffSequence {
  std::vector<double> increments;
  std::vector<double> partial_sums;
  /// Largest ratio of successive increments over the second half of the levels.
  double tail_ratio = 0.0;
  bool converged = true;
};

CutoffSequence lemma_cutoff_sequence(const LeibensonParams& params, double delta, double T,
                                     LemmaCertificate which, int levels = 24);

/// Radially symmetric C² test function with support in r_min <= |x| <= r_max.
struct TestFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  /// Radial Laplacian φ'' + (d-1)φ'/r in dimension d.
  std::function<double(double, int)> laplacian;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// φ(r) = (1 - ((r - b)/a)²)³₊ with either b = 0 (centred ball bump) or b >= a
/// (shell bump, vanishing near the origin).
TestFunction radial_bump(double center_radius, double half_width);

/// The shipped family for a problem of spatial scale L: centred bumps of
/// radius 2L, L, L/2 and shell bumps (b, a) = (L, L/2), (0.6L, 0.4L), (1.2L, 0.6L).
std::vector<TestFunction> standard_test_family(double length_scale);

struct WeakResidual {
  double residual = 0.0;
  /// max of the absolute sizes of the terms; the natural unit for the residual.
  double scale = 0.0;
  bool converged = true;
};

/// ∫φ w_δ(t1) - ∫φ w_δ(0) - ∫₀^{t1}∫ q^{p-1}(ρ_δ Δφ + ∇ρ_δ·∇φ) w_δ dx ds.
/// For δ = 0 the initial term is φ(0).
WeakResidual fpe_weak_residual(const LeibensonParams& params, double delta,
                               const TestFunction& test, double t1);

/// ∫φ w_δ(t1) - ∫φ w_δ(0) + ∫₀^{t1}∫ |∇w_δ^q|^{p-2} ∇w_δ^q·∇φ dx ds.
WeakResidual leibenson_weak_residual(const LeibensonParams& params, double delta,
                                     const TestFunction& test, double t1);

}  // namespace leibenson
