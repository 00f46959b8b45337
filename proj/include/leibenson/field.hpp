#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "leibenson/params.hpp"

namespace leibenson {

/// Time-frozen constants of the linearised SDE coefficients at Barenblatt time τ.
///
/// With f = C - κ τ^{-s/β} r^s and a = (p-2)/(p-1):
///   ρ(r)   = C_ρ(τ) f_+ r^a
///   ∇ρ(x)  = C_ρ(τ) [a f_+ r^{-s} - κ s τ^{-s/β} 1_{r<R}] x  =: g(r) x
///   D²ρ(x) = A(r) x xᵀ + g(r) I   (classical part, r ∉ {0, R})
/// Points with r >= R(τ) get the outside value 0, and g(0) = 0.
struct CoefficientFrame {
  double tau = 0.0;
  double radius = 0.0;  // R(τ)
  double c_rho = 0.0;   // C_ρ(τ)
  double c_norm = 0.0;  // C
  double k_tau = 0.0;   // κ τ^{-s/β}
  double s = 0.0;
  double a = 0.0;
  double q_factor = 0.0;

  struct Values {
    double rho;
    double grad_factor;  // g(r)
  };
  struct HessianParts {
    double outer;  // A(r)
    double iso;    // g(r)
  };

  /// ρ and g at radius r. ρ(0) is +inf when p < 2; callers decide the policy.
  Values at(double r) const noexcept;
  HessianParts hessian_at(double r) const noexcept;
};

/// Barenblatt profile and its derived radial quantities as functions of (τ, r),
/// τ the Barenblatt time (no offset) and r = |x - y|.
class RadialProfile {
 public:
  explicit RadialProfile(const LeibensonParams& params);

  const LeibensonParams& params() const { return params_; }

  double f(double tau, double r) const;
  double w(double tau, double r) const;
  double support_radius(double tau) const;
  /// ∂_r w; throws BoundaryError at r = R(τ) when γ < 1.
  double dw_dr(double tau, double r) const;
  /// ∂_r (w^q) from w^q = τ^{-qd/β} f_+^{γq}.
  double dwq_dr(double tau, double r) const;
  double c_rho(double tau) const;
  CoefficientFrame frame(double tau) const;

 private:
  LeibensonParams params_;
  double support_scale_;  // (C/κ)^{1/s}
};

/// Radial law of the Barenblatt density. The mass fraction inside radius r at
/// Barenblatt time τ depends on r/R(τ) only, so one table on [0, R(1)] serves
/// every τ. Nodes are Chebyshev–Lobatto points; values come from adaptive
/// quadrature of the density, slopes are the exact radial density, and the
/// Hermite interpolant is Fritsch–Carlson limited to stay monotone.
class RadialLaw {
 public:
  static constexpr std::size_t kDefaultNodes = 4096;

  explicit RadialLaw(const LeibensonParams& params, std::size_t nodes = kDefaultNodes);

  double cdf(double tau, double r) const;
  /// Radial density ω_{d-1} w(τ,r) r^{d-1}.
  double pdf(double tau, double r) const;
  double quantile(double tau, double u) const;
  /// Mass of the table before clamping (≈ 1 when C is right).
  double total_mass() const { return values_.back(); }
  std::size_t nodes() const { return radii_.size(); }

 private:
  double interpolate(std::size_t i, double r) const;
  double reference_cdf(double r) const;

  RadialProfile profile_;
  double reference_radius_;  // R(1)
  double sphere_area_;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// Closed-form fields of the Barenblatt solution centred at y and of the
/// coefficients of the linearised McKean–Vlasov SDE built from w_δ(t) = w(t+δ).
///
/// Functions documented with "Barenblatt time" take t as the argument of w
/// directly; the coefficient functions take the process time t and evaluate
/// at t + δ. Stateless after construction; safe to share across threads.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const LeibensonParams& params, double delta = 0.0,
                          std::vector<double> center = {});

  const LeibensonParams& params() const { return profile_.params(); }
  const RadialProfile& profile() const { return profile_; }
  const RadialLaw& radial_law() const { return *law_; }
  double delta() const { return delta_; }
  int dim() const { return params().d; }
  std::span<const double> center() const { return center_; }

  // Barenblatt time.
  double profile_f(double t, std::span<const double> x) const;
  double density_w(double t, std::span<const double> x) const;
  double support_radius(double t) const;
  std::vector<double> grad_w(double t, std::span<const double> x) const;

  // Process time, evaluated at t + δ.
  double shifted_support_radius(double t) const;
  double rho(double t, std::span<const double> x) const;
  std::vector<double> grad_rho(double t, std::span<const double> x) const;
  /// Row-major d×d classical Hessian of ρ_δ; throws SingularityError at x = y
  /// and on the sphere |x - y| = R_δ(t).
  std::vector<double> hessian_rho(double t, std::span<const double> x) const;
  std::vector<double> drift(double t, std::span<const double> x) const;
  double diffusion_scalar(double t, std::span<const double> x) const;
  CoefficientFrame frame(double t) const;

  /// Mass of w_δ(t) inside the ball of radius r around the centre.
  double radial_cdf(double t, double r) const;
  double sample_radius(double t, double u) const;

 private:
  double distance(std::span<const double> x, std::vector<double>* rel = nullptr) const;
  double process_tau(double t) const;

  RadialProfile profile_;
  double delta_;
  std::vector<double> center_;
  std::shared_ptr<const RadialLaw> law_;
};

}  // namespace leibenson
