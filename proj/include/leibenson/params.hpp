#pragma once

#include <string>

namespace leibenson {

/// Exponents of the Leibenson equation u_t = Δ_p(u^q) together with every
/// constant derived from them for the Barenblatt profile
///
///   w(t,x) = t^{-d/β} [C - κ (t^{-1/β}|x|)^{p/(p-1)}]_+^γ.
///
/// Immutable after construction; all formulas in the library read from here.
struct LeibensonParams {
  int d = 0;
  double p = 0.0;
  double q = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  double c_norm = 0.0;

  /// Profile exponent p/(p-1).
  double s() const { return p / (p - 1.0); }
  /// Exponent of |x| in the diffusion coefficient, (p-2)/(p-1).
  double a() const { return (p - 2.0) / (p - 1.0); }
  /// q^{p-1}, the factor in front of both SDE coefficients.
  double q_factor() const;
  /// Exponent of t in C_ρ(t).
  double c_rho_exponent() const;
  /// (γκp/(p-1))^{p-2}, the t-independent part of C_ρ.
  double c_rho_prefactor() const;

  std::string to_string() const;
};

/// Validates (d, p, q), computes β, γ, κ and the mass-normalising constant C.
/// Throws DomainError for d < 1, p <= 1, q <= 0 and RegimeError for q(p-1) <= 1.
LeibensonParams derive_constants(int d, double p, double q);

/// Closed form of C from ∫ w(1,x) dx = 1:
///   ω_{d-1} C^{γ+d/s} κ^{-d/s} (1/s) B(d/s, γ+1) = 1,  s = p/(p-1).
double normalization_constant(int d, double p, double q, double beta, double gamma,
                              double kappa);

/// Surface area of the unit sphere in R^d (ω_0 = 2).
double unit_sphere_area(int d);

/// Which of the existence/uniqueness results apply to (d, p, q).
struct RegimeReport {
  bool barenblatt_ok = false;
  bool superposition_ok = false;
  bool markov_ok = false;
  bool strong_solution_ok = false;
  bool uniqueness_i_ok = false;
  bool uniqueness_ii_ok = false;
};

RegimeReport classify_regime(int d, double p, double q);
RegimeReport classify_regime(const LeibensonParams& params);

}  // namespace leibenson
