#include "leibenson/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "leibenson/errors.hpp"

namespace leibenson {

double LeibensonParams::q_factor() const { return std::pow(q, p - 1.0); }

double LeibensonParams::c_rho_exponent() const {
  return -d * (p - 2.0) / beta - p * (p - 2.0) / (beta * (p - 1.0)) -
         d * (p - 1.0) * (q - 1.0) / beta;
}

double LeibensonParams::c_rho_prefactor() const {
  return std::pow(gamma * kappa * p / (p - 1.0), p - 2.0);
}

std::string LeibensonParams::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "(d=" << d << ", p=" << p << ", q=" << q << ")";
  return os.str();
}

double unit_sphere_area(int d) {
  if (d < 1) throw DomainError("unit_sphere_area: dimension must be >= 1");
  const double half = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double normalization_constant(int d, double p, double /*q*/, double beta, double gamma,
                              double kappa) {
  if (!(beta > 0.0) || !(gamma > 0.0) || !(kappa > 0.0)) {
    throw DomainError("normalization_constant: derived constants must be positive");
  }
  const double s = p / (p - 1.0);
  const double ds = d / s;
  // B(d/s, γ+1) via log-gamma to stay finite for large arguments.
  const double log_beta_fn =
      std::lgamma(ds) + std::lgamma(gamma + 1.0) - std::lgamma(ds + gamma + 1.0);
  const double log_c = (std::log(s) + ds * std::log(kappa) - std::log(unit_sphere_area(d)) -
                        log_beta_fn) /
                       (gamma + ds);
  return std::exp(log_c);
}

LeibensonParams derive_constants(int d, double p, double q) {
  if (d < 1) throw DomainError("dimension d must be >= 1");
  if (!(p > 1.0)) throw DomainError("exponent p must satisfy p > 1");
  if (!(q > 0.0)) throw DomainError("exponent q must satisfy q > 0");
  const double m = q * (p - 1.0);
  if (!(m > 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "q(p-1) > 1 violated: q(p-1) = " << m
       << " (the compactly supported Barenblatt profile requires the slow-diffusion regime)";
    throw RegimeError(os.str());
  }

  LeibensonParams out;
  out.d = d;
  out.p = p;
  out.q = q;
  out.beta = p + d * (m - 1.0);
  out.gamma = (p - 1.0) / (m - 1.0);
  out.kappa = (m - 1.0) / (p * q) * std::pow(out.beta, -1.0 / (p - 1.0));
  out.c_norm = normalization_constant(d, p, q, out.beta, out.gamma, out.kappa);
  return out;
}

RegimeReport classify_regime(int d, double p, double q) {
  RegimeReport r;
  if (d < 1 || !(p > 1.0) || !(q > 0.0)) return r;
  const double m = q * (p - 1.0);
  r.barenblatt_ok = m > 1.0;
  if (!r.barenblatt_ok) return r;

  r.superposition_ok = p > (1.0 + d) / d;

  const bool high_dim = d >= 2;
  const bool p_above_critical = high_dim && p > static_cast<double>(d) / (d - 1);

  r.markov_ok = p_above_critical && (p >= 2.0 || m > (2.0 - p + d) / d);

  r.strong_solution_ok =
      p_above_critical && q > (std::abs(p - 2.0) + d) / (d * (p - 1.0));
  r.uniqueness_ii_ok = r.strong_solution_ok;

  r.uniqueness_i_ok = high_dim && p > 2.0 && m < 1.0 + d * (p - 1.0) * (p - 1.0);
  return r;
}

RegimeReport classify_regime(const LeibensonParams& params) {
  return classify_regime(params.d, params.p, params.q);
}

}  // namespace leibenson
