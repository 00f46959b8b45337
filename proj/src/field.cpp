#include "leibenson/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "leibenson/errors.hpp"
#include "leibenson/quadrature.hpp"

namespace leibenson {

CoefficientFrame::Values CoefficientFrame::at(double r) const noexcept {
  if (!(r < radius)) return {0.0, 0.0};
  if (r == 0.0) {
    double rho = 0.0;
    if (a < 0.0) {
      rho = std::numeric_limits<double>::infinity();
    } else if (a == 0.0) {
      rho = c_rho * c_norm;
    }
    return {rho, 0.0};
  }
  const double rs = std::pow(r, s);
  const double f = std::max(c_norm - k_tau * rs, 0.0);
  // r^a = r^2 / r^s since a + s = 2.
  const double ra = r * r / rs;
  return {c_rho * f * ra, c_rho * (a * f / rs - k_tau * s)};
}

CoefficientFrame::HessianParts CoefficientFrame::hessian_at(double r) const noexcept {
  if (!(r < radius)) return {0.0, 0.0};
  const double rs = std::pow(r, s);
  const double f = std::max(c_norm - k_tau * rs, 0.0);
  const double iso = c_rho * (a * f / rs - k_tau * s);
  const double outer = -c_rho * a * s * (k_tau / (r * r) + f / (rs * r * r));
  return {outer, iso};
}

RadialProfile::RadialProfile(const LeibensonParams& params)
    : params_(params), support_scale_(std::pow(params.c_norm / params.kappa, 1.0 / params.s())) {}

double RadialProfile::f(double tau, double r) const {
  return params_.c_norm - params_.kappa * std::pow(std::pow(tau, -1.0 / params_.beta) * r, params_.s());
}

double RadialProfile::w(double tau, double r) const {
  const double fv = f(tau, r);
  if (!(fv > 0.0)) return 0.0;
  return std::pow(tau, -params_.d / params_.beta) * std::pow(fv, params_.gamma);
}

double RadialProfile::support_radius(double tau) const {
  return support_scale_ * std::pow(tau, 1.0 / params_.beta);
}

double RadialProfile::dw_dr(double tau, double r) const {
  const double fv = f(tau, r);
  if (params_.gamma < 1.0) {
    // Radii within rounding of R count as the boundary.
    const double R = support_radius(tau);
    if (fv == 0.0 || std::abs(r - R) <= 4.0 * std::numeric_limits<double>::epsilon() * R) {
      throw BoundaryError("dw/dr is unbounded on the free boundary when gamma < 1");
    }
  }
  if (!(fv > 0.0)) return 0.0;
  const double s = params_.s();
  const double fr = -params_.kappa * s * std::pow(tau, -s / params_.beta) * std::pow(r, s - 1.0);
  return params_.gamma * std::pow(tau, -params_.d / params_.beta) *
         std::pow(fv, params_.gamma - 1.0) * fr;
}

double RadialProfile::dwq_dr(double tau, double r) const {
  const double fv = f(tau, r);
  if (!(fv > 0.0)) return 0.0;
  const double s = params_.s();
  const double gq = params_.gamma * params_.q;
  const double fr = -params_.kappa * s * std::pow(tau, -s / params_.beta) * std::pow(r, s - 1.0);
  return std::pow(tau, -params_.q * params_.d / params_.beta) * gq * std::pow(fv, gq - 1.0) * fr;
}

double RadialProfile::c_rho(double tau) const {
  return params_.c_rho_prefactor() * std::pow(tau, params_.c_rho_exponent());
}

CoefficientFrame RadialProfile::frame(double tau) const {
  CoefficientFrame fr;
  fr.tau = tau;
  fr.radius = support_radius(tau);
  fr.c_rho = c_rho(tau);
  fr.c_norm = params_.c_norm;
  fr.s = params_.s();
  fr.a = params_.a();
  fr.k_tau = params_.kappa * std::pow(tau, -fr.s / params_.beta);
  fr.q_factor = params_.q_factor();
  return fr;
}

namespace {

struct Hermite {
  double value;
  double slope;
};

Hermite hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double value = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
                       (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
  const double slope = ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / h +
                       (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1;
  return {value, slope};
}

}  // namespace

RadialLaw::RadialLaw(const LeibensonParams& params, std::size_t nodes)
    : profile_(params),
      reference_radius_(profile_.support_radius(1.0)),
      sphere_area_(unit_sphere_area(params.d)) {
  if (nodes < 2) throw DomainError("RadialLaw needs at least two nodes");
  radii_.resize(nodes);
  values_.resize(nodes);
  slopes_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    radii_[i] = 0.5 * reference_radius_ *
                (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / (nodes - 1)));
  }
  radii_.front() = 0.0;
  radii_.back() = reference_radius_;

  const Integrand density = [this](double r) { return pdf(1.0, r); };
  double total = 0.0;
  values_[0] = 0.0;
  for (std::size_t i = 1; i < nodes; ++i) {
    total += integrate_radial(density, radii_[i - 1], radii_[i], 1e-16).value;
    values_[i] = total;
  }
  for (std::size_t i = 0; i < nodes; ++i) slopes_[i] = pdf(1.0, radii_[i]);

  // Fritsch–Carlson limiter keeps every Hermite piece monotone.
  for (std::size_t k = 0; k + 1 < nodes; ++k) {
    const double delta = (values_[k + 1] - values_[k]) / (radii_[k + 1] - radii_[k]);
    if (delta <= 0.0) {
      slopes_[k] = 0.0;
      slopes_[k + 1] = 0.0;
      continue;
    }
    const double alpha = slopes_[k] / delta;
    const double beta = slopes_[k + 1] / delta;
    const double norm = alpha * alpha + beta * beta;
    if (norm > 9.0) {
      const double scale = 3.0 / std::sqrt(norm);
      slopes_[k] = scale * alpha * delta;
      slopes_[k + 1] = scale * beta * delta;
    }
  }
}

double RadialLaw::pdf(double tau, double r) const {
  if (r < 0.0) throw RangeError("radial density: negative radius");
  return sphere_area_ * profile_.w(tau, r) * std::pow(r, profile_.params().d - 1);
}

double RadialLaw::interpolate(std::size_t i, double r) const {
  return hermite(radii_[i], radii_[i + 1], values_[i], values_[i + 1], slopes_[i], slopes_[i + 1],
                 r)
      .value;
}

double RadialLaw::reference_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= reference_radius_) return 1.0;
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - radii_.begin()) - 1;
  return std::clamp(interpolate(i, r), 0.0, 1.0);
}

double RadialLaw::cdf(double tau, double r) const {
  if (r < 0.0) throw RangeError("radial cdf: negative radius");
  if (!(tau > 0.0)) throw DomainError("radial cdf: Barenblatt time must be positive");
  return reference_cdf(r * std::pow(tau, -1.0 / profile_.params().beta));
}

double RadialLaw::quantile(double tau, double u) const {
  if (!(u > 0.0 && u < 1.0)) throw RangeError("radial quantile: u must lie in (0,1)");
  if (!(tau > 0.0)) throw DomainError("radial quantile: Barenblatt time must be positive");
  const double scale = std::pow(tau, 1.0 / profile_.params().beta);
  if (u >= values_.back()) return reference_radius_ * scale;

  const auto it = std::upper_bound(values_.begin(), values_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - values_.begin()) - 1;
  double lo = radii_[i];
  double hi = radii_[i + 1];
  // Safeguarded Newton on the monotone interpolant.
  double r = lo + (hi - lo) * (u - values_[i]) / (values_[i + 1] - values_[i]);
  for (int iter = 0; iter < 60; ++iter) {
    const Hermite h =
        hermite(radii_[i], radii_[i + 1], values_[i], values_[i + 1], slopes_[i], slopes_[i + 1], r);
    const double residual = h.value - u;
    if (residual > 0.0) {
      hi = r;
    } else {
      lo = r;
    }
    if (std::abs(residual) <= 1e-16 || hi - lo <= 1e-16 * reference_radius_) break;
    double next = h.slope > 0.0 ? r - residual / h.slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  return r * scale;
}

FieldEvaluator::FieldEvaluator(const LeibensonParams& params, double delta,
                               std::vector<double> center)
    : profile_(params), delta_(delta), center_(std::move(center)) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("delta must be >= 0");
  if (center_.empty()) center_.assign(params.d, 0.0);
  if (center_.size() != static_cast<std::size_t>(params.d)) {
    throw DomainError("center dimension does not match d");
  }
  law_ = std::make_shared<const RadialLaw>(params);
}

double FieldEvaluator::distance(std::span<const double> x, std::vector<double>* rel) const {
  if (x.size() != center_.size()) throw DomainError("point dimension does not match d");
  double sum = 0.0;
  if (rel) rel->resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] - center_[i];
    if (rel) (*rel)[i] = v;
    sum += v * v;
  }
  return std::sqrt(sum);
}

double FieldEvaluator::process_tau(double t) const {
  const double tau = t + delta_;
  if (!(tau > 0.0)) throw DomainError("coefficients need t + delta > 0");
  return tau;
}

namespace {
void require_positive_time(double t) {
  if (!(t > 0.0)) throw DomainError("Barenblatt time must be positive");
}
}  // namespace

double FieldEvaluator::profile_f(double t, std::span<const double> x) const {
  require_positive_time(t);
  return profile_.f(t, distance(x));
}

double FieldEvaluator::density_w(double t, std::span<const double> x) const {
  require_positive_time(t);
  return profile_.w(t, distance(x));
}

double FieldEvaluator::support_radius(double t) const {
  require_positive_time(t);
  return profile_.support_radius(t);
}

std::vector<double> FieldEvaluator::grad_w(double t, std::span<const double> x) const {
  require_positive_time(t);
  std::vector<double> rel;
  const double r = distance(x, &rel);
  std::vector<double> out(rel.size(), 0.0);
  if (r == 0.0) return out;
  const double factor = profile_.dw_dr(t, r) / r;
  for (std::size_t i = 0; i < rel.size(); ++i) out[i] = factor * rel[i];
  return out;
}

double FieldEvaluator::shifted_support_radius(double t) const {
  return profile_.support_radius(process_tau(t));
}

CoefficientFrame FieldEvaluator::frame(double t) const { return profile_.frame(process_tau(t)); }

double FieldEvaluator::rho(double t, std::span<const double> x) const {
  const CoefficientFrame fr = frame(t);
  const double r = distance(x);
  if (r == 0.0 && fr.a < 0.0) throw SingularityError("rho is unbounded at the centre when p < 2");
  return fr.at(r).rho;
}

std::vector<double> FieldEvaluator::grad_rho(double t, std::span<const double> x) const {
  const CoefficientFrame fr = frame(t);
  std::vector<double> rel;
  const double r = distance(x, &rel);
  const double g = fr.at(r).grad_factor;
  for (double& v : rel) v *= g;
  return rel;
}

std::vector<double> FieldEvaluator::hessian_rho(double t, std::span<const double> x) const {
  const CoefficientFrame fr = frame(t);
  std::vector<double> rel;
  const double r = distance(x, &rel);
  if (r == 0.0) throw SingularityError("Hessian of rho is not classical at the centre");
  if (r == fr.radius) throw SingularityError("Hessian of rho is not classical on the free boundary");
  const std::size_t d = rel.size();
  std::vector<double> out(d * d, 0.0);
  const CoefficientFrame::HessianParts h = fr.hessian_at(r);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      out[i * d + j] = out[j * d + i] = h.outer * rel[i] * rel[j];
    }
    out[i * d + i] += h.iso;
  }
  return out;
}

std::vector<double> FieldEvaluator::drift(double t, std::span<const double> x) const {
  std::vector<double> out = grad_rho(t, x);
  const double qf = params().q_factor();
  for (double& v : out) v *= qf;
  return out;
}

double FieldEvaluator::diffusion_scalar(double t, std::span<const double> x) const {
  return std::sqrt(2.0 * params().q_factor() * rho(t, x));
}

double FieldEvaluator::radial_cdf(double t, double r) const {
  return law_->cdf(process_tau(t), r);
}

double FieldEvaluator::sample_radius(double t, double u) const {
  return law_->quantile(process_tau(t), u);
}

}  // namespace leibenson
