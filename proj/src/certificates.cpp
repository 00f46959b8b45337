#include "leibenson/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leibenson/errors.hpp"
#include "leibenson/field.hpp"

namespace leibenson {
namespace {

constexpr double kInnerRelTol = 1e-12;

QuadratureOptions inner_options() {
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = kInnerRelTol;
  return o;
}

// Collects convergence of inner integrals evaluated inside an outer integrand.
struct InnerLog {
  bool ok = true;
  double operator()(const QuadratureResult& r) {
    ok = ok && r.converged && std::isfinite(r.value);
    return r.value;
  }
};

// Folds the inner relative error into an outer result and re-checks it.
QuadratureResult finish(QuadratureResult outer, const InnerLog& log, double tol) {
  outer.abs_error_estimate += kInnerRelTol * std::abs(outer.value);
  outer.converged = outer.converged && log.ok && std::isfinite(outer.value) &&
                    outer.abs_error_estimate <= tol;
  return outer;
}

QuadratureResult zero_result() { return {0.0, 0.0, 0, true}; }

// f = C (1 - (1 - u/R)^s) evaluated without cancellation near the boundary.
double profile_from_gap(double c_norm, double s, double gap, double radius) {
  return -c_norm * std::expm1(s * std::log1p(-gap / radius));
}

// Spatial integrands of the strong-solution lemmas at Barenblatt time τ, as
// functions of the radius r and the gap R - r (both supplied to keep precision
// on either side).
struct LemmaIntegrand {
  const LeibensonParams* params;
  double tau;
  double radius;
  double sphere_area;
  double w_scale;  // τ^{-d/β}

  double profile(double r, double gap) const {
    if (gap < 0.5 * radius) return profile_from_gap(params->c_norm, params->s(), gap, radius);
    return params->c_norm * (1.0 - std::pow(r / radius, params->s()));
  }

  double bound62(double r, double gap) const {
    const double f = profile(r, gap);
    if (!(f > 0.0)) return 0.0;
    const double w = w_scale * std::pow(f, params->gamma);
    const double weight = 1.0 + std::pow(r, -params->s()) + 1.0 / gap;
    return sphere_area * weight * w * std::pow(r, params->d - 1);
  }

  double weighted65(double r, double gap) const {
    const double f = profile(r, gap);
    if (!(f > 0.0)) return 0.0;
    const double s = params->s();
    const double rs = std::pow(r, s);
    const double value = std::pow(f, params->gamma - 1.0) * rs + std::pow(f, 1.0 + params->gamma) / rs;
    return sphere_area * value * std::pow(r, params->d - 1);
  }

  double operator()(LemmaCertificate which, double r, double gap) const {
    return which == LemmaCertificate::bound62 ? bound62(r, gap) : weighted65(r, gap);
  }
};

LemmaIntegrand lemma_integrand(const LeibensonParams& params, const RadialProfile& profile,
                               double tau) {
  return {&params, tau, profile.support_radius(tau), unit_sphere_area(params.d),
          std::pow(tau, -params.d / params.beta)};
}

QuadratureResult lemma_inner(const LeibensonParams& params, const RadialProfile& profile,
                             double tau, LemmaCertificate which) {
  const LemmaIntegrand li = lemma_integrand(params, profile, tau);
  const double radius = li.radius;
  const double half = 0.5 * radius;
  // Near the boundary integrate in the gap variable so R - r is exact.
  const QuadratureResult inner_part = integrate_radial(
      [&](double r) { return li(which, r, radius - r); }, 0.0, half, inner_options());
  const QuadratureResult outer_part = integrate_radial(
      [&](double gap) { return li(which, radius - gap, gap); }, 0.0, radius - half,
      inner_options());
  return combine(inner_part, outer_part);
}

void require_regime(bool ok, const char* what, const LeibensonParams& params) {
  if (!ok) throw RegimeError(std::string(what) + " regime gate fails for " + params.to_string());
}

}  // namespace

bool CertificateReport::all_finite() const {
  for (const auto* m : {&sp_int_1, &sp_int_2, &lemma62_bound, &lemma65_weighted}) {
    if (m->has_value() && !((*m)->converged && std::isfinite((*m)->value))) return false;
  }
  return true;
}

QuadratureResult sp_int_1_inner(const LeibensonParams& params, double tau) {
  const RadialProfile profile(params);
  const CoefficientFrame fr = profile.frame(tau);
  const double area = unit_sphere_area(params.d);
  const Integrand g = [&](double r) {
    return area * fr.at(r).rho * profile.w(tau, r) * std::pow(r, params.d - 1);
  };
  if (params.p > 2.0) {
    const double split = std::pow(fr.a * fr.c_norm / (2.0 * fr.k_tau), 1.0 / fr.s);
    return combine(integrate_radial(g, 0.0, split, inner_options()),
                   integrate_radial(g, split, fr.radius, inner_options()));
  }
  return integrate_radial(g, 0.0, fr.radius, inner_options());
}

QuadratureResult sp_int_2_inner(const LeibensonParams& params, double tau) {
  const RadialProfile profile(params);
  const CoefficientFrame fr = profile.frame(tau);
  const double area = unit_sphere_area(params.d);
  const Integrand g = [&](double r) {
    return area * std::abs(fr.at(r).grad_factor) * r * profile.w(tau, r) *
           std::pow(r, params.d - 1);
  };
  // |∇ρ| has a kink where the radial derivative of ρ changes sign (p > 2).
  if (params.p > 2.0) {
    const double split = std::pow(fr.a * fr.c_norm / (2.0 * fr.k_tau), 1.0 / fr.s);
    return combine(integrate_radial(g, 0.0, split, inner_options()),
                   integrate_radial(g, split, fr.radius, inner_options()));
  }
  return integrate_radial(g, 0.0, fr.radius, inner_options());
}

double sp_int_1_time_exponent(const LeibensonParams& params) {
  return params.c_rho_exponent() + params.a() / params.beta;
}

double sp_int_2_time_exponent(const LeibensonParams& params) {
  return params.c_rho_exponent() + (1.0 - params.s()) / params.beta;
}

SuperpositionCertificates certify_superposition(const LeibensonParams& params, double T,
                                                double tol) {
  require_regime(classify_regime(params).superposition_ok, "superposition", params);
  if (!(T >= 0.0)) throw DomainError("certificate horizon T must be >= 0");
  if (T == 0.0) return {zero_result(), zero_result()};

  QuadratureOptions outer;
  outer.abs_tol = tol;
  outer.rel_tol = 0.0;

  InnerLog log1;
  const QuadratureResult i1 = integrate_time(
      [&](double t) { return log1(sp_int_1_inner(params, t)); }, 0.0, T, true, outer);
  InnerLog log2;
  const QuadratureResult i2 = integrate_time(
      [&](double t) { return log2(sp_int_2_inner(params, t)); }, 0.0, T, true, outer);
  return {finish(i1, log1, tol), finish(i2, log2, tol)};
}

LemmaCertificates certify_lemma_bounds(const LeibensonParams& params, double delta, double T,
                                       double tol) {
  require_regime(classify_regime(params).strong_solution_ok, "strong-solution", params);
  if (!(delta > 0.0)) throw DomainError("lemma certificates need delta > 0");
  if (!(T >= 0.0)) throw DomainError("certificate horizon T must be >= 0");
  if (T == 0.0) return {zero_result(), zero_result()};

  const RadialProfile profile(params);
  QuadratureOptions outer;
  outer.abs_tol = tol;
  outer.rel_tol = 0.0;

  auto run = [&](LemmaCertificate which) {
    InnerLog log;
    const QuadratureResult r = integrate_time(
        [&](double t) { return log(lemma_inner(params, profile, t + delta, which)); }, 0.0, T,
        false, outer);
    return finish(r, log, tol);
  };
  return {run(LemmaCertificate::bound62), run(LemmaCertificate::weighted65)};
}

CutoffSequence lemma_cutoff_sequence(const LeibensonParams& params, double delta, double T,
                                     LemmaCertificate which, int levels) {
  if (!(delta > 0.0)) throw DomainError("cutoff sequence needs delta > 0");
  if (!(T > 0.0)) throw DomainError("cutoff sequence needs T > 0");
  if (levels < 4) throw DomainError("cutoff sequence needs at least 4 levels");

  const RadialProfile profile(params);
  QuadratureOptions outer;
  outer.abs_tol = 1e-300;
  outer.rel_tol = 1e-10;

  CutoffSequence seq;
  double sum = 0.0;
  for (int k = 0; k < levels; ++k) {
    InnerLog log;
    auto shells = [&](double t) {
      const LemmaIntegrand li = lemma_integrand(params, profile, t + delta);
      const double lo = li.radius * std::ldexp(1.0, -k - 3);
      const double hi = li.radius * std::ldexp(1.0, -k - 2);
      const double near_origin = log(integrate_radial(
          [&](double r) { return li(which, r, li.radius - r); }, lo, hi, inner_options()));
      const double near_boundary = log(integrate_radial(
          [&](double gap) { return li(which, li.radius - gap, gap); }, lo, hi, inner_options()));
      return near_origin + near_boundary;
    };
    const QuadratureResult inc = integrate_time(shells, 0.0, T, false, outer);
    seq.converged = seq.converged && inc.converged && log.ok;
    sum += inc.value;
    seq.increments.push_back(inc.value);
    seq.partial_sums.push_back(sum);
  }
  for (int k = levels / 2; k + 1 < levels; ++k) {
    const double ratio = seq.increments[k + 1] / seq.increments[k];
    seq.tail_ratio = std::max(seq.tail_ratio, std::isfinite(ratio) ? ratio : 1.0);
  }
  return seq;
}

TestFunction radial_bump(double b, double a) {
  if (!(a > 0.0) || !(b >= 0.0)) throw DomainError("radial bump needs a > 0, b >= 0");
  if (b != 0.0 && b < a) throw DomainError("shell bump needs b >= a so that it vanishes near 0");
  TestFunction tf;
  tf.r_min = b == 0.0 ? 0.0 : b - a;
  tf.r_max = b + a;
  tf.phi = [=](double r) {
    const double z = (r - b) / a;
    if (std::abs(z) >= 1.0) return 0.0;
    const double v = 1.0 - z * z;
    return v * v * v;
  };
  tf.dphi = [=](double r) {
    const double z = (r - b) / a;
    if (std::abs(z) >= 1.0) return 0.0;
    const double v = 1.0 - z * z;
    return -6.0 * z * v * v / a;
  };
  tf.laplacian = [=](double r, int d) {
    const double z = (r - b) / a;
    if (std::abs(z) >= 1.0) return 0.0;
    const double v = 1.0 - z * z;
    const double second = -6.0 * v * (v - 4.0 * z * z) / (a * a);
    if (r == 0.0) {
      // Centred: φ'/r → φ''(0). Shell touching the origin: φ' = O(r²).
      return b == 0.0 ? d * second : second;
    }
    return second + (d - 1) * (-6.0 * z * v * v / a) / r;
  };
  return tf;
}

std::vector<TestFunction> standard_test_family(double L) {
  return {radial_bump(0.0, 2.0 * L),     radial_bump(0.0, L),
          radial_bump(0.0, 0.5 * L),     radial_bump(L, 0.5 * L),
          radial_bump(0.6 * L, 0.4 * L), radial_bump(1.2 * L, 0.6 * L)};
}

namespace {

enum class WeakForm { fpe, leibenson };

WeakResidual weak_residual(const LeibensonParams& params, double delta, const TestFunction& test,
                           double t1, WeakForm form) {
  if (!(delta >= 0.0)) throw DomainError("delta must be >= 0");
  if (!(t1 > 0.0)) throw DomainError("weak residual needs t1 > 0");
  const RadialProfile profile(params);
  const double area = unit_sphere_area(params.d);
  const int d = params.d;

  auto upper = [&](double tau) { return std::min(test.r_max, profile.support_radius(tau)); };

  auto mass = [&](double tau) {
    const double hi = upper(tau);
    if (!(hi > test.r_min)) return zero_result();
    return integrate_radial(
        [&](double r) { return area * test.phi(r) * profile.w(tau, r) * std::pow(r, d - 1); },
        test.r_min, hi, inner_options());
  };

  // Space integrand of the flux term, with the sign it carries in the residual.
  auto flux_density = [&](double tau) -> Integrand {
    if (form == WeakForm::fpe) {
      const CoefficientFrame fr = profile.frame(tau);
      return [&, fr, tau](double r) {
        const CoefficientFrame::Values v = fr.at(r);
        const double drift_part = v.grad_factor * r * test.dphi(r);
        const double diffusion_part = v.rho == 0.0 ? 0.0 : v.rho * test.laplacian(r, d);
        return -fr.q_factor * (diffusion_part + drift_part) * profile.w(tau, r) * area *
               std::pow(r, d - 1);
      };
    }
    return [&, tau](double r) {
      const double h = profile.dwq_dr(tau, r);
      if (h == 0.0) return 0.0;
      return std::pow(std::abs(h), params.p - 2.0) * h * test.dphi(r) * area *
             std::pow(r, d - 1);
    };
  };

  InnerLog log;
  auto flux = [&](double t, bool absolute) {
    const double tau = t + delta;
    const double hi = upper(tau);
    if (!(hi > test.r_min)) return 0.0;
    const Integrand g = flux_density(tau);
    if (absolute) {
      QuadratureOptions o = inner_options();
      o.rel_tol = 1e-8;
      return log(integrate_radial([&](double r) { return std::abs(g(r)); }, test.r_min, hi, o));
    }
    return log(integrate_radial(g, test.r_min, hi, inner_options()));
  };

  // Break the time range where the support edge crosses r_min or r_max: the
  // inner integral is only finitely smooth in t there.
  std::vector<double> breaks{0.0, t1};
  const double unit_radius = profile.support_radius(1.0);
  for (double edge : {test.r_min, test.r_max}) {
    if (!(edge > 0.0)) continue;
    const double t_cross = std::pow(edge / unit_radius, params.beta) - delta;
    if (t_cross > 0.0 && t_cross < t1) breaks.push_back(t_cross);
  }
  std::sort(breaks.begin(), breaks.end());

  auto integrate_flux = [&](bool absolute, const QuadratureOptions& o) {
    QuadratureResult total = zero_result();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const bool singular = delta == 0.0 && i == 0;
      total = combine(total, integrate_time([&](double t) { return flux(t, absolute); },
                                            breaks[i], breaks[i + 1], singular, o));
    }
    return total;
  };

  QuadratureOptions abs_opts;
  abs_opts.abs_tol = 1e-300;
  abs_opts.rel_tol = 1e-8;
  const QuadratureResult flux_abs = integrate_flux(true, abs_opts);

  QuadratureOptions signed_opts;
  signed_opts.abs_tol = std::max(1e-13 * flux_abs.value, 1e-300);
  signed_opts.rel_tol = 1e-12;
  const QuadratureResult flux_signed = integrate_flux(false, signed_opts);

  const QuadratureResult final_mass = mass(t1 + delta);
  QuadratureResult initial_mass = zero_result();
  if (delta > 0.0) {
    initial_mass = mass(delta);
  } else {
    initial_mass.value = test.phi(0.0);
  }

  WeakResidual out;
  out.residual = final_mass.value - initial_mass.value + flux_signed.value;
  out.scale = std::max({std::abs(final_mass.value), std::abs(initial_mass.value), flux_abs.value});
  out.converged = log.ok && final_mass.converged && initial_mass.converged &&
                  flux_signed.converged && flux_abs.converged;
  return out;
}

}  // namespace

WeakResidual fpe_weak_residual(const LeibensonParams& params, double delta,
                               const TestFunction& test, double t1) {
  return weak_residual(params, delta, test, t1, WeakForm::fpe);
}

WeakResidual leibenson_weak_residual(const LeibensonParams& params, double delta,
                                     const TestFunction& test, double t1) {
  return weak_residual(params, delta, test, t1, WeakForm::leibenson);
}

}  // namespace leibenson
