#pragma once

#include <functional>

namespace leibenson {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int subdivisions = 0;
  bool converged = true;
};

struct QuadratureOptions {
  /// Converged when abs_error_estimate <= max(abs_tol, rel_tol * |value|).
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_subdivisions = 4000;
  int max_dyadic_levels = 80;
};

using Integrand = std::function<double(double)>;

/// ∫_{r0}^{r1} g(r) dr for g with at most power-type singularities at the end
/// points. The interior quarter-to-three-quarter range is integrated by global
/// adaptive 21-point Gauss–Kronrod bisection; each end cell is tried as a
/// smooth cell first and otherwise decomposed into dyadic shells toward the
/// end point, whose contributions are summed with a geometric-tail
/// extrapolation once the shell ratio has settled. Never throws; failure to
/// meet the tolerance is reported through `converged`.
QuadratureResult integrate_radial(const Integrand& g, double r0, double r1, double tol);
QuadratureResult integrate_radial(const Integrand& g, double r0, double r1,
                                  const QuadratureOptions& options);

/// ∫_{t0}^{t1} g(t) dt with composite 64-point Gauss–Legendre panels (doubling
/// until two successive panel counts agree). With `singular_start` the range
/// is cut into dyadic pieces toward t0 and summed with geometric-tail
/// extrapolation.
QuadratureResult integrate_time(const Integrand& g, double t0, double t1, bool singular_start,
                                const QuadratureOptions& options);

/// Sum of two results (values and error estimates add, convergence is joint).
QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b);

}  // namespace leibenson
