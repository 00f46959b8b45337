#include "leibenson/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leibenson/errors.hpp"

namespace leibenson {
namespace {

constexpr double kUnitBallVolume3 = 4.0 * std::numbers::pi / 3.0;

void check_geometry(const CapGeometry& g) {
  if (!(g.sphere_radius > 0.0)) throw DomainError("sphere radius must be > 0");
  if (!(g.x_norm > 0.0)) throw DomainError("cap geometry needs |x| > 0");
}

double average(const CapGeometry& g, double r) {
  return cap_area(g, r) / (kUnitBallVolume3 * r * r * r);
}

}  // namespace

double cap_height(const CapGeometry& g, double r) {
  check_geometry(g);
  const double R = g.sphere_radius;
  const double x = g.x_norm;
  if (r <= std::abs(x - R)) return 0.0;
  if (r > x + R) return 2.0 * R;
  // R - (R² + x² - r²)/(2x), rearranged to avoid cancellation when x ≈ R.
  const double gap = x - R;
  return std::clamp((r - gap) * (r + gap) / (2.0 * x), 0.0, 2.0 * R);
}

double cap_area(const CapGeometry& g, double r) {
  return 2.0 * std::numbers::pi * g.sphere_radius * cap_height(g, r);
}

double maximal_surface_d3(const CapGeometry& g) {
  check_geometry(g);
  const double R = g.sphere_radius;
  const double x = g.x_norm;
  if (x == R) throw DomainError("maximal function is infinite on the sphere |x| = R");
  const double gap = std::abs(x - R);
  if (std::sqrt(3.0) * gap <= x + R) {
    return 2.0 * std::numbers::pi * R / (kUnitBallVolume3 * std::sqrt(27.0) * x * gap);
  }
  const double outer = x + R;
  return 4.0 * std::numbers::pi * R * R / (kUnitBallVolume3 * outer * outer * outer);
}

double maximal_surface(const CapGeometry& g, int d) {
  if (d != 3) throw DomainError("closed-form maximal function is implemented for d = 3 only");
  return maximal_surface_d3(g);
}

BruteForceMaximum maximal_surface_bruteforce(const CapGeometry& g, int grid_size) {
  check_geometry(g);
  if (grid_size < 1000) throw DomainError("brute-force grid needs at least 1000 points");
  const double gap = std::abs(g.x_norm - g.sphere_radius);
  const double lo = gap > 0.0 ? gap * (1.0 - 1e-6) : 1e-12 * g.sphere_radius;
  const double hi = 1.01 * (g.x_norm + g.sphere_radius);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (grid_size - 1);

  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < grid_size; ++i) {
    const double r = std::exp(log_lo + step * i);
    const double v = average(g, r);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  // Golden-section search in log r over the neighbouring grid cells.
  double a = log_lo + step * std::max(best - 1, 0);
  double b = log_lo + step * std::min(best + 1, grid_size - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = average(g, std::exp(c));
  double fd = average(g, std::exp(d));
  for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = average(g, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = average(g, std::exp(d));
    }
  }
  BruteForceMaximum out{best_value, std::exp(log_lo + step * best)};
  const double r_mid = std::exp(0.5 * (a + b));
  const double v_mid = average(g, r_mid);
  for (auto [r, v] : {std::pair{std::exp(c), fc}, std::pair{std::exp(d), fd}, std::pair{r_mid, v_mid}}) {
    if (v > out.value) out = {v, r};
  }
  return out;
}

}  // namespace leibenson
