#include "leibenson/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace leibenson {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-negative Kronrod nodes with their Kronrod weights and the weights of the
// embedded 10-point Gauss rule (zero where the node is Kronrod-only).
struct KronrodTable {
  std::vector<double> nodes;
  std::vector<double> kronrod;
  std::vector<double> gauss;

  KronrodTable() {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& xg = G::abscissa();
    const auto& wg = G::weights();
    for (std::size_t i = 0; i < xk.size(); ++i) {
      nodes.push_back(xk[i]);
      kronrod.push_back(wk[i]);
      double w = 0.0;
      for (std::size_t j = 0; j < xg.size(); ++j) {
        if (std::abs(xg[j] - xk[i]) < 1e-14) w = wg[j];
      }
      gauss.push_back(w);
    }
  }
};

const KronrodTable& kronrod_table() {
  static const KronrodTable table;
  return table;
}

struct LegendreTable {
  std::vector<double> nodes;
  std::vector<double> weights;

  LegendreTable() {
    using G = boost::math::quadrature::gauss<double, 64>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    nodes.assign(x.begin(), x.end());
    weights.assign(w.begin(), w.end());
  }
};

const LegendreTable& legendre_table() {
  static const LegendreTable table;
  return table;
}

struct RuleEstimate {
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
};

RuleEstimate gauss_kronrod_21(const Integrand& g, double a, double b) {
  const auto& t = kronrod_table();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k_sum = 0.0;
  double g_sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double x = t.nodes[i];
    if (x == 0.0) {
      const double v = g(c);
      k_sum += t.kronrod[i] * v;
      g_sum += t.gauss[i] * v;
      abs_sum += t.kronrod[i] * std::abs(v);
    } else {
      const double v1 = g(c - h * x);
      const double v2 = g(c + h * x);
      k_sum += t.kronrod[i] * (v1 + v2);
      g_sum += t.gauss[i] * (v1 + v2);
      abs_sum += t.kronrod[i] * (std::abs(v1) + std::abs(v2));
    }
  }
  RuleEstimate r;
  r.value = h * k_sum;
  r.error = std::abs(h * (k_sum - g_sum));
  r.abs_value = std::abs(h) * abs_sum;
  if (!std::isfinite(r.value) || !std::isfinite(r.error)) r.error = kInf;
  return r;
}

double gauss_legendre_64(const Integrand& g, double a, double b, double* abs_value = nullptr) {
  const auto& t = legendre_table();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double x = t.nodes[i];
    if (x == 0.0) {
      const double v = g(c);
      sum += t.weights[i] * v;
      abs_sum += t.weights[i] * std::abs(v);
    } else {
      const double v1 = g(c - h * x);
      const double v2 = g(c + h * x);
      sum += t.weights[i] * (v1 + v2);
      abs_sum += t.weights[i] * (std::abs(v1) + std::abs(v2));
    }
  }
  if (abs_value) *abs_value = std::abs(h) * abs_sum;
  return h * sum;
}

QuadratureResult adaptive_gauss_kronrod(const Integrand& g, double a, double b, double target,
                                        int max_subdivisions) {
  struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
  };
  std::priority_queue<Segment> heap;
  const RuleEstimate first = gauss_kronrod_21(g, a, b);
  heap.push({a, b, first.value, first.error});
  double total_error = first.error;
  int subdivisions = 1;
  bool stalled = false;

  while (total_error > target && subdivisions < max_subdivisions) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) < 16.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      stalled = true;
      break;
    }
    heap.pop();
    const RuleEstimate left = gauss_kronrod_21(g, worst.a, mid);
    const RuleEstimate right = gauss_kronrod_21(g, mid, worst.b);
    heap.push({worst.a, mid, left.value, left.error});
    heap.push({mid, worst.b, right.value, right.error});
    ++subdivisions;
    // Re-sum instead of updating incrementally so cancellation cannot drift.
    total_error = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      total_error += copy.top().error;
      copy.pop();
    }
  }

  QuadratureResult out;
  // Sum smallest contributions first.
  std::vector<double> values;
  values.reserve(heap.size());
  double error = 0.0;
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    error += heap.top().error;
    heap.pop();
  }
  std::sort(values.begin(), values.end(),
            [](double x, double y) { return std::abs(x) < std::abs(y); });
  for (double v : values) out.value += v;
  out.abs_error_estimate = error;
  out.subdivisions = subdivisions;
  out.converged = !stalled && error <= target && std::isfinite(out.value);
  return out;
}

// Sums contributions of dyadic pieces k = 0, 1, ... shrinking toward a
// singular point. Once the ratio of successive pieces settles, the remaining
// pieces are summed as a geometric series.
template <class Piece, class WidthOk>
QuadratureResult dyadic_sum(Piece&& piece, WidthOk&& width_ok, double target, int max_levels) {
  QuadratureResult out;
  out.subdivisions = 0;
  bool pieces_converged = true;
  double previous = std::numeric_limits<double>::quiet_NaN();
  // Extrapolated totals (partial sum plus geometric tail) of the last two levels.
  double previous_total = std::numeric_limits<double>::quiet_NaN();
  double tail = std::numeric_limits<double>::quiet_NaN();
  double change = kInf;
  bool settled = false;

  for (int k = 0; k < max_levels && width_ok(k); ++k) {
    const QuadratureResult pk = piece(k);
    out.value += pk.value;
    out.abs_error_estimate += pk.abs_error_estimate;
    out.subdivisions += pk.subdivisions;
    pieces_converged = pieces_converged && pk.converged;

    if (k >= 1) {
      if (pk.value == 0.0 && previous == 0.0) {
        tail = 0.0;
        change = 0.0;
        settled = true;
        break;
      }
      const double ratio = previous != 0.0 ? pk.value / previous : kInf;
      tail = (ratio >= 0.0 && ratio < 1.0) ? pk.value * ratio / (1.0 - ratio)
                                           : std::numeric_limits<double>::quiet_NaN();
      const double total = out.value + tail;
      change = std::abs(total - previous_total);
      if (std::isfinite(change) && change <= target / 8.0) {
        settled = true;
        break;
      }
      previous_total = total;
    }
    previous = pk.value;
  }

  if (std::isfinite(tail) && std::isfinite(change)) {
    out.value += tail;
    out.abs_error_estimate += change;
  } else {
    out.abs_error_estimate = kInf;
  }
  out.converged = pieces_converged && settled && out.abs_error_estimate <= target;
  return out;
}

// Cell of width |h| adjacent to end point e, extending toward e + h.
QuadratureResult endpoint_cell(const Integrand& g, double e, double h, double target,
                               const QuadratureOptions& options) {
  const double lo = std::min(e, e + h);
  const double hi = std::max(e, e + h);
  const double mid = 0.5 * (lo + hi);
  const RuleEstimate whole = gauss_kronrod_21(g, lo, hi);
  const RuleEstimate left = gauss_kronrod_21(g, lo, mid);
  const RuleEstimate right = gauss_kronrod_21(g, mid, hi);
  const double halves = left.value + right.value;
  const double halves_error = left.error + right.error;
  const double diff = std::abs(whole.value - halves);
  if (std::isfinite(halves) && diff <= target / 8.0 && halves_error <= target / 8.0) {
    return {halves, diff + halves_error, 2, true};
  }

  const double width = std::abs(h);
  const double direction = h > 0.0 ? 1.0 : -1.0;
  const double scale = std::max(std::abs(e), width);
  auto piece = [&](int k) {
    const double near = width * std::ldexp(1.0, -k - 1);
    const double far = width * std::ldexp(1.0, -k);
    const double a = e + direction * near;
    const double b = e + direction * far;
    return adaptive_gauss_kronrod(g, std::min(a, b), std::max(a, b), target / 64.0,
                                  options.max_subdivisions);
  };
  auto width_ok = [&](int k) { return width * std::ldexp(1.0, -k - 1) > 32.0 * kEps * scale; };
  return dyadic_sum(piece, width_ok, target, options.max_dyadic_levels);
}

QuadratureResult legendre_panels(const Integrand& g, double a, double b, double target) {
  auto composite = [&](int panels) {
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double lo = a + i * width;
      const double hi = (i + 1 == panels) ? b : a + (i + 1) * width;
      sum += gauss_legendre_64(g, lo, hi);
    }
    return sum;
  };
  double coarse = composite(1);
  int panels = 1;
  double change = kInf;
  double fine = coarse;
  while (panels < 64) {
    panels *= 2;
    fine = composite(panels);
    change = std::abs(fine - coarse);
    if (change <= target) break;
    coarse = fine;
  }
  QuadratureResult out;
  out.value = fine;
  out.abs_error_estimate = std::isfinite(change) ? change : kInf;
  out.subdivisions = panels;
  out.converged = std::isfinite(fine) && change <= target;
  return out;
}

double allowed_error(const QuadratureOptions& o, double value) {
  return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

}  // namespace

QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b) {
  return {a.value + b.value, a.abs_error_estimate + b.abs_error_estimate,
          a.subdivisions + b.subdivisions, a.converged && b.converged};
}

QuadratureResult integrate_radial(const Integrand& g, double r0, double r1, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  options.rel_tol = 0.0;
  return integrate_radial(g, r0, r1, options);
}

QuadratureResult integrate_radial(const Integrand& g, double r0, double r1,
                                  const QuadratureOptions& options) {
  if (!(r1 > r0)) {
    QuadratureResult empty;
    empty.converged = (r0 == r1);
    return empty;
  }
  const double length = r1 - r0;
  const double quarter = 0.25 * length;
  const RuleEstimate rough = gauss_kronrod_21(g, r0, r1);

  auto attempt = [&](double target) {
    const QuadratureResult left = endpoint_cell(g, r0, quarter, target / 4.0, options);
    const QuadratureResult right = endpoint_cell(g, r1, -quarter, target / 4.0, options);
    const QuadratureResult middle = adaptive_gauss_kronrod(g, r0 + quarter, r1 - quarter,
                                                           target / 2.0, options.max_subdivisions);
    return combine(combine(left, middle), right);
  };

  double target = allowed_error(options, rough.abs_value);
  QuadratureResult out = attempt(target);
  const double allowed = allowed_error(options, out.value);
  if (out.abs_error_estimate > allowed && allowed < target) {
    out = attempt(allowed);
  }
  out.converged = out.converged && std::isfinite(out.value) &&
                  out.abs_error_estimate <= allowed_error(options, out.value);
  return out;
}

QuadratureResult integrate_time(const Integrand& g, double t0, double t1, bool singular_start,
                                const QuadratureOptions& options) {
  if (!(t1 > t0)) {
    QuadratureResult empty;
    empty.converged = (t0 == t1);
    return empty;
  }
  const double length = t1 - t0;
  double rough_abs = 0.0;
  if (singular_start) {
    gauss_legendre_64(g, t0 + 0.5 * length, t1, &rough_abs);
  } else {
    gauss_legendre_64(g, t0, t1, &rough_abs);
  }
  const double target = allowed_error(options, rough_abs);

  QuadratureResult out;
  if (!singular_start) {
    out = legendre_panels(g, t0, t1, target);
  } else {
    auto piece = [&](int k) {
      const double a = t0 + length * std::ldexp(1.0, -k - 1);
      const double b = t0 + length * std::ldexp(1.0, -k);
      return legendre_panels(g, a, b, target / 64.0);
    };
    auto width_ok = [&](int k) {
      return length * std::ldexp(1.0, -k - 1) >
             32.0 * kEps * std::max(std::abs(t0), length);
    };
    out = dyadic_sum(piece, width_ok, target, options.max_dyadic_levels);
  }
  out.converged = out.converged && std::isfinite(out.value) &&
                  out.abs_error_estimate <= allowed_error(options, out.value);
  return out;
}

}  // namespace leibenson
