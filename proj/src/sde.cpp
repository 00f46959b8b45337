#include "leibenson/sde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <sstream>

#include "leibenson/errors.hpp"
#include "leibenson/parallel.hpp"

namespace leibenson {
namespace {

constexpr int kMaxDim = 16;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Per-step constants shared by every particle.
struct StepKernel {
  CoefficientFrame frame;
  int d = 0;
  double dt = 0.0;
  double sqrt_dt = 0.0;
  double q_factor = 0.0;
  bool use_clamp = false;
  double clamp = 0.0;
  double blowup_r2 = 0.0;
  bool zero_noise = false;
  int substeps = 1;
  double inv_sqrt_substeps = 1.0;
  std::uint64_t seed = 0;
  StreamPurpose purpose = StreamPurpose::step;
  std::int64_t step = 0;

  void noise(std::uint64_t id, double* xi) const {
    if (zero_noise) {
      std::fill(xi, xi + d, 0.0);
      return;
    }
    if (substeps == 1) {
      gaussian_block(seed, purpose, id, static_cast<std::uint64_t>(step), 0, xi, d);
      return;
    }
    std::array<double, kMaxDim> part{};
    std::fill(xi, xi + d, 0.0);
    for (int j = 0; j < substeps; ++j) {
      const auto fine_step = static_cast<std::uint64_t>(step * substeps + j);
      gaussian_block(seed, purpose, id, fine_step, 0, part.data(), d);
      for (int k = 0; k < d; ++k) xi[k] += part[k];
    }
    for (int k = 0; k < d; ++k) xi[k] *= inv_sqrt_substeps;
  }

  // Returns false when the particle left the admissible region.
  bool apply(double* x, const double* xi) const {
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) r2 += x[k] * x[k];
    const double r = std::sqrt(r2);
    // Outside the support both coefficients vanish: the particle stays put.
    if (!(r < frame.radius)) return std::isfinite(r2);
    double r_eval = r;
    if (use_clamp && r < clamp) r_eval = clamp;
    const CoefficientFrame::Values v = frame.at(r_eval);
    double drift = q_factor * v.grad_factor * dt;
    if (r_eval != r) drift = r > 0.0 ? drift * (r_eval / r) : 0.0;
    const double sigma = std::sqrt(2.0 * q_factor * v.rho) * sqrt_dt;
    double out2 = 0.0;
    for (int k = 0; k < d; ++k) {
      x[k] = x[k] + drift * x[k] + sigma * xi[k];
      out2 += x[k] * x[k];
    }
    return std::isfinite(out2) && out2 <= blowup_r2;
  }
};

StepKernel make_kernel(const SDEConfig& config, const FieldEvaluator& field,
                       StreamPurpose purpose) {
  StepKernel k;
  k.d = config.params.d;
  k.dt = config.dt;
  k.sqrt_dt = std::sqrt(config.dt);
  k.q_factor = config.params.q_factor();
  k.use_clamp = config.params.p < 2.0;
  k.clamp = effective_origin_clamp(config);
  const double blowup = 10.0 * field.shifted_support_radius(config.t_final);
  k.blowup_r2 = blowup * blowup;
  k.zero_noise = config.zero_noise;
  k.substeps = config.noise_substeps;
  k.inv_sqrt_substeps = 1.0 / std::sqrt(static_cast<double>(config.noise_substeps));
  k.seed = config.seed;
  k.purpose = purpose;
  return k;
}

[[noreturn]] void throw_blowup(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "particle left 10*R_delta(t_final) or became non-finite at t = " << t
     << " (dt too large?)";
  throw NumericalBlowup(os.str(), t);
}

double time_of(const SDEConfig& config, std::int64_t step) {
  return static_cast<double>(step) * config.dt;
}

}  // namespace

void validate(const SDEConfig& config) {
  const LeibensonParams& p = config.params;
  if (p.d < 1 || p.d > kMaxDim) throw DomainError("SDE dimension must be in [1, 16]");
  if (!(p.q * (p.p - 1.0) > 1.0)) throw RegimeError("q(p-1) > 1 violated");
  if (!(config.delta > 0.0) || !std::isfinite(config.delta)) {
    throw DomainError("delta must be > 0 for the SDE");
  }
  if (!(config.t_final >= 0.0) || !std::isfinite(config.t_final)) {
    throw DomainError("t_final must be >= 0");
  }
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw DomainError("dt must be > 0");
  if (config.t_final > 0.0 && config.dt > config.t_final) {
    throw DomainError("dt must not exceed t_final");
  }
  if (config.n_particles < 1) throw DomainError("particle count must be >= 1");
  if (!std::is_sorted(config.snap_times.begin(), config.snap_times.end())) {
    throw DomainError("snap times must be sorted");
  }
  for (double t : config.snap_times) {
    if (!(t >= 0.0 && t <= config.t_final)) throw DomainError("snap times must lie in [0, t_final]");
  }
  if (!(config.origin_clamp >= 0.0)) throw DomainError("origin clamp must be >= 0");
  if (!is_power_of_two(config.noise_substeps)) {
    throw DomainError("noise substeps must be a power of two");
  }
}

double effective_origin_clamp(const SDEConfig& config) {
  if (config.origin_clamp > 0.0) return config.origin_clamp;
  return 1e-8 * RadialProfile(config.params).support_radius(config.delta);
}

SnapSchedule snap_schedule(const SDEConfig& config) {
  SnapSchedule s;
  s.total_steps = static_cast<std::int64_t>(std::llround(config.t_final / config.dt));
  s.requested = config.snap_times.empty() ? std::vector<double>{config.t_final} : config.snap_times;
  for (double t : s.requested) {
    const std::int64_t k = std::min(static_cast<std::int64_t>(std::llround(t / config.dt)),
                                    s.total_steps);
    s.steps.push_back(k);
    s.actual.push_back(time_of(config, k));
  }
  return s;
}

ParticleEnsemble init_ensemble(const SDEConfig& config, const FieldEvaluator& field,
                               StreamPurpose purpose, std::int64_t start_step) {
  const int d = config.params.d;
  const std::int64_t n = config.n_particles;
  ParticleEnsemble e;
  e.dim = d;
  e.step = start_step;
  e.time = time_of(config, start_step);
  e.positions.assign(static_cast<std::size_t>(n * d), 0.0);
  e.stream_ids.resize(static_cast<std::size_t>(n));
  const double t0 = e.time;
  parallel_for(n, resolve_workers(config.threads), [&](std::int64_t i) {
    const auto id = static_cast<std::uint64_t>(i);
    e.stream_ids[i] = id;
    const double u = uniform_draw(config.seed, purpose, id, 0);
    const double radius = field.sample_radius(t0, u);
    std::array<double, kMaxDim> dir{};
    double norm2 = 0.0;
    gaussian_block(config.seed, purpose, id, 0, 0, dir.data(), d);
    for (int k = 0; k < d; ++k) norm2 += dir[k] * dir[k];
    const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    if (inv == 0.0) dir[0] = 1.0;
    double* x = e.positions.data() + i * d;
    for (int k = 0; k < d; ++k) x[k] = radius * (inv == 0.0 ? dir[k] : dir[k] * inv);
  });
  return e;
}

void advance(ParticleEnsemble& e, const SDEConfig& config, const FieldEvaluator& field,
             std::int64_t n_steps, StreamPurpose purpose) {
  StepKernel kernel = make_kernel(config, field, purpose);
  const int workers = resolve_workers(config.threads);
  const auto n = static_cast<std::int64_t>(e.size());
  const int d = e.dim;
  for (std::int64_t s = 0; s < n_steps; ++s) {
    kernel.step = e.step;
    kernel.frame = field.frame(time_of(config, e.step));
    int bad = 0;
    double* pos = e.positions.data();
    const std::uint64_t* ids = e.stream_ids.data();
#pragma omp parallel for num_threads(workers) schedule(static) reduction(| : bad)
    for (std::int64_t i = 0; i < n; ++i) {
      std::array<double, kMaxDim> xi;
      kernel.noise(ids[i], xi.data());
      if (!kernel.apply(pos + i * d, xi.data())) bad |= 1;
    }
    ++e.step;
    e.time = time_of(config, e.step);
    if (bad) throw_blowup(e.time);
  }
}

std::vector<ParticleEnsemble> simulate(const SDEConfig& config) {
  validate(config);
  const FieldEvaluator field(config.params, config.delta);
  return simulate(config, field);
}

std::vector<ParticleEnsemble> simulate(const SDEConfig& config, const FieldEvaluator& field) {
  validate(config);
  const SnapSchedule schedule = snap_schedule(config);
  ParticleEnsemble e = init_ensemble(config, field);
  std::vector<ParticleEnsemble> snapshots;
  for (std::int64_t k : schedule.steps) {
    advance(e, config, field, k - e.step);
    snapshots.push_back(e);
  }
  advance(e, config, field, schedule.total_steps - e.step);
  return snapshots;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

CouplingDiagnostic simulate_coupled(const SDEConfig& config, const std::vector<double>& offset,
                                    double epsilon) {
  validate(config);
  if (offset.size() != static_cast<std::size_t>(config.params.d)) {
    throw DomainError("coupling offset dimension does not match d");
  }
  if (!(epsilon > 0.0)) throw DomainError("coupling epsilon must be > 0");

  const FieldEvaluator field(config.params, config.delta);
  const SnapSchedule schedule = snap_schedule(config);
  const int d = config.params.d;
  const int workers = resolve_workers(config.threads);

  ParticleEnsemble x = init_ensemble(config, field);
  ParticleEnsemble y = x;
  const auto n = static_cast<std::int64_t>(x.size());
  for (std::int64_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) y.positions[i * d + k] += offset[k];
  }

  CouplingDiagnostic diag;
  diag.epsilon = epsilon;
  diag.identical = true;
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<double> logs(static_cast<std::size_t>(n));
  const double inv_eps2 = 1.0 / (epsilon * epsilon);

  auto record = [&]() {
    parallel_for(n, workers, [&](std::int64_t i) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double diff = x.positions[i * d + k] - y.positions[i * d + k];
        s += diff * diff;
      }
      dist[i] = std::sqrt(s);
      logs[i] = std::log1p(s * inv_eps2);
    });
    // Serial reduction keeps the mean independent of the worker count.
    double sum = 0.0;
    for (double v : logs) sum += v;
    diag.times.push_back(x.time);
    diag.log_distance.push_back(sum / static_cast<double>(n));
    diag.median_distance.push_back(median_of(dist));
    diag.identical = diag.identical &&
                     std::memcmp(x.positions.data(), y.positions.data(),
                                 x.positions.size() * sizeof(double)) == 0;
  };

  record();
  StepKernel kernel = make_kernel(config, field, StreamPurpose::step);
  for (std::int64_t target : schedule.steps) {
    while (x.step < target) {
      kernel.step = x.step;
      kernel.frame = field.frame(x.time);
      int bad = 0;
      double* px = x.positions.data();
      double* py = y.positions.data();
      const std::uint64_t* ids = x.stream_ids.data();
#pragma omp parallel for num_threads(workers) schedule(static) reduction(| : bad)
      for (std::int64_t i = 0; i < n; ++i) {
        std::array<double, kMaxDim> xi;
        kernel.noise(ids[i], xi.data());
        if (!kernel.apply(px + i * d, xi.data())) bad |= 1;
        if (!kernel.apply(py + i * d, xi.data())) bad |= 1;
      }
      ++x.step;
      ++y.step;
      x.time = y.time = time_of(config, x.step);
      if (bad) throw_blowup(x.time);
    }
    if (diag.times.empty() || diag.times.back() != x.time) record();
  }
  return diag;
}

}  // namespace leibenson
