#pragma once

#include <cstdint>
#include <vector>

#include "leibenson/field.hpp"
#include "leibenson/params.hpp"
#include "leibenson/rng.hpp"

namespace leibenson {

struct SDEConfig {
  LeibensonParams params;
  double delta = 1.0;
  double t_final = 1.0;
  double dt = 1e-4;
  std::int64_t n_particles = 1000;
  std::uint64_t seed = 0;
  std::vector<double> snap_times;
  /// Radius clamp at the origin for p < 2; 0 selects 1e-8 R_δ(0).
  double origin_clamp = 0.0;
  /// Worker threads (0: LEIBENSON_THREADS or the OpenMP default).
  int threads = 0;
  /// Test mode: drop the Brownian increment.
  bool zero_noise = false;
  /// Each step sums this many finer-level normals (scaled by 1/√m), so a run
  /// at dt with m substeps shares its noise path with a run at dt/m.
  int noise_substeps = 1;
};

/// Throws DomainError for inconsistent settings.
void validate(const SDEConfig& config);

double effective_origin_clamp(const SDEConfig& config);

/// Snapshot times rounded to the dt grid.
struct SnapSchedule {
  std::vector<double> requested;
  std::vector<std::int64_t> steps;
  std::vector<double> actual;
  std::int64_t total_steps = 0;
};

SnapSchedule snap_schedule(const SDEConfig& config);

struct ParticleEnsemble {
  double time = 0.0;
  std::int64_t step = 0;
  int dim = 0;
  std::vector<double> positions;  // row-major N × d
  std::vector<std::uint64_t> stream_ids;

  std::size_t size() const { return stream_ids.size(); }
  const double* particle(std::size_t i) const { return positions.data() + i * dim; }
};

/// Exact draw from w_δ(t0): inverse-CDF radius and a normalised Gaussian
/// direction per particle, from that particle's stream.
ParticleEnsemble init_ensemble(const SDEConfig& config, const FieldEvaluator& field,
                               StreamPurpose purpose = StreamPurpose::initial,
                               std::int64_t start_step = 0);

/// Advances every particle by `n_steps` Euler–Maruyama steps. Throws
/// NumericalBlowup (with the step's end time) if a particle leaves
/// 10 R_δ(t_final) or turns non-finite.
void advance(ParticleEnsemble& ensemble, const SDEConfig& config, const FieldEvaluator& field,
             std::int64_t n_steps, StreamPurpose purpose = StreamPurpose::step);

inline void step(ParticleEnsemble& ensemble, const SDEConfig& config, const FieldEvaluator& field) {
  advance(ensemble, config, field, 1);
}

/// Snapshots at every scheduled time (rounded to the grid).
std::vector<ParticleEnsemble> simulate(const SDEConfig& config);
std::vector<ParticleEnsemble> simulate(const SDEConfig& config, const FieldEvaluator& field);

struct CouplingDiagnostic {
  std::vector<double> times;
  std::vector<double> log_distance;  // mean of ln(1 + |X-Y|²/ε²)
  std::vector<double> median_distance;
  double epsilon = 0.0;
  bool identical = false;  // X and Y bitwise equal at every recorded time
};

/// Two ensembles driven by identical noise, Y(0) = X(0) + offset.
CouplingDiagnostic simulate_coupled(const SDEConfig& config, const std::vector<double>& offset,
                                    double epsilon);

}  // namespace leibenson
