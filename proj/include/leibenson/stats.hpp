#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "leibenson/certificates.hpp"
#include "leibenson/field.hpp"
#include "leibenson/sde.hpp"

namespace leibenson {

/// sup_r |F_emp(r) - F(r)| over the radii |X_i - y| against the analytic
/// radial CDF of w_δ(t). Throws EmptyEnsemble.
double ks_radial(const ParticleEnsemble& ensemble, const FieldEvaluator& field, double t);

/// Fraction of particles with |X - y| > R_δ(t)(1 + slack), t = ensemble.time.
double support_violation(const ParticleEnsemble& ensemble, const FieldEvaluator& field,
                         double slack);

double moment2_empirical(const ParticleEnsemble& ensemble, const FieldEvaluator& field);
/// ∫|x - y|² w_δ(t, x) dx.
double moment2_analytic(const FieldEvaluator& field, double t);
double moment2_rel_err(const ParticleEnsemble& ensemble, const FieldEvaluator& field);

/// 1.36/√N, the 5% Kolmogorov critical value.
double ks_noise_floor(std::size_t n);

struct Thresholds {
  double ks_max = 0.01;
  double support_slack = 0.05;
  double support_max = 0.005;
  double moment2_max = 0.02;

  /// key=value lines ('#' comments). Unknown keys and bad numbers throw FormatError.
  static Thresholds parse(const std::string& text);
};

struct Verdict {
  std::string name;
  std::string threshold_key;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SnapshotStats {
  double t = 0.0;
  double t_requested = 0.0;
  std::size_t n_particles = 0;
  double ks_radial = 0.0;
  double support_violation_fraction = 0.0;
  double moment2_rel_err = 0.0;
};

struct VerificationReport {
  nlohmann::json config;
  Thresholds thresholds;
  std::vector<SnapshotStats> snapshots;
  CertificateReport certificates;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

inline constexpr const char* kReportSchema = "leibenson-report/1";

/// Statistics and verdicts for each snapshot; `requested` lists the requested
/// snapshot times in the same order (rounded times come from the ensembles).
VerificationReport build_report(const nlohmann::json& config_echo,
                                const std::vector<ParticleEnsemble>& snapshots,
                                const std::vector<double>& requested,
                                const FieldEvaluator& field, const Thresholds& thresholds);

nlohmann::json to_json(const VerificationReport& report);
/// Throws FormatError on schema mismatch or missing fields.
VerificationReport report_from_json(const nlohmann::json& j);
/// One row per snapshot.
std::string report_csv(const VerificationReport& report);

nlohmann::json to_json(const QuadratureResult& r);
QuadratureResult quadrature_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CertificateReport& c);

struct FlowRestartResult {
  double t_mid = 0.0;  // rounded to the dt grid
  double ks_mid = 0.0;
  double ks_direct = 0.0;
  double ks_restarted = 0.0;
  double noise_floor = 0.0;
  bool agree = false;  // |ks_direct - ks_restarted| <= 2 noise_floor
};

/// Run A: 0 → t_final. Run B: 0 → t_mid, then positions are replaced by an
/// exact draw from w_δ(t_mid) and advanced to t_final with fresh streams.
/// B's first leg uses A's streams, so it is A's path up to t_mid.
FlowRestartResult flow_restart_check(const SDEConfig& config, double t_mid);

/// Same check reusing A's ensembles at t_mid and t_final.
FlowRestartResult flow_restart_check(const SDEConfig& config, const FieldEvaluator& field,
                                     const ParticleEnsemble& direct_mid,
                                     const ParticleEnsemble& direct_final);

}  // namespace leibenson
