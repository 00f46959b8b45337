#include "leibenson/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "leibenson/errors.hpp"

namespace leibenson {
namespace {

std::vector<double> radii_of(const ParticleEnsemble& e, const FieldEvaluator& field) {
  if (e.size() == 0) throw EmptyEnsemble("ensemble has no particles");
  const auto c = field.center();
  std::vector<double> r(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double* x = e.particle(i);
    double s = 0.0;
    for (int k = 0; k < e.dim; ++k) s += (x[k] - c[k]) * (x[k] - c[k]);
    r[i] = std::sqrt(s);
  }
  return r;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

double ks_radial(const ParticleEnsemble& ensemble, const FieldEvaluator& field, double t) {
  std::vector<double> r = radii_of(ensemble, field);
  std::sort(r.begin(), r.end());
  const double n = static_cast<double>(r.size());
  double d = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double f = field.radial_cdf(t, r[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double support_violation(const ParticleEnsemble& ensemble, const FieldEvaluator& field,
                         double slack) {
  if (!(slack >= 0.0)) throw DomainError("support slack must be >= 0");
  const std::vector<double> r = radii_of(ensemble, field);
  const double limit = field.shifted_support_radius(ensemble.time) * (1.0 + slack);
  const auto outside = std::count_if(r.begin(), r.end(), [&](double v) { return v > limit; });
  return static_cast<double>(outside) / static_cast<double>(r.size());
}

double moment2_empirical(const ParticleEnsemble& ensemble, const FieldEvaluator& field) {
  const std::vector<double> r = radii_of(ensemble, field);
  double s = 0.0;
  for (double v : r) s += v * v;
  return s / static_cast<double>(r.size());
}

double moment2_analytic(const FieldEvaluator& field, double t) {
  const double tau = t + field.delta();
  const RadialProfile& profile = field.profile();
  const int d = field.dim();
  const double area = unit_sphere_area(d);
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-12;
  const QuadratureResult res = integrate_radial(
      [&](double r) { return area * profile.w(tau, r) * std::pow(r, d + 1); }, 0.0,
      profile.support_radius(tau), o);
  if (!res.converged) throw ConvergenceError("second moment quadrature did not converge");
  return res.value;
}

double moment2_rel_err(const ParticleEnsemble& ensemble, const FieldEvaluator& field) {
  const double exact = moment2_analytic(field, ensemble.time);
  return std::abs(moment2_empirical(ensemble, field) - exact) / exact;
}

double ks_noise_floor(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

Thresholds Thresholds::parse(const std::string& text) {
  Thresholds t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("thresholds line " + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw FormatError("thresholds line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
    if (key == "ks_max") {
      t.ks_max = v;
    } else if (key == "support_slack") {
      t.support_slack = v;
    } else if (key == "support_max") {
      t.support_max = v;
    } else if (key == "moment2_max") {
      t.moment2_max = v;
    } else {
      throw FormatError("thresholds line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return t;
}

bool VerificationReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

VerificationReport build_report(const nlohmann::json& config_echo,
                                const std::vector<ParticleEnsemble>& snapshots,
                                const std::vector<double>& requested,
                                const FieldEvaluator& field, const Thresholds& thresholds) {
  VerificationReport rep;
  rep.config = config_echo;
  rep.thresholds = thresholds;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const ParticleEnsemble& e = snapshots[i];
    SnapshotStats s;
    s.t = e.time;
    s.t_requested = i < requested.size() ? requested[i] : e.time;
    s.n_particles = e.size();
    s.ks_radial = ks_radial(e, field, e.time);
    s.support_violation_fraction = support_violation(e, field, thresholds.support_slack);
    s.moment2_rel_err = moment2_rel_err(e, field);
    rep.snapshots.push_back(s);

    char shortest[32];
    const auto end = std::to_chars(shortest, shortest + sizeof shortest, s.t).ptr;
    const std::string at = "@t=" + std::string(shortest, end);
    rep.verdicts.push_back({"ks_radial" + at, "ks_max", s.ks_radial, thresholds.ks_max,
                            s.ks_radial <= thresholds.ks_max});
    rep.verdicts.push_back({"support_violation" + at, "support_max",
                            s.support_violation_fraction, thresholds.support_max,
                            s.support_violation_fraction <= thresholds.support_max});
    rep.verdicts.push_back({"moment2_rel_err" + at, "moment2_max", s.moment2_rel_err,
                            thresholds.moment2_max, s.moment2_rel_err <= thresholds.moment2_max});
  }
  return rep;
}

nlohmann::json to_json(const QuadratureResult& r) {
  return {{"value", r.value},
          {"abs_error_estimate", r.abs_error_estimate},
          {"subdivisions", r.subdivisions},
          {"converged", r.converged}};
}

QuadratureResult quadrature_from_json(const nlohmann::json& j) {
  QuadratureResult r;
  r.value = j.at("value").get<double>();
  r.abs_error_estimate = j.at("abs_error_estimate").get<double>();
  r.subdivisions = j.at("subdivisions").get<int>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

nlohmann::json to_json(const CertificateReport& c) {
  nlohmann::json j = nlohmann::json::object();
  if (c.sp_int_1) j["sp_int_1"] = to_json(*c.sp_int_1);
  if (c.sp_int_2) j["sp_int_2"] = to_json(*c.sp_int_2);
  if (c.lemma62_bound) j["lemma62_bound"] = to_json(*c.lemma62_bound);
  if (c.lemma65_weighted) j["lemma65_weighted"] = to_json(*c.lemma65_weighted);
  j["all_finite"] = c.all_finite();
  return j;
}

nlohmann::json to_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["statistic"] =
      "one-sample Kolmogorov-Smirnov distance of the radii |X - y| against the exact radial law";
  j["config"] = rep.config;
  j["thresholds"] = {{"ks_max", rep.thresholds.ks_max},
                     {"support_slack", rep.thresholds.support_slack},
                     {"support_max", rep.thresholds.support_max},
                     {"moment2_max", rep.thresholds.moment2_max}};
  j["snapshots"] = nlohmann::json::array();
  for (const SnapshotStats& s : rep.snapshots) {
    j["snapshots"].push_back({{"t", s.t},
                              {"t_requested", s.t_requested},
                              {"n_particles", s.n_particles},
                              {"ks_radial", s.ks_radial},
                              {"support_violation_fraction", s.support_violation_fraction},
                              {"moment2_rel_err", s.moment2_rel_err}});
  }
  j["certificates"] = to_json(rep.certificates);
  j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : rep.verdicts) {
    j["verdicts"].push_back({{"name", v.name},
                             {"threshold_key", v.threshold_key},
                             {"value", v.value},
                             {"threshold", v.threshold},
                             {"pass", v.pass}});
  }
  j["pass"] = rep.all_pass();
  return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema) {
      throw FormatError("unsupported report schema '" + j.at("schema").get<std::string>() + "'");
    }
    VerificationReport rep;
    rep.config = j.at("config");
    const auto& th = j.at("thresholds");
    rep.thresholds.ks_max = th.at("ks_max").get<double>();
    rep.thresholds.support_slack = th.at("support_slack").get<double>();
    rep.thresholds.support_max = th.at("support_max").get<double>();
    rep.thresholds.moment2_max = th.at("moment2_max").get<double>();
    for (const auto& s : j.at("snapshots")) {
      SnapshotStats st;
      st.t = s.at("t").get<double>();
      st.t_requested = s.at("t_requested").get<double>();
      st.n_particles = s.at("n_particles").get<std::size_t>();
      st.ks_radial = s.at("ks_radial").get<double>();
      st.support_violation_fraction = s.at("support_violation_fraction").get<double>();
      st.moment2_rel_err = s.at("moment2_rel_err").get<double>();
      rep.snapshots.push_back(st);
    }
    const auto& c = j.at("certificates");
    if (c.contains("sp_int_1")) rep.certificates.sp_int_1 = quadrature_from_json(c["sp_int_1"]);
    if (c.contains("sp_int_2")) rep.certificates.sp_int_2 = quadrature_from_json(c["sp_int_2"]);
    if (c.contains("lemma62_bound")) {
      rep.certificates.lemma62_bound = quadrature_from_json(c["lemma62_bound"]);
    }
    if (c.contains("lemma65_weighted")) {
      rep.certificates.lemma65_weighted = quadrature_from_json(c["lemma65_weighted"]);
    }
    for (const auto& v : j.at("verdicts")) {
      Verdict vd;
      vd.name = v.at("name").get<std::string>();
      vd.threshold_key = v.at("threshold_key").get<std::string>();
      vd.value = v.at("value").get<double>();
      vd.threshold = v.at("threshold").get<double>();
      vd.pass = v.at("pass").get<bool>();
      if (!th.contains(vd.threshold_key)) {
        throw FormatError("verdict '" + vd.name + "' references unknown threshold");
      }
      rep.verdicts.push_back(vd);
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string report_csv(const VerificationReport& rep) {
  std::string out = "t,t_requested,n_particles,ks_radial,support_violation_fraction,moment2_rel_err\n";
  for (const SnapshotStats& s : rep.snapshots) {
    out += fmt(s.t) + "," + fmt(s.t_requested) + "," + std::to_string(s.n_particles) + "," +
           fmt(s.ks_radial) + "," + fmt(s.support_violation_fraction) + "," +
           fmt(s.moment2_rel_err) + "\n";
  }
  return out;
}

FlowRestartResult flow_restart_check(const SDEConfig& config, double t_mid) {
  validate(config);
  if (!(t_mid >= 0.0 && t_mid < config.t_final)) {
    throw DomainError("flow restart needs 0 <= t_mid < t_final");
  }
  SDEConfig direct = config;
  direct.snap_times = {t_mid, config.t_final};
  const FieldEvaluator field(config.params, config.delta);
  const std::vector<ParticleEnsemble> snaps = simulate(direct, field);
  return flow_restart_check(config, field, snaps.front(), snaps.back());
}

FlowRestartResult flow_restart_check(const SDEConfig& config, const FieldEvaluator& field,
                                     const ParticleEnsemble& direct_mid,
                                     const ParticleEnsemble& direct_final) {
  validate(config);
  const std::int64_t final_step = snap_schedule(config).total_steps;
  if (direct_final.step != final_step || direct_mid.step >= final_step) {
    throw DomainError("flow restart: ensembles do not match the configuration's time grid");
  }
  FlowRestartResult res;
  res.t_mid = direct_mid.time;
  res.ks_mid = ks_radial(direct_mid, field, direct_mid.time);
  res.ks_direct = ks_radial(direct_final, field, direct_final.time);

  ParticleEnsemble restarted =
      init_ensemble(config, field, StreamPurpose::restart_initial, direct_mid.step);
  advance(restarted, config, field, final_step - restarted.step, StreamPurpose::restart_step);
  res.ks_restarted = ks_radial(restarted, field, restarted.time);
  res.noise_floor = ks_noise_floor(direct_final.size());
  res.agree = std::abs(res.ks_direct - res.ks_restarted) <= 2.0 * res.noise_floor;
  return res;
}

}  // namespace leibenson
