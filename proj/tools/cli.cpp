#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "leibenson/certificates.hpp"
#include "leibenson/errors.hpp"
#include "leibenson/io.hpp"
#include "leibenson/maximal.hpp"
#include "leibenson/sde.hpp"
#include "leibenson/stats.hpp"

namespace leibenson::cli {
namespace fs = std::filesystem;
namespace {

struct SimulateOptions {
  int d = 2;
  double p = 3.0;
  double q = 1.0;
  double delta = 1.0;
  double t_final = 1.0;
  double dt = 1e-4;
  std::int64_t particles = 200000;
  std::uint64_t seed = 42;
  std::vector<double> snap_times;
  std::string out;
  int threads = 0;
  double origin_clamp = 0.0;
};

struct VerifyOptions {
  std::string run;
  std::string thresholds;
  std::string report;
};

struct CertifyOptions {
  int d = 2;
  double p = 3.0;
  double q = 1.0;
  double delta = 0.0;
  double T = 1.0;
  double tol = 1e-8;
  std::string out;
};

struct RegimesOptions {
  int d = 2;
  std::vector<double> p_range{1.0, 4.0};
  std::vector<double> q_range{0.0, 4.0};
  int steps = 50;
  std::string out;
};

struct MaximalOptions {
  double R = 1.0;
  double xnorm = 2.0;
  int grid = 4096;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  SDEConfig config;
  try {
    config.params = derive_constants(o.d, o.p, o.q);
    config.delta = o.delta;
    config.t_final = o.t_final;
    config.dt = o.dt;
    config.n_particles = o.particles;
    config.seed = o.seed;
    config.snap_times = o.snap_times.empty() ? std::vector<double>{o.t_final} : o.snap_times;
    config.threads = o.threads;
    config.origin_clamp = o.origin_clamp;
    validate(config);
  } catch (const Error& e) {
    err << "simulate: " << e.what() << "\n";
    return kUsage;
  }

  std::vector<ParticleEnsemble> snapshots;
  try {
    snapshots = simulate(config);
  } catch (const NumericalBlowup& e) {
    err << "simulate: numerical blow-up: " << e.what() << "\n";
    return kNumeric;
  }

  const fs::path dir(o.out);
  fs::create_directories(dir);
  const std::string csv = snapshots_csv(snapshots);
  const nlohmann::json meta = run_metadata(config, snap_schedule(config), csv);
  atomic_write(dir / "snapshots.csv", csv);
  atomic_write(dir / "metadata.json", dump_json(meta));
  out << "wrote " << snapshots.size() << " snapshots of " << config.n_particles
      << " particles to " << dir.string() << "\n";
  return kPass;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  const fs::path dir(o.run);
  SDEConfig config;
  std::vector<ParticleEnsemble> snapshots;
  nlohmann::json meta;
  Thresholds thresholds;
  try {
    try {
      meta = nlohmann::json::parse(read_file(dir / "metadata.json"));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("metadata.json: ") + e.what());
    }
    if (meta.value("schema", "") != kRunSchema) throw FormatError("metadata schema mismatch");
    const std::string csv = read_file(dir / meta.at("snapshots_csv").get<std::string>());
    if (sha256_hex(csv) != meta.at("snapshots_sha256").get<std::string>()) {
      throw FormatError("snapshot CSV hash does not match metadata (file modified or truncated)");
    }
    if (sha256_hex(meta.at("config").dump()) != meta.at("config_hash").get<std::string>()) {
      throw FormatError("config echo hash does not match metadata");
    }
    config = config_from_echo(meta.at("config"));
    validate(config);
    snapshots = parse_snapshots_csv(csv, config.params.d, config.dt);
    const SnapSchedule schedule = snap_schedule(config);
    if (snapshots.size() != schedule.steps.size()) {
      throw FormatError("snapshot count does not match the recorded schedule");
    }
    for (const ParticleEnsemble& e : snapshots) {
      if (e.size() != static_cast<std::size_t>(config.n_particles)) {
        throw FormatError("snapshot particle count does not match the configuration");
      }
    }
    if (!o.thresholds.empty()) thresholds = Thresholds::parse(read_file(o.thresholds));
  } catch (const nlohmann::json::exception& e) {
    err << "verify: malformed metadata: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "verify: " << e.what() << "\n";
    return kUsage;
  }

  const FieldEvaluator field(config.params, config.delta);
  nlohmann::json echo = meta.at("config");
  echo["config_hash"] = meta.at("config_hash");
  echo["snapshots_sha256"] = meta.at("snapshots_sha256");
  const VerificationReport report =
      build_report(echo, snapshots, snap_schedule(config).requested, field, thresholds);

  const fs::path report_path = o.report.empty() ? dir / "report.json" : fs::path(o.report);
  fs::path csv_path = report_path;
  csv_path.replace_extension(".csv");
  atomic_write(report_path, dump_json(to_json(report)));
  atomic_write(csv_path, report_csv(report));

  for (const Verdict& v : report.verdicts) {
    out << (v.pass ? "pass " : "FAIL ") << v.name << " = " << v.value << " (" << v.threshold_key
        << " " << v.threshold << ")\n";
  }
  out << "report: " << report_path.string() << "\n";
  return report.all_pass() ? kPass : kVerdictFailure;
}

int cmd_certify(const CertifyOptions& o, bool with_delta, std::ostream& out, std::ostream& err) {
  LeibensonParams params;
  try {
    params = derive_constants(o.d, o.p, o.q);
    if (!(o.T >= 0.0)) throw DomainError("--T must be >= 0");
    if (!(o.tol > 0.0)) throw DomainError("--tol must be > 0");
    const RegimeReport regime = classify_regime(params);
    if (!regime.superposition_ok) {
      throw RegimeError("superposition regime requires p > (1+d)/d");
    }
    if (with_delta) {
      if (!(o.delta > 0.0)) throw DomainError("--delta must be > 0");
      if (!regime.strong_solution_ok) {
        throw RegimeError("strong-solution regime requires d >= 2, p > d/(d-1), "
                          "q > (|p-2|+d)/(d(p-1))");
      }
    }
  } catch (const Error& e) {
    err << "certify: " << e.what() << "\n";
    return kUsage;
  }

  CertificateReport certs;
  const SuperpositionCertificates sp = certify_superposition(params, o.T, o.tol);
  certs.sp_int_1 = sp.sp_int_1;
  certs.sp_int_2 = sp.sp_int_2;
  if (with_delta) {
    const LemmaCertificates lb = certify_lemma_bounds(params, o.delta, o.T, o.tol);
    certs.lemma62_bound = lb.lemma62_bound;
    certs.lemma65_weighted = lb.lemma65_weighted;
  }

  VerificationReport report;
  report.config = {{"d", o.d}, {"p", o.p}, {"q", o.q}, {"T", o.T}, {"tol", o.tol}};
  if (with_delta) report.config["delta"] = o.delta;
  report.certificates = certs;
  const std::string text = dump_json(to_json(report));
  if (o.out.empty()) {
    out << text;
  } else {
    atomic_write(o.out, text);
    out << "certificates " << (certs.all_finite() ? "finite" : "NOT converged") << ", report: "
        << o.out << "\n";
  }
  if (!certs.all_finite()) {
    err << "certify: at least one certificate did not converge to --tol\n";
    return kVerdictFailure;
  }
  return kPass;
}

int cmd_regimes(const RegimesOptions& o, std::ostream& out, std::ostream& err) {
  const double p_lo = o.p_range[0], p_hi = o.p_range[1];
  const double q_lo = o.q_range[0], q_hi = o.q_range[1];
  const bool ok = o.d >= 1 && o.steps >= 1 && std::isfinite(p_lo) && std::isfinite(p_hi) &&
                  std::isfinite(q_lo) && std::isfinite(q_hi) && p_lo >= 1.0 && p_hi > p_lo &&
                  q_lo >= 0.0 && q_hi > q_lo;
  if (!ok) {
    err << "regimes: need d >= 1, steps >= 1, 1 <= p_lo < p_hi and 0 <= q_lo < q_hi\n";
    return kUsage;
  }
  std::string csv =
      "d,p,q,barenblatt_ok,superposition_ok,markov_ok,strong_solution_ok,uniqueness_i_ok,"
      "uniqueness_ii_ok\n";
  for (int i = 1; i <= o.steps; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / o.steps;
    for (int j = 1; j <= o.steps; ++j) {
      const double q = q_lo + (q_hi - q_lo) * j / o.steps;
      const RegimeReport r = classify_regime(o.d, p, q);
      csv += std::to_string(o.d) + "," + format_double(p) + "," + format_double(q);
      for (bool flag : {r.barenblatt_ok, r.superposition_ok, r.markov_ok, r.strong_solution_ok,
                        r.uniqueness_i_ok, r.uniqueness_ii_ok}) {
        csv += flag ? ",1" : ",0";
      }
      csv += "\n";
    }
  }
  if (o.out.empty()) {
    out << csv;
  } else {
    atomic_write(o.out, csv);
  }
  return kPass;
}

int cmd_maximal_demo(const MaximalOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const CapGeometry g{o.R, o.xnorm};
    const double formula = maximal_surface_d3(g);
    const BruteForceMaximum brute = maximal_surface_bruteforce(g, o.grid);
    const double gap = std::abs(o.xnorm - o.R);
    const bool branch1 = std::sqrt(3.0) * gap <= o.xnorm + o.R;
    out << std::setprecision(12);
    out << "R            " << o.R << "\n"
        << "|x|          " << o.xnorm << "\n"
        << "branch       " << (branch1 ? "interior maximum" : "full sphere") << "\n"
        << "formula      " << formula << "\n"
        << "bruteforce   " << brute.value << "\n"
        << "rel_diff     " << std::abs(brute.value - formula) / formula << "\n"
        << "argmax_r     " << brute.argmax << "\n"
        << "expected_r   " << (branch1 ? std::sqrt(3.0) * gap : o.xnorm + o.R) << "\n";
  } catch (const Error& e) {
    err << "maximal-demo: " << e.what() << "\n";
    return kUsage;
  }
  return kPass;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Splices `key=value` lines of a simulate --config file into the argument list.
// Keys must be simulate flag names; flags already on the command line win.
std::vector<std::string> expand_config_file(const std::vector<std::string>& args,
                                            const CLI::App& simulate_cmd) {
  if (args.empty() || args.front() != "simulate") return args;
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw FormatError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;

  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> from_file;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string flag = "--" + key;
    if (key == "config" || simulate_cmd.get_option_no_throw(flag) == nullptr) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (given(flag)) continue;
    from_file.push_back(flag);
    from_file.push_back(trim(line.substr(eq + 1)));
  }
  rest.insert(rest.begin() + 1, from_file.begin(), from_file.end());
  return rest;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Barenblatt solutions of the Leibenson equation: particle simulation and checks",
               "leibenson"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Euler-Maruyama particle run");
  std::string config_file;
  simulate_cmd->add_option("--config", config_file,
                           "flat key=value file using the flag names; flags given on the "
                           "command line take precedence");
  simulate_cmd->add_option("--d", sim.d, "dimension")->required();
  simulate_cmd->add_option("--p", sim.p, "exponent p > 1")->required();
  simulate_cmd->add_option("--q", sim.q, "exponent q > 0")->required();
  simulate_cmd->add_option("--delta", sim.delta, "time offset delta > 0")->required();
  simulate_cmd->add_option("--t-final", sim.t_final, "final time")->required();
  simulate_cmd->add_option("--dt", sim.dt, "time step")->required();
  simulate_cmd->add_option("--particles", sim.particles, "particle count")->required();
  simulate_cmd->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate_cmd->add_option("--snap-times", sim.snap_times, "comma-separated snapshot times")
      ->delimiter(',');
  simulate_cmd->add_option("--out", sim.out, "output directory")->required();
  simulate_cmd->add_option("--threads", sim.threads, "worker threads (default LEIBENSON_THREADS)");
  simulate_cmd->add_option("--origin-clamp", sim.origin_clamp,
                           "radius clamp at the origin for p < 2 (default 1e-8 R_delta(0))");

  VerifyOptions ver;
  auto* verify_cmd = app.add_subcommand("verify", "Compare a run against the exact law");
  verify_cmd->add_option("--run", ver.run, "run directory")->required();
  verify_cmd->add_option("--thresholds", ver.thresholds, "key=value thresholds file");
  verify_cmd->add_option("--report", ver.report, "report path (default <run>/report.json)");

  CertifyOptions cert;
  auto* certify_cmd = app.add_subcommand("certify", "Integrability certificates");
  certify_cmd->add_option("--d", cert.d)->required();
  certify_cmd->add_option("--p", cert.p)->required();
  certify_cmd->add_option("--q", cert.q)->required();
  auto* delta_opt = certify_cmd->add_option("--delta", cert.delta, "enables the lemma bounds");
  certify_cmd->add_option("--T", cert.T, "time horizon");
  certify_cmd->add_option("--tol", cert.tol, "absolute tolerance of each certificate");
  certify_cmd->add_option("--out", cert.out, "report path (default: stdout)");

  RegimesOptions reg;
  auto* regimes_cmd = app.add_subcommand("regimes", "CSV map of the regime predicates");
  regimes_cmd->add_option("--d", reg.d)->required();
  regimes_cmd->add_option("--p-range", reg.p_range, "lo,hi (grid excludes lo)")
      ->delimiter(',')
      ->expected(2);
  regimes_cmd->add_option("--q-range", reg.q_range, "lo,hi (grid excludes lo)")
      ->delimiter(',')
      ->expected(2);
  regimes_cmd->add_option("--steps", reg.steps, "grid points per axis");
  regimes_cmd->add_option("--out", reg.out, "CSV path (default: stdout)");

  MaximalOptions mx;
  auto* maximal_cmd = app.add_subcommand("maximal-demo", "Closed-form vs brute-force maximal function");
  maximal_cmd->add_option("--R", mx.R, "sphere radius");
  maximal_cmd->add_option("--xnorm", mx.xnorm, "|x|");
  maximal_cmd->add_option("--grid", mx.grid, "brute-force grid size");

  std::vector<std::string> expanded;
  try {
    expanded = expand_config_file(args, *simulate_cmd);
  } catch (const Error& e) {
    err << "leibenson: " << e.what() << "\n";
    return kUsage;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "leibenson: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, out, err);
    if (*verify_cmd) return cmd_verify(ver, out, err);
    if (*certify_cmd) return cmd_certify(cert, delta_opt->count() > 0, out, err);
    if (*regimes_cmd) return cmd_regimes(reg, out, err);
    if (*maximal_cmd) return cmd_maximal_demo(mx, out, err);
  } catch (const NumericalBlowup& e) {
    err << "leibenson: numerical blow-up: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "leibenson: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace leibenson::cli
