#include "leibenson/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

#include "leibenson/errors.hpp"
#include "leibenson/version.hpp"

namespace leibenson {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string snapshots_csv(const std::vector<ParticleEnsemble>& snapshots) {
  const int d = snapshots.empty() ? 0 : snapshots.front().dim;
  std::string out = "t,particle_id";
  for (int k = 1; k <= d; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  char buf[40];
  for (const ParticleEnsemble& e : snapshots) {
    const std::string t = format_double(e.time);
    for (std::size_t i = 0; i < e.size(); ++i) {
      out += t;
      out += ',';
      out += std::to_string(e.stream_ids[i]);
      const double* x = e.particle(i);
      for (int k = 0; k < d; ++k) {
        const auto res = std::to_chars(buf, buf + sizeof buf, x[k], std::chars_format::general, 17);
        out += ',';
        out.append(buf, res.ptr);
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

template <class T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("snapshot CSV line " + std::to_string(line) + ": bad field '" +
                      std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<ParticleEnsemble> parse_snapshots_csv(const std::string& text, int d, double dt) {
  std::string expected = "t,particle_id";
  for (int k = 1; k <= d; ++k) expected += ",x" + std::to_string(k);
  const std::size_t header_end = text.find('\n');
  if (header_end == std::string::npos || text.substr(0, header_end) != expected) {
    throw FormatError("snapshot CSV header mismatch (expected '" + expected + "')");
  }
  if (text.back() != '\n') throw FormatError("snapshot CSV is truncated (no final newline)");

  std::vector<ParticleEnsemble> out;
  std::size_t pos = header_end + 1;
  std::size_t line = 1;
  std::string_view current_t;
  std::vector<std::string_view> fields;
  while (pos < text.size()) {
    ++line;
    const std::size_t end = text.find('\n', pos);
    const std::string_view row(text.data() + pos, end - pos);
    pos = end + 1;
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      fields.push_back(row.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != static_cast<std::size_t>(d + 2)) {
      throw FormatError("snapshot CSV line " + std::to_string(line) + ": expected " +
                        std::to_string(d + 2) + " fields");
    }
    if (out.empty() || fields[0] != current_t) {
      current_t = fields[0];
      ParticleEnsemble e;
      e.dim = d;
      e.time = parse_field<double>(fields[0], line);
      e.step = static_cast<std::int64_t>(std::llround(e.time / dt));
      out.push_back(std::move(e));
    }
    ParticleEnsemble& e = out.back();
    e.stream_ids.push_back(parse_field<std::uint64_t>(fields[1], line));
    for (int k = 0; k < d; ++k) e.positions.push_back(parse_field<double>(fields[2 + k], line));
  }
  return out;
}

nlohmann::json config_echo(const SDEConfig& c) {
  return {{"d", c.params.d},
          {"p", c.params.p},
          {"q", c.params.q},
          {"delta", c.delta},
          {"t_final", c.t_final},
          {"dt", c.dt},
          {"particles", c.n_particles},
          {"seed", c.seed},
          {"snap_times", c.snap_times},
          {"origin_clamp", effective_origin_clamp(c)},
          {"zero_noise", c.zero_noise},
          {"noise_substeps", c.noise_substeps}};
}

nlohmann::json run_metadata(const SDEConfig& config, const SnapSchedule& schedule,
                            const std::string& csv) {
  const nlohmann::json echo = config_echo(config);
  nlohmann::json j;
  j["schema"] = kRunSchema;
  j["version"] = kVersion;
  j["config"] = echo;
  j["config_hash"] = sha256_hex(echo.dump());
  j["derived"] = {{"beta", config.params.beta},
                  {"gamma", config.params.gamma},
                  {"kappa", config.params.kappa},
                  {"c_norm", config.params.c_norm}};
  j["snap_times_requested"] = schedule.requested;
  j["snap_times_actual"] = schedule.actual;
  j["snap_steps"] = schedule.steps;
  j["origin_policy"] = {{"clamp_radius", effective_origin_clamp(config)},
                        {"active", config.params.p < 2.0},
                        {"rule", "coefficients evaluated at max(|x|, clamp_radius), direction kept"}};
  j["snapshots_csv"] = "snapshots.csv";
  j["snapshots_sha256"] = sha256_hex(csv);
  return j;
}

SDEConfig config_from_echo(const nlohmann::json& echo) {
  try {
    SDEConfig c;
    c.params = derive_constants(echo.at("d").get<int>(), echo.at("p").get<double>(),
                                echo.at("q").get<double>());
    c.delta = echo.at("delta").get<double>();
    c.t_final = echo.at("t_final").get<double>();
    c.dt = echo.at("dt").get<double>();
    c.n_particles = echo.at("particles").get<std::int64_t>();
    c.seed = echo.at("seed").get<std::uint64_t>();
    c.snap_times = echo.at("snap_times").get<std::vector<double>>();
    c.origin_clamp = echo.at("origin_clamp").get<double>();
    c.zero_noise = echo.at("zero_noise").get<bool>();
    c.noise_substeps = echo.at("noise_substeps").get<int>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed config echo: ") + e.what());
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace leibenson
