#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "leibenson/sde.hpp"

namespace leibenson {

inline constexpr const char* kRunSchema = "leibenson-run/1";

/// Shortest-form-free decimal with 17 significant digits.
std::string format_double(double v);

std::string sha256_hex(const std::string& data);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Header `t,particle_id,x1,...,xd`, one row per particle per snapshot.
std::string snapshots_csv(const std::vector<ParticleEnsemble>& snapshots);

/// Inverse of snapshots_csv. `dt` recovers the step index of each time block.
/// Throws FormatError on any malformed or truncated row.
std::vector<ParticleEnsemble> parse_snapshots_csv(const std::string& text, int d, double dt);

/// Config echo (everything that determines the output, thread count excluded).
nlohmann::json config_echo(const SDEConfig& config);

/// Metadata for a finished run; `csv` is the exact snapshot file content.
nlohmann::json run_metadata(const SDEConfig& config, const SnapSchedule& schedule,
                            const std::string& csv);

/// Reconstructs the config from a metadata echo. Throws FormatError.
SDEConfig config_from_echo(const nlohmann::json& echo);

/// Pretty JSON text with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace leibenson
