#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dal/types.hpp"

namespace dal {

/// Flat key-value config with dotted section names. Parsing is strict:
/// a key outside the command's schema is a usage error.
struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
};

/// Parses `key = value` lines ('#' comments, blank lines ignored).
/// Duplicate keys are rejected. The `command` key is optional here; the
/// caller may supply it (CLI subcommand) or override it.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Applies `key=value` overrides, then validates against the command's
/// schema. Unknown command or unknown key throws ConfigError.
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides);
void validate_config(const ExperimentConfig& cfg);

/// Known subcommands in dispatch order.
const std::vector<std::string>& known_commands();

struct RunOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
};

struct RunManifest {
  std::string command;
  std::string config_hash;  // FNV-1a 64 of the canonical resolved config
  std::uint64_t master_seed = 0;
  std::string version;
  struct Artifact {
    std::string name;
    std::uint64_t bytes = 0;
    std::string checksum;  // FNV-1a 64 hex of the file contents
  };
  std::vector<Artifact> artifacts;
  double wall_seconds = 0.0;
};

/// Dispatches the named experiment, writes its artifacts plus
/// manifest.json under out_dir. Returns 0 on pass, 2 on certification
/// failure; usage problems throw ConfigError (exit code 1 at the CLI).
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, RunManifest* manifest = nullptr);

/// FNV-1a 64-bit, the checksum used in manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace dal
