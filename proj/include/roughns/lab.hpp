#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace roughns {

/// Raised for malformed or semantically invalid experiment configs; the
/// message carries line or key-path anchors.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentOutcome {
    int exit_code = 0; // 0 checks pass, 1 check failed, 2 config error, 3 numerical failure
    bool pass = false;
    std::string summary_path;
    std::vector<std::string> failed_checks;
    std::string message;
};

/// Runs the experiment described by a config file. Writes summary.json, CSV
/// tables and SVG plots into the configured output directory (optionally
/// re-rooted). Exit code semantics as documented on ExperimentOutcome.
ExperimentOutcome run_experiment_file(const std::string& config_path,
                                      const std::string& output_root = "");

/// Same, for an in-memory config text.
ExperimentOutcome run_experiment_text(const std::string& config_json,
                                      const std::string& output_root = "");

/// Parses and validates without running. Throws ConfigError on problems.
void validate_config_text(const std::string& config_json);
void validate_config_file(const std::string& path);

struct PresetInfo {
    std::string name;
    std::string description;
};
const std::vector<PresetInfo>& experiment_presets();
/// Full config text of a named preset; throws ConfigError for unknown names.
std::string preset_config_text(const std::string& name);

/// FNV-1a hash of the canonical config dump, hex-encoded.
std::string config_hash(const std::string& canonical_text);

} // namespace roughns
