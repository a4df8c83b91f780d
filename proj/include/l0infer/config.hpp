#pragma once

#include <map>
#include <string>
#include <vector>

#include "l0infer/mc.hpp"

namespace l0infer {

// Thrown for malformed files, unknown keys, and value-level schema
// violations; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using FlatConfig = std::map<std::string, std::string>;

// Parses the key-table text format: [section] headers, key = value lines,
// '#' comments, optional quotes, [a, b, c] arrays stored as "a,b,c".
FlatConfig parse_key_table(const std::string& text);

// JSON alternative encoding; nested objects flatten to dotted keys.
FlatConfig parse_json_config(const std::string& text);

// Dispatches on content (leading '{' selects JSON).
FlatConfig parse_config_text(const std::string& text);
FlatConfig load_config_file(const std::string& path);

/// Applies a dotted-key=value override.
void apply_override(FlatConfig& cfg, const std::string& assignment);

/// Validates keys and value types against the schema and fills defaults.
/// The result contains every schema key exactly once.
FlatConfig materialize(const FlatConfig& cfg);

/// Canonical key-table rendering of a materialized config; reparsing it
/// reproduces the config exactly.
std::string render_key_table(const FlatConfig& cfg);

std::vector<std::string> schema_keys();

// Typed views over a materialized config.
ExperimentConfig experiment_from_config(const FlatConfig& cfg);
BoundaryConfig boundary_from_config(const FlatConfig& cfg);
CsConstruction construction_from_config(const FlatConfig& cfg);
bool write_sample_requested(const FlatConfig& cfg);

}  // namespace l0infer
