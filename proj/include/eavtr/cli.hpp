#pragma once

#include <map>
#include <string>
#include <vector>

#include "eavtr/common.hpp"

namespace eavtr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat, typed key-value run configuration: per-command defaults, overlaid by
// an optional --config JSON file, overlaid by repeated --set key=value flags.
// Fully resolved before any module executes.
struct RunConfig {
    std::string command;
    std::string json_text;  // canonical serialized form (sorted keys)

    // Hex FNV-1a of (command + canonical JSON); names the run directory.
    std::string hash() const;
};

RunConfig resolve_config(const std::string& command, const std::string& config_path,
                         const std::vector<std::string>& overrides);

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string config_json;
    std::map<std::string, std::string> input_hashes;  // path -> content hash
    std::vector<std::string> outputs;                 // relative to the run dir
    double wall_clock_seconds = 0.0;
    std::string tool_version = kToolVersion;
};

// Atomic write (temp file + rename) of run_manifest.json inside run_dir.
void write_run_manifest(const RunManifest& manifest, const std::string& run_dir);

// Hex FNV-1a over a file's bytes; IoError when unreadable.
std::string file_hash(const std::string& path);

// Full command-line entry point: exit 0 on success, 2 on usage errors,
// 1 with a single-line "<error-class>: <message>" on stderr otherwise.
int dispatch(int argc, const char* const* argv);

}  // namespace eavtr::cli
