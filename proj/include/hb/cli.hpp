#pragma once

// Command dispatch behind the hb executable. Every run writes into a fresh
// directory: manifest.json (schema-versioned: command, effective config,
// results, file list), the command's CSV data, and timing.txt with the wall
// time (kept out of the JSON so that reruns are byte-identical).

#include <filesystem>
#include <iosfwd>

#include "hb/config.hpp"

namespace hb {

inline constexpr int kManifestSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitRejected = 2 };

// HB_OUTPUT_DIR, when set and non-empty, replaces `requested`.
std::filesystem::path resolve_output_dir(const std::filesystem::path& requested);

// Creates `base`, or base-1, base-2, ... if it already exists.
std::filesystem::path create_unique_dir(const std::filesystem::path& base);

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path dir;
};

// Runs the configured command. Module errors propagate as exceptions; a run
// rejected for boundary contact returns kExitRejected.
RunOutcome run(const RunConfig& config, std::ostream& log);

}  // namespace hb
