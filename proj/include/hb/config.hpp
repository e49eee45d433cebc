#pragma once

// Run configuration: a flat key=value text file plus key=value overrides
// (overrides win). Each command accepts a fixed key set with defaults; any
// other key is rejected, and physical parameters are validated before any
// computation starts.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hb {

struct RunConfig {
  std::string command;  // grid, eigen, testfn, evolve, sweep, fit, verify
  std::string target;   // verify target: lemma51, lemma62, bq, functionals, asymptotics
  std::map<std::string, std::string> values;  // effective values, defaults filled
  std::filesystem::path output_dir;

  double num(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
};

// Commands and verify targets known to the front end.
const std::vector<std::string>& known_commands();
const std::vector<std::string>& known_verify_targets();

// key=value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin);

// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& command, const std::string& target,
                       const std::optional<std::filesystem::path>& file,
                       const std::vector<std::string>& overrides,
                       const std::filesystem::path& output_dir);

}  // namespace hb
