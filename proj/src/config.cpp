#include "hb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hb/errors.hpp"
#include "hb/io.hpp"

namespace hb {

namespace {

using Defaults = std::map<std::string, std::string>;

const Defaults kPhysics{{"M", "1"}, {"R1", "1"}, {"R2", "2"}, {"h", "0.05"}, {"cfl", "0.5"}};

Defaults merge(Defaults a, const Defaults& b) {
  for (const auto& [k, v] : b) a[k] = v;
  return a;
}

const Defaults& evolve_defaults() {
  static const Defaults d = merge(kPhysics, {{"p", "2"},
                                             {"eps", "1"},
                                             {"g_scale", "1"},
                                             {"T_max", "100"},
                                             {"threshold", "1e8"},
                                             {"secondary_threshold", "1e6"},
                                             {"dt_min", "1e-12"},
                                             {"snapshot_dt", "0"},
                                             {"snapshot_stride", "1"},
                                             {"nonlinear", "true"},
                                             {"domain_half_width", "0"}});
  return d;
}

Defaults defaults_for(const std::string& command, const std::string& target) {
  if (command == "grid") {
    return {{"M", "1"}, {"rstar_min", "-40"}, {"rstar_max", "60"}, {"h", "0.05"}};
  }
  if (command == "eigen") {
    return {{"M", "1"}, {"lambda", "0.5"}, {"rstar_min", "-40"}, {"rstar_max", "60"},
            {"h", "0.01"}, {"free_potential", "false"}};
  }
  if (command == "testfn") {
    return {{"M", "1"},        {"R1", "1"},
            {"R2", "2"},       {"q", "0.5857864376269049"},
            {"h", "0.05"},     {"t_list", "100,215.443469,464.158883,1000,2154.43469,4641.58883,10000"},
            {"rstar_list", "6.718281828459045,10,30,100"}};
  }
  if (command == "evolve") return evolve_defaults();
  if (command == "sweep") {
    auto d = evolve_defaults();
    d.erase("eps");
    d.erase("snapshot_dt");
    d.erase("snapshot_stride");
    d.erase("domain_half_width");
    d["eps_list"] = "4,2.72517,1.85664,1.26491,0.861774,0.58712,0.4";
    d["T_max"] = "6000";
    d["workers"] = "0";
    d["gate"] = "true";
    return d;
  }
  if (command == "fit") return {{"input", ""}};
  if (command == "verify") {
    if (target == "lemma51") {
      return {{"alpha_list", "0,1,2"}, {"beta_list", "0.5,1"}, {"L_list", "1,10"},
              {"t_min", "1"}, {"t_max", "10000"}, {"t_count", "41"}};
    }
    if (target == "lemma62") {
      return {{"p1", "2.414213562373095"}, {"p2", "2.414213562373095"}, {"K1", "1"},
              {"K2", "1"}, {"t0", "3"}, {"delta_min", "1e-4"}, {"delta_max", "1e-2"},
              {"delta_count", "9"}, {"step_fraction", "0.01"}};
    }
    if (target == "bq") {
      return {{"M", "1"}, {"R1", "1"}, {"R2", "2"}, {"q", "0.5857864376269049"},
              {"h", "0.25"}, {"t_min", "100"}, {"t_max", "10000"}, {"t_count", "9"},
              {"rstar_count", "6"}};
    }
    if (target == "functionals") {
      auto d = evolve_defaults();
      d["eps"] = "0.75";
      d["h"] = "0.1";
      d["T_max"] = "400";
      d["R3"] = "1";
      d["snapshot_dt"] = "0.5";
      d["snapshot_stride"] = "2";
      d["T_count"] = "12";
      d["q"] = "0.5857864376269049";
      d["L_count"] = "3";
      return d;
    }
    if (target == "asymptotics") {
      return {{"M", "1"}, {"lambda_list", "0.1,0.25,0.5,1"}, {"rstar_min", "-40"},
              {"rstar_max", "60"}, {"h", "0.01"}};
    }
    throw ConfigError("verify: unknown target '" + target + "'");
  }
  throw ConfigError("unknown command '" + command + "'");
}

bool is_bool_key(const std::string& k) {
  return k == "nonlinear" || k == "gate" || k == "free_potential";
}

bool is_list_key(const std::string& k) { return k.size() > 5 && k.ends_with("_list"); }

bool is_string_key(const std::string& k) { return k == "input"; }

bool is_count_key(const std::string& k) {
  return k == "snapshot_stride" || k == "workers" || k.ends_with("_count");
}

void validate(const RunConfig& c) {
  // Type check every value first so the message names the key.
  for (const auto& [k, v] : c.values) {
    if (is_string_key(k)) continue;
    if (is_bool_key(k)) {
      if (v != "true" && v != "false") throw ConfigError(k + ": expected true or false");
      continue;
    }
    if (is_list_key(k)) {
      (void)c.list(k);
      continue;
    }
    const double x = parse_double(v, k);
    if (!std::isfinite(x)) throw ConfigError(k + ": must be finite");
    if (is_count_key(k)) (void)c.count(k);
  }
  auto has = [&](const char* k) { return c.values.count(k) != 0; };
  auto positive = [&](const char* k) {
    if (has(k) && !(c.num(k) > 0.0)) throw ConfigError(std::string(k) + ": must be positive");
  };
  for (const char* k : {"M", "h", "eps", "T_max", "threshold", "secondary_threshold", "dt_min",
                        "lambda", "q", "R3", "K1", "K2", "step_fraction", "delta_min",
                        "delta_max", "t_max"}) {
    positive(k);
  }
  if (has("p")) {
    const double p = c.num("p");
    if (!(p >= 2.0 && p <= 1.0 + std::sqrt(2.0) + 1e-12)) {
      throw ConfigError("p: must lie in [2, 1+sqrt(2)]");
    }
  }
  if (has("R1") || has("R2")) {
    if (!(c.num("R1") > 0.0 && c.num("R2") > c.num("R1"))) {
      throw ConfigError("R1, R2: need 0 < R1 < R2");
    }
  }
  if (has("cfl") && !(c.num("cfl") > 0.0 && c.num("cfl") <= 1.0)) {
    throw ConfigError("cfl: must lie in (0, 1]");
  }
  if (has("rstar_min") && has("rstar_max") && !(c.num("rstar_min") < c.num("rstar_max"))) {
    throw ConfigError("rstar_min: must be below rstar_max");
  }
  if (has("q") && !(c.num("q") < 1.0)) throw ConfigError("q: must lie in (0, 1)");
  if (has("snapshot_stride") && !(c.num("snapshot_stride") >= 1.0)) {
    throw ConfigError("snapshot_stride: must be >= 1");
  }
  if (has("snapshot_dt") && c.num("snapshot_dt") < 0.0) {
    throw ConfigError("snapshot_dt: must be nonnegative");
  }
  if (has("eps_list")) {
    for (double e : c.list("eps_list")) {
      if (!(e > 0.0)) throw ConfigError("eps_list: entries must be positive");
    }
  }
  if (has("lambda_list")) {
    for (double l : c.list("lambda_list")) {
      if (!(l > 0.0)) throw ConfigError("lambda_list: entries must be positive");
    }
  }
  if (has("p1") && !(c.num("p1") > 1.0)) throw ConfigError("p1: must exceed 1");
  if (has("p2") && !(c.num("p2") > 1.0 && c.num("p2") < c.num("p1") + 1.0)) {
    throw ConfigError("p2: need 1 < p2 < p1 + 1");
  }
  if (has("t0") && !(c.num("t0") > 2.0)) throw ConfigError("t0: must exceed 2");
  if (c.command == "fit" && c.str("input").empty()) throw ConfigError("input: path required");
}

}  // namespace

double RunConfig::num(const std::string& key) const { return parse_double(str(key), key); }

std::size_t RunConfig::count(const std::string& key) const {
  const double v = num(key);
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(key + ": expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

bool RunConfig::flag(const std::string& key) const { return str(key) == "true"; }

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError(key + ": not set");
  return it->second;
}

std::vector<double> RunConfig::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"grid", "eigen", "testfn", "evolve",
                                          "sweep", "fit",   "verify"};
  return c;
}

const std::vector<std::string>& known_verify_targets() {
  static const std::vector<std::string> t{"lemma51", "lemma62", "bq", "functionals",
                                          "asymptotics"};
  return t;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig parse_config(const std::string& command, const std::string& target,
                       const std::optional<std::filesystem::path>& file,
                       const std::vector<std::string>& overrides,
                       const std::filesystem::path& output_dir) {
  RunConfig c;
  c.command = command;
  c.target = target;
  c.output_dir = output_dir;
  c.values = defaults_for(command, target);

  auto apply = [&](const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
      if (!c.values.count(k)) {
        std::string what = command + (target.empty() ? "" : " " + target);
        throw ConfigError(k + ": unknown key for '" + what + "'");
      }
      c.values[k] = v;
    }
  };
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("config: cannot read " + file->string());
    std::stringstream buf;
    buf << in.rdbuf();
    apply(parse_config_text(buf.str(), file->string()));
  }
  std::string joined;
  for (const auto& o : overrides) joined += o + "\n";
  apply(parse_config_text(joined, "command line"));
  validate(c);
  return c;
}

}  // namespace hb
