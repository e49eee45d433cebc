// hb: command-line front end.
//
//   hb <command> [--config FILE] [--out DIR] [key=value ...]
//   hb verify <target> [--config FILE] [--out DIR] [key=value ...]
//
// Exit status: 0 success, 1 error, 2 run rejected (boundary contact).

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hb/cli.hpp"
#include "hb/config.hpp"

namespace {

struct Invocation {
  std::string command;
  std::string target;
  std::string config_file;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Invocation& inv) {
  app->add_option("--config,-c", inv.config_file, "key=value configuration file");
  app->add_option("--out,-o", inv.out_dir, "output directory (HB_OUTPUT_DIR overrides)");
  app->add_option("overrides", inv.overrides, "key=value overrides");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blow-up laboratory for semilinear waves on the Schwarzschild exterior"};
  app.require_subcommand(1);
  Invocation inv;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"grid", "dump the tortoise grid with r, F and V"},
      {"eigen", "solve one growing static solution"},
      {"testfn", "tabulate the b_q weight and its bound ratios"},
      {"evolve", "evolve one data set to blow-up or the horizon"},
      {"sweep", "lifespan sweep over eps"},
      {"fit", "power-law fit of a sweep CSV"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, inv);
    sub->callback([&inv, n = name] { inv.command = n; });
  }
  CLI::App* verify = app.add_subcommand("verify", "property checks");
  verify->require_subcommand(1);
  for (const auto& target : hb::known_verify_targets()) {
    CLI::App* sub = verify->add_subcommand(target);
    add_common(sub, inv);
    sub->callback([&inv, t = target] {
      inv.command = "verify";
      inv.target = t;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hb::kExitError;
  }

  try {
    std::optional<std::filesystem::path> file;
    if (!inv.config_file.empty()) file = inv.config_file;
    std::string default_dir = "hb-runs/" + inv.command;
    if (!inv.target.empty()) default_dir += "-" + inv.target;
    const auto dir =
        hb::resolve_output_dir(inv.out_dir.empty() ? default_dir : inv.out_dir);
    const hb::RunConfig config = hb::parse_config(inv.command, inv.target, file, inv.overrides, dir);
    return hb::run(config, std::cerr).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hb::kExitError;
  }
}
