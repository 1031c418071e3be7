// Command-line front end: run scenario presets or inline configs, list the
// preset registry, validate config files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "historic/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw historic::Error(historic::ErrorCode::CONFIG_INVALID, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"historic - finite-resolution experiments on non-convergent ergodic averages"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  std::vector<std::uint64_t> seeds;
  std::uint64_t horizon = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("--config", config_path, "path to a scenario config JSON file");
  run->add_option("--preset", preset_name, "name of a preset scenario");
  run->add_option("--seed", seeds, "seed for the experiment RNG (repeatable)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--horizon", horizon, "horizon override");
  run->add_flag("--quiet", quiet, "suppress the summary line");

  auto* list = app.add_subcommand("list", "list available presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", validate_path, "path to a scenario config JSON file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& [name, desc] : historic::harness::list_presets())
        std::printf("%-26s %s\n", name.c_str(), desc.c_str());
      return kExitOk;
    }

    if (validate->parsed()) {
      std::vector<historic::harness::ConfigViolation> violations;
      try {
        historic::harness::validate_config(read_file(validate_path), violations);
      } catch (const historic::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfigError;
      }
      if (!violations.empty()) {
        for (const auto& v : violations)
          std::fprintf(stderr, "CONFIG_INVALID at \"%s\": %s\n", v.path.c_str(),
                       v.message.c_str());
        return kExitConfigError;
      }
      if (!quiet) std::printf("ok\n");
      return kExitOk;
    }

    // run
    historic::harness::ScenarioConfig config;
    if (!config_path.empty()) {
      std::vector<historic::harness::ConfigViolation> violations;
      try {
        config = historic::harness::validate_config(read_file(config_path), violations);
      } catch (const historic::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfigError;
      }
      if (!violations.empty()) {
        for (const auto& v : violations)
          std::fprintf(stderr, "CONFIG_INVALID at \"%s\": %s\n", v.path.c_str(),
                       v.message.c_str());
        return kExitConfigError;
      }
    } else if (!preset_name.empty()) {
      if (historic::harness::find_preset(preset_name) == nullptr) {
        std::fprintf(stderr, "UNKNOWN_SCENARIO: no preset named '%s'\n", preset_name.c_str());
        return kExitConfigError;
      }
      config.scenario = preset_name;
    } else {
      std::fprintf(stderr, "CONFIG_INVALID: run needs --config or --preset\n");
      return kExitConfigError;
    }
    if (!seeds.empty()) config.seeds = seeds;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (horizon != 0) config.horizon = horizon;

    auto manifest = historic::harness::run_scenario(config);
    if (!quiet) {
      std::printf("%s: %zu artifacts in %s (%.2fs)\n", manifest.scenario.c_str(),
                  manifest.artifacts.size(), manifest.output_dir.string().c_str(),
                  manifest.wall_clock_seconds);
    }
    return kExitOk;
  } catch (const historic::Error& e) {
    const auto code = e.code();
    std::fprintf(stderr, "%s\n", e.what());
    if (code == historic::ErrorCode::UNKNOWN_SCENARIO ||
        code == historic::ErrorCode::CONFIG_INVALID ||
        code == historic::ErrorCode::PARSE_ERROR)
      return kExitConfigError;
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntimeError;
  }
}
