#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dysonlab/errors.hpp"
#include "dysonlab/parallel.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace dysonlab;
  using namespace dysonlab::cli;

  CLI::App app{"Finite-N sine-process and Dyson Brownian motion experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, format, seed;
  unsigned threads = 0;
  std::vector<std::string> params;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads (default: DYSONLAB_THREADS, then all cores)");
  app.add_option("--out", out_dir, "output directory (default: results)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--param,-p", params, "key=value override, repeatable");

  const std::map<std::string, std::string> descriptions{
      {"kernel-table", "finite-N correlation kernel against the sine kernel on a grid"},
      {"conditions", "drift and variance error terms of the infinite-volume conditions"},
      {"simulate", "tagged-particle drift of the finite-N dynamics, with and without the bulk shift"},
      {"sample", "GUE draws: semicircle fit and bulk one-point density"},
      {"pv-check", "principal-value identity of the finite-N kernel"}};
  for (const auto& name : command_names()) app.add_subcommand(name, descriptions.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Config config = config_path.empty() ? Config{} : Config::parse_file(config_path);
    for (const auto& p : params) config.set_override(p, "--param");
    if (!seed.empty()) config.set("seed", seed, "--seed");
    if (!out_dir.empty()) config.set("out", out_dir, "--out");
    if (!format.empty()) config.set("format", format, "--format");
    const std::string fmt = config.get_string("format", "csv");
    if (fmt != "csv" && fmt != "json" && fmt != "svg") config.fail("format", "must be csv, json or svg");
    const std::string out = config.get_string("out", "results");
    if (config.has("threads")) {
      const long t = config.get_int("threads", 0);
      if (t < 0 || t > 1024) config.fail("threads", "must lie in [0, 1024]");
      if (threads == 0) threads = static_cast<unsigned>(t);
    }

    RunContext context;
    context.threads = resolve_threads(threads);
    const auto start = std::chrono::steady_clock::now();
    const CommandOutput output = run_command(command, config, context);
    const auto written = write_outputs(output, out, fmt);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& c : output.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (threshold " << c.threshold
                << ")\n";
    for (const auto& w : written) std::cout << "wrote " << w << "\n";
    std::fprintf(stderr, "wall time %.3f s, %u thread(s)\n", seconds, context.threads);
    return output.all_pass() ? kExitPass : kExitCheckFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
