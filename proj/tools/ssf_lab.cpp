#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ssf/cli/config.hpp"
#include "ssf/cli/run.hpp"
#include "ssf/version.hpp"

int main(int argc, char** argv) {
  using namespace ssf::cli;
  CLI::App app{"ssf-lab: spectral shift functions of random lattice operators"};
  app.set_version_flag("--version", ssf::version);

  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned workers = 1;
  app.add_option("command", command, "surface-density | surface-functional | bulk-ids | check-bounds | scaling-study")->required();
  app.add_option("--config", config_path, "experiment configuration file")->required();
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out, "output CSV path (overrides the config)");
  app.add_option("--workers", workers, "worker threads; never changes the output")->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  const auto cmd = parse_command(command);
  if (!cmd) {
    std::cerr << "unknown command '" << command << "'\n";
    return exit_config;
  }
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const ssf::io_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return exit_io;
  }
  ExperimentConfig cfg;
  try {
    cfg = parse_config(text, cmd);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return exit_config;
  }
  return run(cfg, {seed, out, workers});
}
