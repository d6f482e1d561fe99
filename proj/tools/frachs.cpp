#include <CLI11.hpp>
#include <iostream>

#include "cli.hpp"
#include "frachs/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional Hardy–Sobolev extremals on radial grids"};
  app.require_subcommand(1);

  std::string config_path;
  frachs::cli::Flags flags;
  std::string out;

  for (const char* name : {"constants", "solve", "mass", "scan", "kernel-selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "output directory (overrides config.out)");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::Range(1, 256));
    if (std::string(name) == "mass") sub->add_flag("--manufactured", flags.manufactured, "print the manufactured recovery");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? frachs::cli::kOk : frachs::cli::kUsage;
  }
  if (!out.empty()) flags.out = out;

  frachs::cli::RunConfig config;
  try {
    config = frachs::cli::load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "frachs: " << e.what() << '\n';
    return frachs::cli::kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return frachs::cli::run_command(command, config, flags, std::cout, std::cerr);
}
