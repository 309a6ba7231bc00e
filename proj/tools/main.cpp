// bhsim — analogue-black-hole chain simulator.
//
//   bhsim <experiment> --config <path> [--out <dir>] [--overwrite]
//         [--seed <u64>] [--threads <n>]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "bhsim/config.hpp"
#include "bhsim/runner.hpp"
#include "bhsim/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"analogue-black-hole chain simulator"};
  app.set_version_flag("--version", bhsim::version_string);
  app.require_subcommand(1);

  std::string config_path;
  bhsim::cli::RunOptions opts;
  std::uint64_t seed_value = 0;
  bool seed_given = false;

  for (const char* name : {"walk", "radiation", "entangle", "continuum", "device", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", opts.out_dir, "output directory (overrides [output] dir)");
    sub->add_flag("--overwrite", opts.overwrite, "allow writing into a directory holding results");
    sub->add_option("--seed", seed_value, "override the configured random seed")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", opts.threads, "worker threads for independent realizations");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (seed_given) opts.seed = seed_value;
    const auto kind = bhsim::cli::experiment_from_name(app.get_subcommands().front()->get_name());
    const auto cfg = bhsim::cli::Config::load(config_path);
    const auto result = bhsim::cli::run(kind, cfg, opts);
    std::printf("wrote %zu files to %s\n", result.files.size(), result.out_dir.string().c_str());
    return 0;
  } catch (const bhsim::cli::ConfigError& e) {
    if (e.line_number > 0)
      std::fprintf(stderr, "config error (line %d): %s\n", e.line_number, e.what());
    else
      std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}
