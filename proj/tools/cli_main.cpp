#include "cli_main.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cfoed/commands.hpp"
#include "cfoed/errors.hpp"
#include "cfoed/run_config.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

cfoed::RunConfig resolve_config(const CliOptions& opts, bool config_required) {
  cfoed::RunConfig config;
  if (!opts.config_path.empty()) {
    config = cfoed::load_run_config(opts.config_path);
  } else if (config_required) {
    throw cfoed::config_error("--config is required for this command");
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threads) config.threads = *opts.threads;
  config.validate();
  return config;
}

}  // namespace

int cfoed_cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "Optimal experimental design for 1D parameterized systems: forward "
      "solves, two inverse formulations, design criteria sweeps, and a "
      "measurement-noise study."};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "experiment definition (JSON)");
  app.add_option("--out", opts.out_dir, "output directory for CSV files");
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--threads", opts.threads, "override the config thread count");

  auto* forward =
      app.add_subcommand("forward", "solve the true model, write forward.csv");
  auto* inverse = app.add_subcommand(
      "inverse", "estimate the model parameter, write inverse.csv");
  auto* design = app.add_subcommand(
      "design",
      "sweep and optimize both design criteria, write design_sweep.csv and "
      "design_opt.csv");
  auto* noise = app.add_subcommand(
      "noise-study",
      "estimator spread under measurement noise, write noise_trials.csv and "
      "noise_summary.csv");
  auto* verify = app.add_subcommand(
      "verify", "closed-form versus discretized cross-checks");
  for (CLI::App* sub : {forward, inverse, design, noise, verify})
    sub->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("cfoed");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()),
              const_cast<char**>(argv.data()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(forward)) {
      cmd_forward(resolve_config(opts, true), opts.out_dir);
    } else if (app.got_subcommand(inverse)) {
      cmd_inverse(resolve_config(opts, true), opts.out_dir);
    } else if (app.got_subcommand(design)) {
      cmd_design(resolve_config(opts, true), opts.out_dir);
    } else if (app.got_subcommand(noise)) {
      cmd_noise_study(resolve_config(opts, true), opts.out_dir);
    } else if (app.got_subcommand(verify)) {
      cmd_verify(resolve_config(opts, false));
    }
  } catch (const cfoed::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cfoed::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cfoed::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
