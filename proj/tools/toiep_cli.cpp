#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "toiep/cli.hpp"
#include "toiep/linalg.hpp"

int main(int argc, char** argv) {
  using namespace toiep::cli;
  CLI::App app{"Toeplitz inverse eigenvalue solvers and blind array phase calibration"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir = "out", mode, seed;
  std::vector<std::string> sets;
  bool long_run = false;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "simulate an array scenario and its sample covariance"},
      {"reconstruct", "rebuild a Toeplitz matrix from moduli and eigenvalues"},
      {"calibrate", "estimate element phases from a measured covariance"},
      {"sweep", "Monte-Carlo phase RMSE over bandwidth and snapshot count"},
      {"spectrum", "maximum-entropy spectrum of a Toeplitz matrix"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--seed", seed, "master seed (unsigned 64-bit)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--mode", mode, "reconstruct mode or calibration route");
    sub->add_option("--set", sets, "override, key=value (repeatable)");
    sub->add_flag("--long-run", long_run, "add the T=3e7 column to sweeps");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
    for (const auto& s : sets) cfg.set_assignment(s, "--set " + s);
    if (!seed.empty()) cfg.set("seed", seed, "--seed");
    if (!mode.empty()) {
      const std::string key = cmd == "reconstruct" ? "reconstruct.mode" : "calibrate.route";
      cfg.set(key, mode, "--mode");
    }
    return run_command(cmd, cfg, RunOptions{out_dir, long_run});
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const toiep::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const toiep::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
