// Command-line driver: aqst_sim <calibrate|sweep|scaling|compare|single> [flags]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "aqst/errors.hpp"
#include "aqst/harness/commands.hpp"
#include "aqst/trials.hpp"

namespace {

// Set to any non-empty value other than "0" to pin execution to one thread.
constexpr const char* kSingleThreadEnv = "AQST_SINGLE_THREAD";

bool single_thread_forced() {
  const char* v = std::getenv(kSingleThreadEnv);
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace aqst;
  using namespace aqst::harness;

  CLI::App app{"Adaptive qubit tomography simulator for weak-measurement readout"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::int64_t> trials;
  app.add_option("--config", config_path, "Configuration file (key = value)");
  app.add_option("--seed", seed, "Master seed (overrides config)");
  app.add_option("--out", out, "Output CSV path; '-' or empty for stdout");
  app.add_option("--threads", threads, "Worker threads, 0 for the runtime default")->check(CLI::NonNegativeNumber);
  app.add_option("--trials", trials, "Monte Carlo trials (overrides config)");

  auto* calibrate = app.add_subcommand("calibrate", "Fit the readout model to calibration anchors");
  auto* sweep = app.add_subcommand("sweep", "Threshold sweep of alpha curves and extremal variances");
  auto* scaling = app.add_subcommand("scaling", "Variance against shot budget for both arms");
  auto* compare = app.add_subcommand("compare", "Variance reduction of adaptive against standard tomography");
  auto* single = app.add_subcommand("single", "One adaptive tomography trace");
  for (auto* sub : {calibrate, sweep, scaling, compare, single}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0; malformed command lines are
    // configuration errors
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::validation);
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) {
      if (*trials < 1) throw ConfigError("--trials must be at least 1");
      cfg.trials = std::size_t(*trials);
    }
    if (threads) cfg.threads = *threads;
    if (out) cfg.out = *out == "-" ? std::string() : *out;
    if (single_thread_forced()) cfg.threads = 1;
    set_worker_count(cfg.threads);

    ResultTable table;
    if (calibrate->parsed()) table = cmd_calibrate(cfg);
    if (sweep->parsed()) table = cmd_sweep(cfg);
    if (scaling->parsed()) table = cmd_scaling(cfg);
    if (compare->parsed()) table = cmd_compare(cfg);
    if (single->parsed()) table = cmd_single(cfg);

    if (cfg.out.empty()) {
      table.write_csv(std::cout);
    } else {
      std::ofstream file(cfg.out);
      if (!file) throw ConfigError("cannot write '" + cfg.out + "'");
      table.write_csv(file);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "aqst_sim: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "aqst_sim: internal error: " << e.what() << '\n';
    return 1;
  }
}
