#pragma once

// Experiment configuration: flat `key = value` text, keys grouped by dotted
// section names (`[section]` headers are accepted as a prefix). '#' starts a
// comment. Unknown keys are errors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "aqst/adaptive.hpp"
#include "aqst/criteria_opt.hpp"
#include "aqst/readout_model.hpp"

namespace aqst::harness {

enum class StatePreset { best, worst, center, custom };

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  int threads = 0;  // 0: OpenMP default
  std::string out;  // empty: stdout

  ProtocolConfig protocol;
  ReadoutModel readout = ReadoutModel::calibrated();

  CalibrationAnchors anchors = CalibrationAnchors::reference();
  std::vector<std::string> calibration_fixed{"sigma_env"};
  double calibration_ceiling = 1e-6;

  // Feedback imperfection, in configuration units.
  bool imperfection_enabled = false;
  double purity_scale = 1.0;  // Bloch-length factor; `imperfection.purity` sets it from Tr(rho^2)
  double elevation_deg = 0.0;
  double azimuth_deg = 0.0;
  bool randomize_signs = false;
  bool compensate_purity = false;

  StatePreset state = StatePreset::worst;
  double theta = 0.0;
  double phi = 0.0;

  SweepGrid grid;
  std::pair<double, double> crossing_bracket{-1.5, 1.5};

  std::vector<std::int64_t> scaling_n{3000, 9999, 30000, 99999, 300000};
  Spread spread = Spread::about_delivered;

  /// Budgets, trial count and model sanity; throws ConfigError / InvalidBudget.
  void validate() const;

  /// Every key with its resolved value, in canonical order. Feeding these
  /// lines back through parse_config reproduces the configuration.
  std::vector<std::pair<std::string, std::string>> echo() const;

  PartialReadoutModel fixed_parameters() const;
  ImperfectionModel imperfection() const;
  AqstOptions aqst_options() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Rebuilds a configuration from the '#'-prefixed provenance lines of a CSV
/// written by the harness.
ExperimentConfig config_from_csv_header(std::istream& csv);

/// Initial Bloch vector named by the configuration.
BlochVector resolve_state(const ExperimentConfig& cfg);

}  // namespace aqst::harness
