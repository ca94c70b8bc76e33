#pragma once

// Experiment drivers behind the CLI subcommands. Each validates the full
// configuration before doing any work and returns a table ready for CSV.

#include "aqst/harness/config.hpp"
#include "aqst/harness/result_table.hpp"
#include "aqst/trials.hpp"

namespace aqst::harness {

/// Fitted readout parameters and per-anchor residuals.
ResultTable cmd_calibrate(const ExperimentConfig& cfg);

/// alpha curves, extremal variances and reduction over the threshold grid,
/// followed by the optimum, crossing and alpha1-maximum landmark rows.
ResultTable cmd_sweep(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

/// N * sigma^2 against N for the standard arm and both AQST accountings,
/// then a constant fit and a log-log slope per arm.
ResultTable cmd_scaling(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

/// Reduction of AQST against standard QST, with ideal and configured feedback.
ResultTable cmd_compare(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

/// One AQST trace: pre-estimate, feedback rotation, post-estimate, metrics.
ResultTable cmd_single(const ExperimentConfig& cfg);

}  // namespace aqst::harness
