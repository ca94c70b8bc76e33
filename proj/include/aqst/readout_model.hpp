#pragma once

// Phenomenological weak-measurement readout on the normalized record
// coordinate lambda_D.
//
// A shot prepared in |g> lands in the g envelope N(mu_g, sigma_env) except
// with probability w_therm, when it lands in the e envelope; a shot in |e>
// lands in the g envelope with probability w_decay. A record below the
// threshold lambda_c reads as outcome 0.

#include <optional>
#include <string>
#include <vector>

#include "aqst/bloch_geometry.hpp"
#include "aqst/seeding.hpp"

namespace aqst {

enum class Level { g, e };

struct ReadoutModel {
  double mu_g = -1.0;
  double mu_e = 1.0;
  double sigma_env = 0.3948;
  double w_decay = 0.0;
  double w_therm = 0.0;

  /// Throws InvalidArgument unless sigma_env > 0, mu_g != mu_e, weights in
  /// [0, 1) and w_decay + w_therm < 1.
  void validate() const;

  /// Model fitted to the reference calibration anchors (see configs/).
  static ReadoutModel calibrated();
};

struct ConversionProbs {
  double p_g0 = 0.0;
  double p_e0 = 0.0;
};

/// Standard normal CDF via erfc.
double normal_cdf(double x);
double normal_pdf(double x);

ConversionProbs conversion_probs(const ReadoutModel& m, double lambda_c);
AlphaPair alphas(const ReadoutModel& m, double lambda_c);
/// d alpha / d lambda_c.
AlphaPair alpha_slopes(const ReadoutModel& m, double lambda_c);

/// One record lambda_D for a shot whose qubit is in `level`.
double sample_record(const ReadoutModel& m, Level level, Rng& rng);

/// 0 iff lambda_d < lambda_c.
inline int classify(double lambda_d, double lambda_c) { return lambda_d < lambda_c ? 0 : 1; }

// --- calibration -----------------------------------------------------------

/// One calibration constraint at threshold lambda_c. Unset targets are free.
/// `stationary` asks for d(var_min)/d(lambda_c) = 0 there, i.e. lambda_c is
/// the variance-optimal threshold.
struct CalibrationAnchor {
  double lambda_c = 0.0;
  std::optional<double> alpha0;
  std::optional<double> alpha1;
  bool stationary = false;
  double weight = 1.0;

  int constraint_count() const { return int(alpha0.has_value()) + int(alpha1.has_value()) + int(stationary); }
};

struct CalibrationAnchors {
  std::vector<CalibrationAnchor> points;

  /// alpha(0.11) = (1.178, 0.764), alpha0(-0.5828) = 1, optimum at 0.11.
  static CalibrationAnchors reference();
};

/// Parameters pinned during a fit; unset fields are fitted.
struct PartialReadoutModel {
  std::optional<double> mu_g;
  std::optional<double> mu_e;
  std::optional<double> sigma_env;
  std::optional<double> w_decay;
  std::optional<double> w_therm;

  int free_count() const;
  static PartialReadoutModel reference();  // sigma_env = 0.7896 / 2
};

struct CalibrationOptions {
  /// Largest acceptable weighted RMS residual.
  double residual_ceiling = 1e-6;
  /// Starting point for the free parameters.
  ReadoutModel initial_guess{-1.0, 1.0, 0.3948, 0.1, 0.01};
  int max_function_evals = 4000;
};

struct AnchorResidual {
  double lambda_c;
  std::string quantity;  // "alpha0", "alpha1" or "dvar_min"
  double target;
  double fitted;
};

struct CalibrationResult {
  ReadoutModel model;
  std::vector<AnchorResidual> residuals;
  double rms_residual = 0.0;
};

/// Weighted least-squares fit of the free model parameters to the anchors.
/// Throws UnderConstrained when free parameters outnumber constraints, and
/// CalibrationFailed for unphysical targets or a residual above the ceiling.
CalibrationResult calibrate(const CalibrationAnchors& anchors, const PartialReadoutModel& fixed,
                            const CalibrationOptions& options = {});

}  // namespace aqst
