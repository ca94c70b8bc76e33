#pragma once

// Three-axis tomography with an imperfect binary readout: shot simulation,
// direct inversion, projection onto the Bloch ball, error metrics and
// Monte Carlo variance aggregation.

#include <array>
#include <cstdint>
#include <span>

#include "aqst/bloch_geometry.hpp"
#include "aqst/readout_model.hpp"
#include "aqst/seeding.hpp"

namespace aqst {

/// Outcome-0 counts along x, y, z; each axis gets n_per_axis shots.
struct CountTriple {
  std::int64_t n_per_axis = 0;
  std::array<std::int64_t, 3> zeros{};

  std::int64_t n_total() const { return 3 * n_per_axis; }
};

struct EstimatorResult {
  ProbabilityPoint p_hat;
  BlochVector r_hat_raw;  // direct inversion, may leave the ball
  BlochVector r_hat;      // projected onto the ball
  std::int64_t n_total = 0;
};

struct ErrorMetrics {
  double delta = 0.0;
  double hs_distance = 0.0;
  double trace_distance = 0.0;
  double infidelity = 0.0;
};

struct VarianceReport {
  std::int64_t n_total = 0;
  std::size_t trials = 0;
  double mean_delta_sq = 0.0;
  double variance_times_n = 0.0;
  /// 95% normal half-width on variance_times_n.
  double ci_half_width = 0.0;
};

enum class ShotSampler {
  /// Every shot draws a Born-rule level, a readout record and a threshold
  /// decision.
  records,
  /// zeros_k drawn directly from Binomial(n_per_axis, p_k); same law, O(1) per axis.
  binomial,
};

enum class EstimateChoice { raw, projected };

/// Throws InvalidBudget unless n_total is a positive multiple of 3.
void require_budget(std::int64_t n_total);

CountTriple simulate_counts(const BlochVector& r, const ReadoutModel& m, double lambda_c, std::int64_t n_total,
                            Rng& rng, ShotSampler sampler = ShotSampler::records);

EstimatorResult invert(const CountTriple& counts, const AlphaPair& a);

/// Nearest point of the unit ball.
BlochVector project_ball(const BlochVector& r_raw);

/// Fidelity Tr(rho sigma) + 2 sqrt(det rho det sigma) of two qubit states
/// given by Bloch vectors; determinants within a few ulps of 0, or negative
/// (outside the ball), count as 0.
double qubit_fidelity(const BlochVector& a, const BlochVector& b);

ErrorMetrics error_metrics(const BlochVector& truth, const BlochVector& estimate);
ErrorMetrics error_metrics(const BlochVector& truth, const EstimatorResult& est, EstimateChoice choice);

/// Second moment of Delta about zero. Throws InsufficientTrials below 2 trials.
VarianceReport empirical_variance(std::span<const double> deltas, std::int64_t n_total);

/// Total variance of the estimates about their own sample mean,
/// (1/(T-1)) sum |r_i - mean r|^2, reported in the same shape. Equals
/// empirical_variance for an unbiased estimator but ignores a fixed bias.
VarianceReport dispersion_variance(std::span<const BlochVector> estimates, std::int64_t n_total);

}  // namespace aqst
