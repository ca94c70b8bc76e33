#pragma once

// Two-stage adaptive tomography: a small pre-estimation budget locates the
// state, a feedback rotation steers it onto the minimum-variance direction,
// and the remaining budget estimates the rotated state. The standard arm
// spends the whole budget on the unrotated state.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aqst/bloch_geometry.hpp"
#include "aqst/readout_model.hpp"
#include "aqst/tomography.hpp"
#include "aqst/trials.hpp"

namespace aqst {

/// Bloch-space rotation by `angle` about `axis` (right-handed).
struct FeedbackRotation {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;

  Eigen::Matrix3d matrix() const;
  BlochVector apply(const BlochVector& r) const;
  BlochVector apply_inverse(const BlochVector& r) const;
  bool is_identity() const { return angle == 0.0; }
};

/// Error model for the physical feedback pulse. After the commanded rotation
/// the vector is tilted by elevation_error about the local e_phi direction
/// (positive values increase the polar angle), then by azimuth_error about z,
/// and finally shrunk by purity_scale.
struct ImperfectionModel {
  double purity_scale = 1.0;
  double elevation_error = 0.0;  // radians
  double azimuth_error = 0.0;    // radians
  bool enabled = false;
  /// Flip each error's sign with probability 1/2 per trial.
  bool randomize_signs = false;

  void validate() const;

  /// Bloch-length factor that takes a pure state to purity Tr(rho^2) = purity,
  /// i.e. sqrt(2 purity - 1).
  static double scale_for_purity(double purity);

  /// Purity 0.70 after feedback, 5.9 deg elevation and 3.2 deg azimuth error.
  static ImperfectionModel reference();
};

enum class Accounting { include_pre, exclude_pre };

struct ProtocolConfig {
  std::int64_t n_pre = 27000;
  std::int64_t n_total = 57000;
  double lambda_c = 0.11;
  Accounting accounting = Accounting::exclude_pre;
  ShotSampler sampler = ShotSampler::records;

  /// Both budgets positive multiples of 3 and n_pre < n_total.
  void validate() const;
  std::int64_t n_post() const { return n_total - n_pre; }
};

struct AqstOptions {
  ImperfectionModel imperfection;
  /// Divide the back-rotated estimate by purity_scale.
  bool compensate_purity = false;
};

enum class Arm { standard, aqst };

struct ShotsUsed {
  std::int64_t pre = 0;
  std::int64_t post = 0;
};

struct ProtocolResult {
  Arm arm = Arm::standard;
  EstimatorResult pre_estimate;
  FeedbackRotation rotation;
  BlochVector post_true_state;
  /// Estimate of post_true_state, in the rotated frame.
  EstimatorResult post_estimate;
  /// Estimate of the original state, in the original frame.
  EstimatorResult final_estimate;
  /// The state the post stage actually measured, mapped back to the original
  /// frame the same way as the estimate. Equals the true state unless the
  /// feedback is imperfect.
  BlochVector delivered_state;
  ErrorMetrics metrics_raw;
  ErrorMetrics metrics_projected;
  ShotsUsed shots;
  /// Pre-estimate had no direction; the remaining budget ran as standard QST.
  bool fallback = false;

  std::int64_t counted_shots(Accounting accounting) const;
};

/// Rotation taking the direction of r_from onto the unit vector r_to. Parallel
/// inputs give the identity; antiparallel ones a half turn about the
/// coordinate axis least aligned with r_to, orthogonalized.
/// Throws ZeroEstimate when |r_from| < 1e-9.
FeedbackRotation feedback_rotation(const BlochVector& r_from, const BlochVector& r_to);

BlochVector apply_feedback(const BlochVector& true_r, const FeedbackRotation& rot, const ImperfectionModel& imp);

/// Spends cfg.n_total shots on the unrotated state; n_pre is ignored.
ProtocolResult run_standard(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg, Rng& rng);

ProtocolResult run_aqst(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg,
                        const AqstOptions& options, Rng& rng);

/// Post-estimation half of run_aqst with a caller-supplied pre-estimate.
ProtocolResult run_aqst_from_estimate(const BlochVector& true_r, const EstimatorResult& pre_estimate,
                                      const ReadoutModel& m, const ProtocolConfig& cfg, const AqstOptions& options,
                                      Rng& rng);

// --- batches ---------------------------------------------------------------

struct TrialPlan {
  std::uint64_t master_seed = 1;
  std::string_view experiment = "trial";
  std::size_t trials = 1000;
  Execution execution = Execution::parallel;
};

std::vector<ProtocolResult> run_standard_trials(const BlochVector& true_r, const ReadoutModel& m,
                                                const ProtocolConfig& cfg, const TrialPlan& plan);
std::vector<ProtocolResult> run_aqst_trials(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg,
                                            const AqstOptions& options, const TrialPlan& plan);

/// How an arm's spread is measured:
///  about_truth     - Delta^2 against the true state (includes feedback bias);
///  about_delivered - Delta^2 against the delivered state, i.e. pure
///                    estimation noise of the measured data;
///  about_mean      - dispersion of the final estimates about their mean.
/// With imperfect feedback near a half turn the feedback axis varies from
/// trial to trial, so about_mean also picks up that spread.
enum class Spread { about_truth, about_delivered, about_mean };

/// N * sigma^2 of the raw final estimates, with N the counted shot budget.
VarianceReport summarize_arm(std::span<const ProtocolResult> results, Accounting accounting, Spread spread);

struct ArmComparison {
  double reduction = 0.0;      // 1 - (N sigma^2)_aqst / (N sigma^2)_std
  double ci_half_width = 0.0;  // delta-method 95%
  VarianceReport standard;
  VarianceReport aqst;
};

/// Throws InsufficientTrials when either arm has fewer than 2 trials or the
/// arms differ in size.
ArmComparison compare_arms(std::span<const ProtocolResult> standard, std::span<const ProtocolResult> aqst,
                           Accounting accounting, Spread spread = Spread::about_delivered);

}  // namespace aqst
