#include "aqst/adaptive.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <boost/random/uniform_01.hpp>

#include "aqst/errors.hpp"

namespace aqst {

namespace {

constexpr double kZeroEstimateNorm = 1e-9;
// |a x b| below this (for unit a, b) counts as collinear.
constexpr double kCollinear = 1e-15;

Vec3 local_e_phi(const Vec3& v) {
  const double phi = (v.x() == 0.0 && v.y() == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
  return {-std::sin(phi), std::cos(phi), 0.0};
}

EstimatorResult back_rotate(const EstimatorResult& post, const FeedbackRotation& rot, const AlphaPair& a,
                            double rescale) {
  EstimatorResult out;
  out.n_total = post.n_total;
  out.r_hat_raw = BlochVector(rot.apply_inverse(post.r_hat_raw).r / rescale);
  out.r_hat = project_ball(out.r_hat_raw);
  out.p_hat = bloch_to_prob(out.r_hat, a);
  return out;
}

void fill_metrics(ProtocolResult& res, const BlochVector& true_r) {
  res.metrics_raw = error_metrics(true_r, res.final_estimate, EstimateChoice::raw);
  res.metrics_projected = error_metrics(true_r, res.final_estimate, EstimateChoice::projected);
}

}  // namespace

Eigen::Matrix3d FeedbackRotation::matrix() const { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

BlochVector FeedbackRotation::apply(const BlochVector& r) const {
  if (is_identity()) return r;
  return BlochVector(matrix() * r.r);
}

BlochVector FeedbackRotation::apply_inverse(const BlochVector& r) const {
  if (is_identity()) return r;
  return BlochVector(matrix().transpose() * r.r);
}

void ImperfectionModel::validate() const {
  if (!(purity_scale > 0.0 && purity_scale <= 1.0)) {
    throw InvalidArgument("imperfection purity_scale must lie in (0, 1]");
  }
  if (!std::isfinite(elevation_error) || !std::isfinite(azimuth_error)) {
    throw InvalidArgument("imperfection angle errors must be finite");
  }
}

double ImperfectionModel::scale_for_purity(double purity) {
  if (!(purity > 0.5 && purity <= 1.0)) {
    throw InvalidArgument("qubit purity must lie in (1/2, 1]");
  }
  return std::sqrt(2.0 * purity - 1.0);
}

ImperfectionModel ImperfectionModel::reference() {
  constexpr double deg = std::numbers::pi / 180.0;
  return ImperfectionModel{
      .purity_scale = scale_for_purity(0.70),
      .elevation_error = 5.9 * deg,
      .azimuth_error = 3.2 * deg,
      .enabled = true,
  };
}

void ProtocolConfig::validate() const {
  require_budget(n_pre);
  require_budget(n_total);
  if (n_pre >= n_total) {
    throw InvalidBudget("pre-estimation budget " + std::to_string(n_pre) + " must be below the total " +
                        std::to_string(n_total));
  }
  if (!std::isfinite(lambda_c)) throw InvalidArgument("lambda_c must be finite");
}

std::int64_t ProtocolResult::counted_shots(Accounting accounting) const {
  if (arm == Arm::aqst && accounting == Accounting::exclude_pre) return shots.post;
  return shots.pre + shots.post;
}

FeedbackRotation feedback_rotation(const BlochVector& r_from, const BlochVector& r_to) {
  const double from_norm = r_from.norm();
  if (from_norm < kZeroEstimateNorm) {
    throw ZeroEstimate("pre-estimate has no direction (|r| = " + std::to_string(from_norm) + ")");
  }
  if (r_to.norm() == 0.0) throw InvalidArgument("feedback target must be a unit vector");
  const Vec3 a = r_from.r / from_norm;
  const Vec3 b = r_to.r.normalized();
  const Vec3 c = a.cross(b);
  const double s = c.norm();
  const double d = a.dot(b);

  FeedbackRotation rot;
  if (s <= kCollinear) {
    if (d > 0.0) return rot;
    Eigen::Index smallest = 0;
    b.cwiseAbs().minCoeff(&smallest);
    Vec3 axis = Vec3::Unit(smallest);
    axis -= axis.dot(b) * b;
    rot.axis = axis.normalized();
    rot.angle = std::numbers::pi;
    return rot;
  }
  // Removing the component along a keeps the mapping exact near a half turn,
  // where c is small and its direction carries relative rounding error.
  Vec3 axis = c / s;
  axis -= axis.dot(a) * a;
  rot.axis = axis.normalized();
  rot.angle = std::atan2(s, d);
  return rot;
}

BlochVector apply_feedback(const BlochVector& true_r, const FeedbackRotation& rot, const ImperfectionModel& imp) {
  Vec3 v = rot.apply(true_r).r;
  if (!imp.enabled) return BlochVector(v);
  if (imp.elevation_error != 0.0) v = Eigen::AngleAxisd(imp.elevation_error, local_e_phi(v)) * v;
  if (imp.azimuth_error != 0.0) v = Eigen::AngleAxisd(imp.azimuth_error, Vec3::UnitZ()) * v;
  return BlochVector(imp.purity_scale * v);
}

ProtocolResult run_standard(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg, Rng& rng) {
  require_budget(cfg.n_total);
  const AlphaPair a = alphas(m, cfg.lambda_c);
  ProtocolResult res;
  res.arm = Arm::standard;
  res.post_true_state = true_r;
  res.post_estimate = invert(simulate_counts(true_r, m, cfg.lambda_c, cfg.n_total, rng, cfg.sampler), a);
  res.final_estimate = res.post_estimate;
  res.delivered_state = true_r;
  res.shots = {0, cfg.n_total};
  fill_metrics(res, true_r);
  return res;
}

ProtocolResult run_aqst(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg,
                        const AqstOptions& options, Rng& rng) {
  cfg.validate();
  const AlphaPair a = alphas(m, cfg.lambda_c);
  const EstimatorResult pre = invert(simulate_counts(true_r, m, cfg.lambda_c, cfg.n_pre, rng, cfg.sampler), a);
  return run_aqst_from_estimate(true_r, pre, m, cfg, options, rng);
}

ProtocolResult run_aqst_from_estimate(const BlochVector& true_r, const EstimatorResult& pre_estimate,
                                      const ReadoutModel& m, const ProtocolConfig& cfg, const AqstOptions& options,
                                      Rng& rng) {
  cfg.validate();
  options.imperfection.validate();
  const AlphaPair a = alphas(m, cfg.lambda_c);
  const BlochVector target = extremal_bloch(a).best;

  ProtocolResult res;
  res.arm = Arm::aqst;
  res.pre_estimate = pre_estimate;
  res.shots = {cfg.n_pre, cfg.n_post()};

  try {
    res.rotation = feedback_rotation(pre_estimate.r_hat, target);
  } catch (const ZeroEstimate&) {
    res.fallback = true;
  }

  if (res.fallback) {
    res.post_true_state = true_r;
    res.post_estimate = invert(simulate_counts(true_r, m, cfg.lambda_c, cfg.n_post(), rng, cfg.sampler), a);
    res.final_estimate = res.post_estimate;
    res.delivered_state = true_r;
    fill_metrics(res, true_r);
    return res;
  }

  ImperfectionModel imp = options.imperfection;
  if (imp.enabled && imp.randomize_signs) {
    boost::random::uniform_01<double> unit;
    if (unit(rng) < 0.5) imp.elevation_error = -imp.elevation_error;
    if (unit(rng) < 0.5) imp.azimuth_error = -imp.azimuth_error;
  }
  res.post_true_state = apply_feedback(true_r, res.rotation, imp);
  res.post_estimate =
      invert(simulate_counts(res.post_true_state, m, cfg.lambda_c, cfg.n_post(), rng, cfg.sampler), a);

  const double rescale = (options.compensate_purity && imp.enabled) ? imp.purity_scale : 1.0;
  res.final_estimate = back_rotate(res.post_estimate, res.rotation, a, rescale);
  res.delivered_state = BlochVector(res.rotation.apply_inverse(res.post_true_state).r / rescale);
  fill_metrics(res, true_r);
  return res;
}

std::vector<ProtocolResult> run_standard_trials(const BlochVector& true_r, const ReadoutModel& m,
                                                const ProtocolConfig& cfg, const TrialPlan& plan) {
  require_budget(cfg.n_total);
  return map_trials(
      plan.trials,
      [&](std::uint64_t i) {
        Rng rng = make_trial_rng(plan.master_seed, plan.experiment, i);
        return run_standard(true_r, m, cfg, rng);
      },
      plan.execution);
}

std::vector<ProtocolResult> run_aqst_trials(const BlochVector& true_r, const ReadoutModel& m, const ProtocolConfig& cfg,
                                            const AqstOptions& options, const TrialPlan& plan) {
  cfg.validate();
  options.imperfection.validate();
  return map_trials(
      plan.trials,
      [&](std::uint64_t i) {
        Rng rng = make_trial_rng(plan.master_seed, plan.experiment, i);
        return run_aqst(true_r, m, cfg, options, rng);
      },
      plan.execution);
}

VarianceReport summarize_arm(std::span<const ProtocolResult> results, Accounting accounting, Spread spread) {
  if (results.size() < 2) throw InsufficientTrials("an arm needs at least 2 trials");
  const std::int64_t n = results.front().counted_shots(accounting);
  if (spread == Spread::about_truth) {
    std::vector<double> deltas;
    deltas.reserve(results.size());
    for (const ProtocolResult& r : results) deltas.push_back(r.metrics_raw.delta);
    return empirical_variance(deltas, n);
  }
  if (spread == Spread::about_delivered) {
    std::vector<double> deltas;
    deltas.reserve(results.size());
    for (const ProtocolResult& r : results) {
      deltas.push_back((r.final_estimate.r_hat_raw.r - r.delivered_state.r).norm());
    }
    return empirical_variance(deltas, n);
  }
  std::vector<BlochVector> estimates;
  estimates.reserve(results.size());
  for (const ProtocolResult& r : results) estimates.push_back(r.final_estimate.r_hat_raw);
  return dispersion_variance(estimates, n);
}

ArmComparison compare_arms(std::span<const ProtocolResult> standard, std::span<const ProtocolResult> aqst,
                           Accounting accounting, Spread spread) {
  if (standard.size() != aqst.size()) {
    throw InsufficientTrials("arms must be aggregated over equal trial counts");
  }
  ArmComparison cmp;
  cmp.standard = summarize_arm(standard, accounting, spread);
  cmp.aqst = summarize_arm(aqst, accounting, spread);
  const double s = cmp.standard.variance_times_n;
  const double q = cmp.aqst.variance_times_n;
  if (s == 0.0) {
    cmp.reduction = q == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return cmp;
  }
  const double ratio = q / s;
  cmp.reduction = 1.0 - ratio;
  const double rel_s = cmp.standard.ci_half_width / s;
  const double rel_q = q == 0.0 ? 0.0 : cmp.aqst.ci_half_width / q;
  cmp.ci_half_width = ratio * std::sqrt(rel_s * rel_s + rel_q * rel_q);
  return cmp;
}

}  // namespace aqst
