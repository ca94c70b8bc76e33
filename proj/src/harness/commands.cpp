#include "aqst/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "aqst/errors.hpp"

namespace aqst::harness {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

ResultTable make_table(const char* command, const ExperimentConfig& cfg, std::vector<std::string> columns) {
  ResultTable t;
  t.command = command;
  t.provenance = cfg.echo();
  t.columns = std::move(columns);
  return t;
}

TrialPlan plan(const ExperimentConfig& cfg, const std::string& experiment, Execution exec) {
  return TrialPlan{cfg.seed, experiment, cfg.trials, exec};
}

void require_trials_for_variance(const ExperimentConfig& cfg) {
  if (cfg.trials < 2) throw InsufficientTrials("variance estimates need trials >= 2");
}

Cell opt(bool present, double v) { return present ? Cell(v) : Cell(std::monostate{}); }

const char* accounting_name(Accounting a) { return a == Accounting::exclude_pre ? "exclude_pre" : "include_pre"; }

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? std::nan("") : (n * sxy - sx * sy) / denom;
}

double inverse_variance_mean(const std::vector<VarianceReport>& reps) {
  double num = 0.0, den = 0.0;
  for (const auto& r : reps) {
    const double w = r.ci_half_width > 0.0 ? 1.0 / (r.ci_half_width * r.ci_half_width) : 1.0;
    num += w * r.variance_times_n;
    den += w;
  }
  return num / den;
}

}  // namespace

ResultTable cmd_calibrate(const ExperimentConfig& cfg) {
  cfg.validate();

  CalibrationOptions options;
  options.residual_ceiling = cfg.calibration_ceiling;
  options.initial_guess = cfg.readout;
  const CalibrationResult fit = calibrate(cfg.anchors, cfg.fixed_parameters(), options);

  ResultTable t = make_table("calibrate", cfg, {"kind", "name", "lambda_c", "target", "value", "residual"});
  const ReadoutModel& m = fit.model;
  const std::pair<const char*, double> params[] = {{"mu_g", m.mu_g},
                                                   {"mu_e", m.mu_e},
                                                   {"sigma_env", m.sigma_env},
                                                   {"w_decay", m.w_decay},
                                                   {"w_therm", m.w_therm}};
  for (const auto& [n, v] : params) {
    t.add_row({std::string("param"), std::string(n), std::monostate{}, std::monostate{}, v, std::monostate{}});
  }
  for (const AnchorResidual& r : fit.residuals) {
    t.add_row({std::string("anchor"), r.quantity, r.lambda_c, r.target, r.fitted, r.fitted - r.target});
  }
  t.add_row({std::string("summary"), std::string("rms_residual"), std::monostate{}, std::monostate{},
             fit.rms_residual, std::monostate{}});
  return t;
}

ResultTable cmd_sweep(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  ResultTable t = make_table("sweep", cfg,
                             {"row_type", "lambda_c", "alpha0", "alpha1", "var_min_per_shot", "var_max_per_shot",
                              "reduction", "degenerate", "non_unique"});
  auto emit = [&](const char* type, const SweepRow& r, bool non_unique) {
    t.add_row({std::string(type), r.lambda_c, r.alpha0, r.alpha1, r.var_min_per_shot, r.var_max_per_shot,
               r.reduction, std::int64_t(r.degenerate), std::int64_t(non_unique)});
  };
  for (const SweepRow& r : sweep(cfg.readout, cfg.grid, exec)) emit("grid", r, false);

  const OptimalCriteria best = optimal_criteria(cfg.readout, cfg.grid);
  emit("optimum", sweep_row(cfg.readout, best.lambda_c), best.non_unique);
  const double cross = find_crossing(cfg.readout, cfg.crossing_bracket);
  emit("crossing", sweep_row(cfg.readout, cross), false);
  emit("alpha1_max", sweep_row(cfg.readout, alpha1_argmax(cfg.readout, cfg.grid)), false);
  return t;
}

ResultTable cmd_scaling(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  require_trials_for_variance(cfg);
  const BlochVector truth = resolve_state(cfg);
  const AqstOptions options = cfg.aqst_options();

  ResultTable t = make_table("scaling", cfg,
                             {"row_type", "arm", "accounting", "n_post", "n_counted", "trials", "mean_delta_sq",
                              "var_times_n", "ci_half_width", "loglog_slope", "fitted_constant"});

  struct Series {
    const char* arm;
    const char* accounting;
    std::vector<double> n;
    std::vector<double> msd;
    std::vector<VarianceReport> reps;
  };
  Series series[] = {{"standard", "none", {}, {}, {}},
                     {"aqst", "exclude_pre", {}, {}, {}},
                     {"aqst", "include_pre", {}, {}, {}}};

  for (std::int64_t n : cfg.scaling_n) {
    ProtocolConfig std_cfg = cfg.protocol;
    std_cfg.n_total = n;
    const auto std_runs = run_standard_trials(truth, cfg.readout, std_cfg, plan(cfg, fmt::format("scaling/standard/{}", n), exec));

    ProtocolConfig aqst_cfg = cfg.protocol;
    aqst_cfg.n_total = cfg.protocol.n_pre + n;
    const auto aqst_runs =
        run_aqst_trials(truth, cfg.readout, aqst_cfg, options, plan(cfg, fmt::format("scaling/aqst/{}", n), exec));

    const VarianceReport reps[] = {summarize_arm(std_runs, Accounting::exclude_pre, cfg.spread),
                                   summarize_arm(aqst_runs, Accounting::exclude_pre, cfg.spread),
                                   summarize_arm(aqst_runs, Accounting::include_pre, cfg.spread)};
    for (int s = 0; s < 3; ++s) {
      const VarianceReport& r = reps[s];
      series[s].n.push_back(double(r.n_total));
      series[s].msd.push_back(r.mean_delta_sq);
      series[s].reps.push_back(r);
      t.add_row({std::string("point"), std::string(series[s].arm), std::string(series[s].accounting), n, r.n_total,
                 std::int64_t(r.trials), r.mean_delta_sq, r.variance_times_n, r.ci_half_width, std::monostate{},
                 std::monostate{}});
    }
  }
  for (const Series& s : series) {
    t.add_row({std::string("fit"), std::string(s.arm), std::string(s.accounting), std::monostate{}, std::monostate{},
               std::int64_t(cfg.trials), std::monostate{}, std::monostate{}, std::monostate{},
               opt(s.n.size() >= 2, loglog_slope(s.n, s.msd)), inverse_variance_mean(s.reps)});
  }
  return t;
}

ResultTable cmd_compare(const ExperimentConfig& cfg, Execution exec) {
  cfg.validate();
  require_trials_for_variance(cfg);
  const BlochVector truth = resolve_state(cfg);
  const AlphaPair a = alphas(cfg.readout, cfg.protocol.lambda_c);
  const double analytic = 1.0 - variance_per_shot(extremal_bloch(a).best, a) / variance_per_shot(truth, a);

  ResultTable t = make_table("compare", cfg,
                             {"feedback", "accounting", "n_counted_standard", "n_counted_aqst",
                              "standard_var_times_n", "aqst_var_times_n", "reduction", "ci_half_width",
                              "analytic_ideal_reduction", "fallbacks"});

  const auto std_runs = run_standard_trials(truth, cfg.readout, cfg.protocol, plan(cfg, "compare/standard", exec));

  struct Variant {
    const char* label;
    AqstOptions options;
  };
  std::vector<Variant> variants{{"ideal", AqstOptions{}}};
  if (cfg.imperfection_enabled) variants.push_back({"configured", cfg.aqst_options()});

  for (const Variant& v : variants) {
    const auto runs = run_aqst_trials(truth, cfg.readout, cfg.protocol, v.options,
                                      plan(cfg, std::string("compare/aqst-") + v.label, exec));
    std::int64_t fallbacks = 0;
    for (const auto& r : runs) fallbacks += r.fallback;
    for (Accounting acc : {Accounting::exclude_pre, Accounting::include_pre}) {
      const ArmComparison c = compare_arms(std_runs, runs, acc, cfg.spread);
      t.add_row({std::string(v.label), std::string(accounting_name(acc)), c.standard.n_total, c.aqst.n_total,
                 c.standard.variance_times_n, c.aqst.variance_times_n, c.reduction, c.ci_half_width, analytic,
                 fallbacks});
    }
  }
  return t;
}

ResultTable cmd_single(const ExperimentConfig& cfg) {
  cfg.validate();
  const BlochVector truth = resolve_state(cfg);
  Rng rng = make_trial_rng(cfg.seed, "single", 0);
  const ProtocolResult r = run_aqst(truth, cfg.readout, cfg.protocol, cfg.aqst_options(), rng);

  auto polar = [](const BlochVector& v) { return v.norm() == 0.0 ? 0.0 : std::acos(std::clamp(v.z() / v.norm(), -1.0, 1.0)); };
  auto azimuth = [](const BlochVector& v) { return std::atan2(v.y(), v.x()); };
  double d_az = azimuth(r.pre_estimate.r_hat) - azimuth(truth);
  d_az = std::remainder(d_az, 2.0 * std::numbers::pi);

  ResultTable t = make_table(
      "single", cfg,
      {"true_x", "true_y", "true_z", "pre_x", "pre_y", "pre_z", "pre_polar_error_deg", "pre_azimuth_error_deg",
       "axis_x", "axis_y", "axis_z", "angle_rad", "post_true_x", "post_true_y", "post_true_z", "post_x", "post_y",
       "post_z", "final_x", "final_y", "final_z", "delta", "hs_distance", "trace_distance", "infidelity",
       "shots_pre", "shots_post", "fallback"});
  const Vec3& pre = r.pre_estimate.r_hat.r;
  const Vec3& ax = r.rotation.axis;
  const Vec3& pt = r.post_true_state.r;
  const Vec3& po = r.post_estimate.r_hat_raw.r;
  const Vec3& fin = r.final_estimate.r_hat_raw.r;
  const ErrorMetrics& m = r.metrics_projected;
  t.add_row({truth.x(), truth.y(), truth.z(), pre.x(), pre.y(), pre.z(),
             (polar(r.pre_estimate.r_hat) - polar(truth)) * kDeg, d_az * kDeg, ax.x(), ax.y(), ax.z(),
             r.rotation.angle, pt.x(), pt.y(), pt.z(), po.x(), po.y(), po.z(), fin.x(), fin.y(), fin.z(), m.delta,
             m.hs_distance, m.trace_distance, m.infidelity, r.shots.pre, r.shots.post, std::int64_t(r.fallback)});
  return t;
}

}  // namespace aqst::harness
