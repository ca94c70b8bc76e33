// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Monte Carlo checks use the record-level shot sampler.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aqst/adaptive.hpp"
#include "aqst/bloch_geometry.hpp"
#include "aqst/criteria_opt.hpp"
#include "aqst/harness/commands.hpp"
#include "aqst/harness/config.hpp"
#include "aqst/readout_model.hpp"
#include "aqst/tomography.hpp"
#include "oracles.hpp"

using namespace aqst;
using harness::Cell;
using harness::ResultTable;

namespace {

int failures = 0;

void report(const std::string& id, const std::string& what, double value, double target, double tol) {
  const bool ok = std::isfinite(value) && std::abs(value - target) <= tol;
  failures += !ok;
  fmt::print("{} [{}] {}: value {:.6g}, target {:.6g} +/- {:.3g}\n", ok ? "PASS" : "FAIL", id, what, value, target,
             tol);
}

void report_bound(const std::string& id, const std::string& what, double value, double bound) {
  const bool ok = std::isfinite(value) && value <= bound;
  failures += !ok;
  fmt::print("{} [{}] {}: {:.3g} <= {:.3g}\n", ok ? "PASS" : "FAIL", id, what, value, bound);
}

void report_flag(const std::string& id, const std::string& what, bool ok) {
  failures += !ok;
  fmt::print("{} [{}] {}\n", ok ? "PASS" : "FAIL", id, what);
}

void info(const std::string& id, const std::string& what) { fmt::print("INFO [{}] {}\n", id, what); }

harness::ExperimentConfig config(const std::string& name) {
  return harness::load_config(std::string(AQST_CONFIG_DIR) + "/" + name);
}

std::size_t column(const ResultTable& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  if (it == t.columns.end()) throw std::runtime_error("missing column " + name);
  return std::size_t(it - t.columns.begin());
}

std::string text(const Cell& c) { return std::holds_alternative<std::string>(c) ? std::get<std::string>(c) : ""; }
double number(const Cell& c) { return std::holds_alternative<double>(c) ? std::get<double>(c) : std::nan(""); }

// First row whose text columns match every (column, value) pair.
const std::vector<Cell>& find_row(const ResultTable& t, std::vector<std::pair<std::string, std::string>> keys) {
  for (const auto& row : t.rows) {
    bool match = true;
    for (const auto& [col, val] : keys) match = match && text(row[column(t, col)]) == val;
    if (match) return row;
  }
  throw std::runtime_error("no matching row in " + t.command + " table");
}

double mean_delta_sq(const std::vector<ProtocolResult>& runs) {
  double s = 0.0;
  for (const auto& r : runs) s += r.metrics_raw.delta * r.metrics_raw.delta;
  return s / double(runs.size());
}

const ReadoutModel kModel = ReadoutModel::calibrated();
const BlochVector kBest(Vec3::Constant(1.0 / std::sqrt(3.0)));
const BlochVector kWorst(Vec3::Constant(-1.0 / std::sqrt(3.0)));

void ideal_reduction() {
  report("1a", "analytic reduction at lambda_c = 0.11", sweep_row(kModel, 0.11).reduction, 0.3374, 0.0010);

  ProtocolConfig cfg;
  cfg.n_total = 30000;
  cfg.sampler = ShotSampler::records;
  const auto best = run_standard_trials(kBest, kModel, cfg, {20241, "acceptance/vmin", 10000});
  const auto worst = run_standard_trials(kWorst, kModel, cfg, {20241, "acceptance/vmax", 10000});
  report("1b", "Monte Carlo reduction, V_min vs V_max, T=1e4, N=3e4", 1.0 - mean_delta_sq(best) / mean_delta_sq(worst),
         0.3374, 0.02);
}

void compare_regression() {
  const ResultTable t = harness::cmd_compare(config("compare_imperfect.cfg"));
  const std::size_t red = column(t, "reduction");
  const std::size_t ci = column(t, "ci_half_width");

  const auto& ideal = find_row(t, {{"feedback", "ideal"}, {"accounting", "exclude_pre"}});
  report("1c", "AQST ideal feedback vs standard, worst state, T=1e4, exclude_pre", number(ideal[red]), 0.3374, 0.02);

  const auto& imperfect = find_row(t, {{"feedback", "configured"}, {"accounting", "exclude_pre"}});
  report("2", "AQST imperfect feedback (purity 0.70, 5.9/3.2 deg), T=1e4, exclude_pre", number(imperfect[red]), 0.148,
         0.03);
  info("2", fmt::format("95% CI half-width of that reduction: {:.3g}", number(imperfect[ci])));
  const auto& with_pre = find_row(t, {{"feedback", "configured"}, {"accounting", "include_pre"}});
  info("2", fmt::format("same run, include_pre accounting: {:.4g}", number(with_pre[red])));

  // Alternative reading: 0.70 as the Bloch-vector length instead of Tr(rho^2).
  harness::ExperimentConfig alt = config("compare_imperfect.cfg");
  alt.purity_scale = 0.70;
  alt.trials = 2000;
  const ResultTable t_alt = harness::cmd_compare(alt);
  const auto& alt_row = find_row(t_alt, {{"feedback", "configured"}, {"accounting", "exclude_pre"}});
  info("2", fmt::format("Bloch length 0.70 reading, T=2000: reduction {:.4g} +/- {:.2g}", number(alt_row[red]),
                        number(alt_row[column(t_alt, "ci_half_width")])));
}

void scaling_law() {
  const ResultTable t = harness::cmd_scaling(config("scaling_reference.cfg"));
  const std::size_t slope = column(t, "loglog_slope");
  report("3a", "log-log slope of mean(Delta^2) vs N, standard arm",
         number(find_row(t, {{"row_type", "fit"}, {"arm", "standard"}})[slope]), -1.0, 0.05);
  report("3b", "log-log slope of mean(Delta^2) vs N, AQST arm (exclude_pre)",
         number(find_row(t, {{"row_type", "fit"}, {"arm", "aqst"}, {"accounting", "exclude_pre"}})[slope]), -1.0,
         0.05);
  info("3", fmt::format("AQST include_pre slope: {:.4g}",
                        number(find_row(t, {{"row_type", "fit"}, {"arm", "aqst"}, {"accounting", "include_pre"}})[slope])));
}

void landmarks() {
  const SweepGrid grid;
  report("4a", "optimal threshold lambda_c*", optimal_criteria(kModel, grid).lambda_c, 0.11, 0.02);
  report("4b", "alpha0 = 1 crossing", find_crossing(kModel, {-1.5, 1.5}), -0.5828, 0.05);
  info("4", fmt::format("alpha1 grid argmax at lambda_c = {:.4g}", alpha1_argmax(kModel, grid)));
}

// A single 3-sigma excursion among 60 comparisons happens by chance about
// 15% of the time; each excursion is retested on an independent stream with
// 100x the shots, where a real bias of that size would sit near 30 sigma.
void oracle_equivalence() {
  std::mt19937_64 g(5150);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr std::int64_t kPerAxis = 100000;
  constexpr std::int64_t kRetestPerAxis = 100 * kPerAxis;

  auto z_scores = [](const BlochVector& r, const ReadoutModel& m, double lambda_c, std::int64_t per_axis, Rng& rng) {
    const CountTriple counts = simulate_counts(r, m, lambda_c, 3 * per_axis, rng, ShotSampler::records);
    const AlphaPair a = alphas(m, lambda_c);
    std::array<double, 3> z{};
    for (int k = 0; k < 3; ++k) {
      const double p = 0.5 * (a.alpha0 + a.alpha1 * r.r[k]);
      z[k] = (double(counts.zeros[k]) / double(per_axis) - p) / std::sqrt(p * (1.0 - p) / double(per_axis));
    }
    return z;
  };

  double worst_z = 0.0;
  int excursions = 0;
  int confirmed = 0;
  for (int c = 0; c < 20; ++c) {
    const BlochVector r(oracle::random_ball(g));
    ReadoutModel m;
    m.mu_g = -1.3 + 0.6 * u(g);
    m.mu_e = 0.7 + 0.6 * u(g);
    m.sigma_env = 0.2 + 0.4 * u(g);
    m.w_decay = 0.3 * u(g);
    m.w_therm = 0.1 * u(g);
    const double lambda_c = -1.0 + 2.0 * u(g);

    Rng rng = make_trial_rng(5150, "acceptance/oracle", std::uint64_t(c));
    const auto z = z_scores(r, m, lambda_c, kPerAxis, rng);
    for (int k = 0; k < 3; ++k) {
      worst_z = std::max(worst_z, std::abs(z[k]));
      if (std::abs(z[k]) <= 3.0) continue;
      ++excursions;
      Rng retest_rng = make_trial_rng(5150, "acceptance/oracle-retest", std::uint64_t(c));
      const double z_retest = z_scores(r, m, lambda_c, kRetestPerAxis, retest_rng)[std::size_t(k)];
      confirmed += std::abs(z_retest) > 3.0;
      info("5a", fmt::format("config {} axis {}: |z| = {:.3g} at 1e5 shots, retest |z| = {:.3g} at 1e7 shots", c, k,
                             std::abs(z[k]), std::abs(z_retest)));
    }
  }
  info("5a", fmt::format("max |z| at 1e5 shots: {:.3g}; {} of 60 outside 3 sigma (expected 0.16)", worst_z,
                         excursions));
  report_flag("5a", fmt::format("zero-frequencies vs closed-form p_k within binomial 3 sigma, 20 configs x 3 axes at "
                                "1e5 shots ({} excursion(s), {} confirmed on retest)",
                                excursions, confirmed),
              confirmed == 0);

  double worst_f = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = oracle::random_ball(g);
    const Vec3 b = oracle::random_ball(g);
    const double ref = oracle::uhlmann_fidelity(oracle::bloch_to_rho(a), oracle::bloch_to_rho(b));
    worst_f = std::max(worst_f, std::abs(qubit_fidelity(BlochVector(a), BlochVector(b)) - ref));
  }
  report_bound("5b", "closed-form fidelity vs eigendecomposition, 1e3 random pairs", worst_f, 1e-10);
}

void property_suites() {
  std::mt19937_64 g(6060);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double rt = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 r = oracle::random_ball(g);
    const double a1 = (u(g) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, -6.0 * u(g));
    const AlphaPair a{std::abs(a1) + (2.0 - 2.0 * std::abs(a1)) * u(g), a1};
    rt = std::max(rt, (prob_to_bloch(bloch_to_prob(BlochVector(r), a), a).r - r).norm());
  }
  report_bound("6a", "round trip bloch -> prob -> bloch, |r| <= 1, |alpha1| in [1e-6, 1]", rt, 1e-12);

  double dual = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 r = oracle::random_ball(g);
    const auto [a0, a1] = oracle::random_alpha(g);
    const std::int64_t n = 3 * (1 + std::int64_t(u(g) * 100000));
    const double lib = analytic_variance(BlochVector(r), {a0, a1}, n);
    dual = std::max(dual, std::abs(lib - oracle::binomial_total_variance(r, a0, a1, double(n))) / std::max(1.0, lib));
  }
  report_bound("6b", "variance vs per-axis binomial form, 1e3 draws", dual, 1e-12);

  bool extremal = true;
  for (int c = 0; c < 10; ++c) {
    const auto [a0, a1] = oracle::random_alpha(g);
    if (std::abs(a0 - 1.0) < 1e-3) continue;
    const AlphaPair a{a0, a1};
    const auto ext = extremal_bloch(a);
    const double v_best = variance_per_shot(ext.best, a);
    const double v_worst = variance_per_shot(ext.worst, a);
    for (int i = 0; i < 100000; ++i) {
      const double v = variance_per_shot(BlochVector(oracle::random_unit(g)), a);
      extremal = extremal && v >= v_best - 1e-12 * v_best && v <= v_worst + 1e-12 * v_worst;
    }
  }
  report_flag("6c", "closed-form extremal states bound 1e5 random unit vectors, 10 random alpha pairs", extremal);

  double rot = 0.0;
  auto check_rotation = [&](const Vec3& from, const Vec3& to) {
    const auto f = feedback_rotation(BlochVector(from), BlochVector(to));
    rot = std::max(rot, (f.apply(BlochVector(from.normalized())).r - to).norm());
  };
  for (int i = 0; i < 10000; ++i) check_rotation(oracle::random_ball(g), oracle::random_unit(g));
  for (int i = 0; i < 10000; ++i) {
    const Vec3 to = oracle::random_unit(g);
    const Vec3 perp = to.cross(oracle::random_unit(g)).normalized();
    const double eps = std::pow(10.0, -6.0 + 4.0 * u(g));
    check_rotation(oracle::axis_angle(perp, std::numbers::pi - eps) * to * (0.1 + 0.9 * u(g)), to);
  }
  report_bound("6d", "feedback rotation maps from onto to, incl. angles up to pi - 1e-6", rot, 1e-12);

  bool idempotent = true;
  for (int i = 0; i < 100000; ++i) {
    const BlochVector once = project_ball(BlochVector(oracle::random_unit(g) * 3.0 * u(g)));
    idempotent = idempotent && project_ball(once).r == once.r;
  }
  report_flag("6e", "ball projection is idempotent, 1e5 vectors", idempotent);

  harness::ExperimentConfig cfg = config("compare_imperfect.cfg");
  cfg.trials = 64;
  cfg.protocol.sampler = ShotSampler::binomial;
  const std::string serial = harness::cmd_compare(cfg, Execution::serial).to_csv();
  bool identical = true;
  for (int threads : {1, 2, 3, 8}) {
    set_worker_count(threads);
    identical = identical && harness::cmd_compare(cfg, Execution::parallel).to_csv() == serial;
  }
  report_flag("6f", "compare output bit-identical for serial and 1/2/3/8 OpenMP threads", identical);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    ideal_reduction();
    compare_regression();
    scaling_law();
    landmarks();
    oracle_equivalence();
    property_suites();
  } catch (const std::exception& e) {
    fmt::print("FAIL [error] {}\n", e.what());
    return 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} failure(s), {:.0f} s\n", failures, secs);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
