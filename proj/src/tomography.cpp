#include "aqst/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "aqst/errors.hpp"

namespace aqst {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::int64_t count_zeros_by_record(double prob_g, const ReadoutModel& m, double lambda_c, std::int64_t shots,
                                   Rng& rng) {
  boost::random::uniform_01<double> unit;
  std::int64_t zeros = 0;
  for (std::int64_t i = 0; i < shots; ++i) {
    const Level level = unit(rng) < prob_g ? Level::g : Level::e;
    zeros += classify(sample_record(m, level, rng), lambda_c) == 0;
  }
  return zeros;
}

}  // namespace

void require_budget(std::int64_t n_total) {
  if (n_total <= 0 || n_total % 3 != 0) {
    throw InvalidBudget("shot budget " + std::to_string(n_total) + " is not a positive multiple of 3");
  }
}

CountTriple simulate_counts(const BlochVector& r, const ReadoutModel& m, double lambda_c, std::int64_t n_total,
                            Rng& rng, ShotSampler sampler) {
  require_budget(n_total);
  if (!r.in_ball()) throw InvalidArgument("true state lies outside the Bloch ball");

  CountTriple counts;
  counts.n_per_axis = n_total / 3;
  const AlphaPair a = alphas(m, lambda_c);
  for (int k = 0; k < 3; ++k) {
    const double rk = std::clamp(r.r[k], -1.0, 1.0);
    if (sampler == ShotSampler::records) {
      counts.zeros[k] = count_zeros_by_record(0.5 * (1.0 + rk), m, lambda_c, counts.n_per_axis, rng);
    } else {
      const double pk = std::clamp(0.5 * (a.alpha0 + a.alpha1 * rk), 0.0, 1.0);
      boost::random::binomial_distribution<std::int64_t, double> binom(counts.n_per_axis, pk);
      counts.zeros[k] = binom(rng);
    }
  }
  return counts;
}

EstimatorResult invert(const CountTriple& counts, const AlphaPair& a) {
  if (counts.n_per_axis <= 0) throw InvalidBudget("empty count triple");
  EstimatorResult est;
  est.n_total = counts.n_total();
  const double n = double(counts.n_per_axis);
  est.p_hat = ProbabilityPoint(double(counts.zeros[0]) / n, double(counts.zeros[1]) / n, double(counts.zeros[2]) / n);
  est.r_hat_raw = prob_to_bloch(est.p_hat, a);
  est.r_hat = project_ball(est.r_hat_raw);
  return est;
}

BlochVector project_ball(const BlochVector& r_raw) {
  // Rescaled vectors can land a few ulps above 1; accepting them keeps the
  // projection exactly idempotent.
  constexpr double kUnitSlack = 4.0 * std::numeric_limits<double>::epsilon();
  const double n = r_raw.norm();
  return n <= 1.0 + kUnitSlack ? r_raw : BlochVector(r_raw.r / n);
}

double qubit_fidelity(const BlochVector& a, const BlochVector& b) {
  // 1 - |r|^2 of a unit vector is rounding noise, and its square root would
  // put ~1e-8 into F; snap it to zero.
  auto mixedness = [](const BlochVector& r) {
    const double m = 1.0 - r.r.squaredNorm();
    return m < 8.0 * std::numeric_limits<double>::epsilon() ? 0.0 : m;
  };
  const double mixed_a = mixedness(a);
  const double mixed_b = mixedness(b);
  return 0.5 * (1.0 + a.r.dot(b.r)) + 0.5 * std::sqrt(mixed_a * mixed_b);
}

ErrorMetrics error_metrics(const BlochVector& truth, const BlochVector& estimate) {
  ErrorMetrics out;
  out.delta = (estimate.r - truth.r).norm();
  out.hs_distance = 0.5 * out.delta * out.delta;
  out.trace_distance = 0.5 * out.delta;
  out.infidelity = out.delta == 0.0 ? 0.0 : std::clamp(1.0 - qubit_fidelity(truth, estimate), 0.0, 1.0);
  return out;
}

ErrorMetrics error_metrics(const BlochVector& truth, const EstimatorResult& est, EstimateChoice choice) {
  return error_metrics(truth, choice == EstimateChoice::raw ? est.r_hat_raw : est.r_hat);
}

VarianceReport empirical_variance(std::span<const double> deltas, std::int64_t n_total) {
  if (deltas.size() < 2) throw InsufficientTrials("variance needs at least 2 trials");
  const double t = double(deltas.size());
  double sum = 0.0;
  for (double d : deltas) sum += d * d;
  const double mean = sum / t;
  double ss = 0.0;
  for (double d : deltas) ss += (d * d - mean) * (d * d - mean);
  const double sd = std::sqrt(ss / (t - 1.0));

  VarianceReport rep;
  rep.n_total = n_total;
  rep.trials = deltas.size();
  rep.mean_delta_sq = mean;
  rep.variance_times_n = double(n_total) * mean;
  rep.ci_half_width = double(n_total) * kZ95 * sd / std::sqrt(t);
  return rep;
}

VarianceReport dispersion_variance(std::span<const BlochVector> estimates, std::int64_t n_total) {
  if (estimates.size() < 2) throw InsufficientTrials("variance needs at least 2 trials");
  const double t = double(estimates.size());
  Vec3 centre = Vec3::Zero();
  for (const BlochVector& e : estimates) centre += e.r;
  centre /= t;

  double sum = 0.0;
  for (const BlochVector& e : estimates) sum += (e.r - centre).squaredNorm();
  const double mean = sum / (t - 1.0);
  double ss = 0.0;
  for (const BlochVector& e : estimates) {
    const double d = (e.r - centre).squaredNorm() * t / (t - 1.0) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (t - 1.0));

  VarianceReport rep;
  rep.n_total = n_total;
  rep.trials = estimates.size();
  rep.mean_delta_sq = mean;
  rep.variance_times_n = double(n_total) * mean;
  rep.ci_half_width = double(n_total) * kZ95 * sd / std::sqrt(t);
  return rep;
}

}  // namespace aqst
