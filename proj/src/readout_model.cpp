#include "aqst/readout_model.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "aqst/errors.hpp"

namespace aqst {

void ReadoutModel::validate() const {
  if (!(sigma_env > 0.0) || !std::isfinite(sigma_env)) {
    throw InvalidArgument("readout.sigma_env must be positive");
  }
  if (!std::isfinite(mu_g) || !std::isfinite(mu_e) || mu_g == mu_e) {
    throw InvalidArgument("readout envelope centers must be finite and distinct");
  }
  auto weight_ok = [](double w) { return w >= 0.0 && w < 1.0; };
  if (!weight_ok(w_decay) || !weight_ok(w_therm) || w_decay + w_therm >= 1.0) {
    throw InvalidArgument("readout contamination weights must lie in [0, 1) with w_decay + w_therm < 1");
  }
}

ReadoutModel ReadoutModel::calibrated() {
  // Output of `aqst_sim calibrate --config configs/calibrate_reference.cfg`;
  // sigma_env pinned to 0.7896 / 2, the other four fitted to the anchors.
  return ReadoutModel{
      .mu_g = -0.99923102570205,
      .mu_e = 0.99587212860159,
      .sigma_env = 0.3948,
      .w_decay = 0.19752229476087,
      .w_therm = 0.026921017290263,
  };
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

ConversionProbs conversion_probs(const ReadoutModel& m, double lambda_c) {
  const double below_g = normal_cdf((lambda_c - m.mu_g) / m.sigma_env);
  const double below_e = normal_cdf((lambda_c - m.mu_e) / m.sigma_env);
  return {
      (1.0 - m.w_therm) * below_g + m.w_therm * below_e,
      m.w_decay * below_g + (1.0 - m.w_decay) * below_e,
  };
}

AlphaPair alphas(const ReadoutModel& m, double lambda_c) {
  const auto [g0, e0] = conversion_probs(m, lambda_c);
  return AlphaPair::from_conversion(g0, e0);
}

AlphaPair alpha_slopes(const ReadoutModel& m, double lambda_c) {
  const double dg = normal_pdf((lambda_c - m.mu_g) / m.sigma_env) / m.sigma_env;
  const double de = normal_pdf((lambda_c - m.mu_e) / m.sigma_env) / m.sigma_env;
  const double d_g0 = (1.0 - m.w_therm) * dg + m.w_therm * de;
  const double d_e0 = m.w_decay * dg + (1.0 - m.w_decay) * de;
  return AlphaPair::from_conversion(d_g0, d_e0);
}

double sample_record(const ReadoutModel& m, Level level, Rng& rng) {
  boost::random::uniform_01<double> unit;
  boost::random::normal_distribution<double> gauss(0.0, m.sigma_env);
  const double swap_prob = level == Level::g ? m.w_therm : m.w_decay;
  const bool swapped = unit(rng) < swap_prob;
  const bool in_g_envelope = (level == Level::g) != swapped;
  return (in_g_envelope ? m.mu_g : m.mu_e) + gauss(rng);
}

CalibrationAnchors CalibrationAnchors::reference() {
  return {{
      {.lambda_c = 0.11, .alpha0 = 1.178, .alpha1 = 0.764, .stationary = false, .weight = 1.0},
      {.lambda_c = -0.5828, .alpha0 = 1.0, .alpha1 = std::nullopt, .stationary = false, .weight = 1.0},
      {.lambda_c = 0.11, .alpha0 = std::nullopt, .alpha1 = std::nullopt, .stationary = true, .weight = 1.0},
  }};
}

int PartialReadoutModel::free_count() const {
  return int(!mu_g) + int(!mu_e) + int(!sigma_env) + int(!w_decay) + int(!w_therm);
}

PartialReadoutModel PartialReadoutModel::reference() {
  PartialReadoutModel fixed;
  fixed.sigma_env = 0.7896 / 2.0;
  return fixed;
}

}  // namespace aqst
