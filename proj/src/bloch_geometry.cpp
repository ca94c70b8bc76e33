#include "aqst/bloch_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aqst/errors.hpp"

namespace aqst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can round a tiny negative input up to exactly 2pi
  return w >= kTwoPi ? 0.0 : w;
}

// Error-free sum: hi + lo == a + b exactly.
void two_sum(double a, double b, double& hi, double& lo) {
  hi = a + b;
  const double bb = hi - a;
  lo = (a - (hi - bb)) + (b - bb);
}

}  // namespace

QubitState QubitState::normalized(double theta, double phi) {
  return bloch_to_state(state_to_bloch(QubitState{theta, phi}));
}

std::array<std::complex<double>, 2> QubitState::amplitudes() const {
  return {std::complex<double>(std::cos(theta), 0.0), std::polar(std::sin(theta), phi)};
}

bool AlphaPair::physical(double tol) const {
  const double g = p_g0();
  const double e = p_e0();
  return g >= -tol && g <= 1.0 + tol && e >= -tol && e <= 1.0 + tol;
}

BlochVector state_to_bloch(const QubitState& s) {
  const double s2 = std::sin(2.0 * s.theta);
  return {s2 * std::cos(s.phi), s2 * std::sin(s.phi), std::cos(2.0 * s.theta)};
}

QubitState bloch_to_state(const BlochVector& r) {
  const double n = r.norm();
  if (n == 0.0) return {};
  const double cz = std::clamp(r.z() / n, -1.0, 1.0);
  const double phi = (r.x() == 0.0 && r.y() == 0.0) ? 0.0 : wrap_angle(std::atan2(r.y(), r.x()));
  return {0.5 * std::acos(cz), phi};
}

ProbabilityPoint bloch_to_prob(const BlochVector& r, const AlphaPair& a) {
  ProbabilityPoint out;
  for (int k = 0; k < 3; ++k) {
    const double t = a.alpha1 * r.r[k];
    const double t_err = std::fma(a.alpha1, r.r[k], -t);
    double s = 0.0, s_err = 0.0;
    two_sum(a.alpha0, t, s, s_err);
    out.p[k] = 0.5 * s;
    out.p_lo[k] = 0.5 * (s_err + t_err);
  }
  return out;
}

BlochVector prob_to_bloch(const ProbabilityPoint& p, const AlphaPair& a) {
  if (std::abs(a.alpha1) < kMinContrast) {
    throw DegenerateCalibration("readout contrast alpha1 = " + std::to_string(a.alpha1) +
                                " cannot distinguish |g> from |e>");
  }
  Vec3 r;
  for (int k = 0; k < 3; ++k) {
    double d = 0.0, d_err = 0.0;
    two_sum(2.0 * p.p[k], -a.alpha0, d, d_err);
    r[k] = (d + (d_err + 2.0 * p.p_lo[k])) / a.alpha1;
  }
  return BlochVector(r);
}

Vec3 offset_vector(const ProbabilityPoint& p) { return p.p - Vec3::Constant(0.5); }

double variance_per_shot(const BlochVector& r, const AlphaPair& a) {
  if (std::abs(a.alpha1) < kMinContrast) {
    throw DegenerateCalibration("variance undefined for alpha1 = " + std::to_string(a.alpha1));
  }
  const Vec3 big_r = offset_vector(bloch_to_prob(r, a));
  return 12.0 / (a.alpha1 * a.alpha1) * (0.75 - big_r.squaredNorm());
}

double analytic_variance(const BlochVector& r, const AlphaPair& a, std::int64_t shots) {
  if (shots <= 0) throw InvalidBudget("shot count must be positive");
  return variance_per_shot(r, a) / static_cast<double>(shots);
}

BestWorst<BlochVector> extremal_bloch(const AlphaPair& a) {
  if (std::abs(a.alpha1) < kMinContrast) {
    throw DegenerateCalibration("no extremal states without readout contrast");
  }
  if (std::abs(a.alpha0 - 1.0) < kDegenerateSkew) {
    throw DegenerateGeometry("alpha0 = 1: all Bloch directions share the same variance");
  }
  const double s = a.alpha0 > 1.0 ? 1.0 : -1.0;
  const Vec3 diag = Vec3::Ones() / std::sqrt(3.0);
  return {BlochVector(s * diag), BlochVector(-s * diag)};
}

BestWorst<QubitState> extremal_kets(const AlphaPair& a) {
  const auto [best, worst] = extremal_bloch(a);
  return {bloch_to_state(best), bloch_to_state(worst)};
}

BestWorst<double> extremal_variance_per_shot(const AlphaPair& a) {
  const Vec3 diag = Vec3::Ones() / std::sqrt(3.0);
  const double v_plus = variance_per_shot(BlochVector(diag), a);
  const double v_minus = variance_per_shot(BlochVector(-diag), a);
  return {std::min(v_plus, v_minus), std::max(v_plus, v_minus)};
}

}  // namespace aqst
