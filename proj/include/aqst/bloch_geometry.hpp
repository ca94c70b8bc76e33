#pragma once

// Maps between the Bloch ball and the cube of per-axis outcome-0
// probabilities, and the closed-form variance of the direct-inversion
// estimation error.
//
// Conventions: outcome "0" is identified with |g>, |g> sits at r_z = +1,
// and |psi> = cos(theta)|g> + e^{i phi} sin(theta)|e> maps to
//   r = (sin 2theta cos phi, sin 2theta sin phi, cos 2theta).

#include <array>
#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace aqst {

using Vec3 = Eigen::Vector3d;

/// Pure qubit state by its two Bloch angles. theta in [0, pi/2], phi in [0, 2pi).
struct QubitState {
  double theta = 0.0;
  double phi = 0.0;

  /// Wraps arbitrary angles into the canonical ranges describing the same ray.
  static QubitState normalized(double theta, double phi);

  /// (amplitude of |g>, amplitude of |e>).
  std::array<std::complex<double>, 2> amplitudes() const;
};

/// Point in Bloch space. Estimates before projection may leave the unit ball,
/// so the ball constraint is checked by in_ball() rather than enforced.
struct BlochVector {
  Vec3 r = Vec3::Zero();

  BlochVector() = default;
  BlochVector(double x, double y, double z) : r(x, y, z) {}
  explicit BlochVector(const Vec3& v) : r(v) {}

  double x() const { return r.x(); }
  double y() const { return r.y(); }
  double z() const { return r.z(); }
  double norm() const { return r.norm(); }
  bool in_ball(double tol = 1e-12) const { return r.norm() <= 1.0 + tol; }
};

/// Per-axis probabilities of reading outcome 0.
/// `p_lo` holds the rounding residual when p comes from bloch_to_prob, so the
/// inverse map stays exact at small contrast. Frequencies leave it at zero.
struct ProbabilityPoint {
  Vec3 p = Vec3::Constant(0.5);
  Vec3 p_lo = Vec3::Zero();

  ProbabilityPoint() = default;
  ProbabilityPoint(double x, double y, double z) : p(x, y, z) {}
  explicit ProbabilityPoint(const Vec3& v) : p(v) {}
};

/// alpha0 = P(g->0) + P(e->0), alpha1 = P(g->0) - P(e->0).
struct AlphaPair {
  double alpha0 = 1.0;
  double alpha1 = 1.0;

  static AlphaPair from_conversion(double p_g0, double p_e0) { return {p_g0 + p_e0, p_g0 - p_e0}; }

  double p_g0() const { return 0.5 * (alpha0 + alpha1); }
  double p_e0() const { return 0.5 * (alpha0 - alpha1); }

  /// Both conversion probabilities lie in [0, 1].
  bool physical(double tol = 1e-12) const;
};

/// Smallest |alpha1| accepted by the inverse map.
inline constexpr double kMinContrast = 1e-9;
/// Half-width of the band around alpha0 = 1 treated as geometrically degenerate.
inline constexpr double kDegenerateSkew = 1e-9;

BlochVector state_to_bloch(const QubitState& s);
/// Inverse of state_to_bloch for unit vectors (the length is ignored).
QubitState bloch_to_state(const BlochVector& r);

ProbabilityPoint bloch_to_prob(const BlochVector& r, const AlphaPair& a);
/// Throws DegenerateCalibration when |alpha1| < kMinContrast.
BlochVector prob_to_bloch(const ProbabilityPoint& p, const AlphaPair& a);

/// R = p - (1/2, 1/2, 1/2).
Vec3 offset_vector(const ProbabilityPoint& p);

/// N * sigma^2(Delta) = (12 / alpha1^2) (3/4 - |R|^2).
double variance_per_shot(const BlochVector& r, const AlphaPair& a);
/// sigma^2(Delta) for a budget of `shots` split evenly over the three axes.
double analytic_variance(const BlochVector& r, const AlphaPair& a, std::int64_t shots);

template <class T>
struct BestWorst {
  T best;
  T worst;
};

/// Unit vectors of minimal (best) and maximal (worst) estimation variance:
/// best = s (1,1,1)/sqrt3, worst = -best, s = sign(alpha0 - 1).
/// Throws DegenerateGeometry when |alpha0 - 1| < kDegenerateSkew.
BestWorst<BlochVector> extremal_bloch(const AlphaPair& a);
BestWorst<QubitState> extremal_kets(const AlphaPair& a);

/// Per-shot variance at the two extremal states. Unlike extremal_bloch this is
/// total: at alpha0 = 1 both values coincide.
BestWorst<double> extremal_variance_per_shot(const AlphaPair& a);

}  // namespace aqst
