#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the library's closed forms: states go through explicit 2x2
// density matrices, probabilities through numerical integration, extremes
// through brute-force search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 pauli_y() { Mat2 m; m << 0, cd(0, -1), cd(0, 1), 0; return m; }
inline Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }

/// |psi> = a|g> + b|e>, |g> = (1,0).
inline Mat2 ket_to_rho(cd a, cd b) {
  Eigen::Vector2cd psi(a, b);
  return psi * psi.adjoint();
}

inline Mat2 bloch_to_rho(const Eigen::Vector3d& r) {
  return 0.5 * (Mat2::Identity() + r.x() * pauli_x() + r.y() * pauli_y() + r.z() * pauli_z());
}

/// (<sigma_x>, <sigma_y>, <sigma_z>) = Tr(rho sigma_k).
inline Eigen::Vector3d expectation_values(const Mat2& rho) {
  return {(rho * pauli_x()).trace().real(), (rho * pauli_y()).trace().real(), (rho * pauli_z()).trace().real()};
}

/// Square root of a Hermitian PSD matrix by eigendecomposition.
inline Mat2 sqrtm_psd(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double uhlmann_fidelity(const Mat2& rho, const Mat2& sigma) {
  const Mat2 s = sqrtm_psd(rho);
  const Mat2 inner = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (inner + inner.adjoint()));
  double t = 0.0;
  for (int i = 0; i < 2; ++i) t += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return t * t;
}

/// Half the sum of absolute eigenvalues of rho - sigma.
inline double trace_distance(const Mat2& rho, const Mat2& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(rho - sigma);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Per-axis binomial form of the total inversion variance:
/// sum_k Var(r_hat_k) = sum_k p_k (1 - p_k) / (N/3) * (2/alpha1)^2.
inline double binomial_total_variance(const Eigen::Vector3d& r, double alpha0, double alpha1, double shots) {
  double v = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double p = 0.5 * (alpha0 + alpha1 * r(k));
    v += p * (1.0 - p);
  }
  return (3.0 / shots) * v * 4.0 / (alpha1 * alpha1);
}

/// P(record < lambda) for a Gaussian centred at mu, by composite Simpson
/// integration of the density from mu - 12 sigma.
inline double gaussian_below(double mu, double sigma, double lambda) {
  const double lo = mu - 12.0 * sigma;
  if (lambda <= lo) return 0.0;
  const int n = 20000;
  const double h = (lambda - lo) / n;
  auto pdf = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  double s = pdf(lo) + pdf(lambda);
  for (int i = 1; i < n; ++i) s += pdf(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return std::min(1.0, s * h / 3.0);
}

/// Rotation matrix about a unit axis, built from the outer-product form
/// R = cos a I + sin a [u]_x + (1 - cos a) u u^T.
inline Eigen::Matrix3d axis_angle(const Eigen::Vector3d& u, double a) {
  Eigen::Matrix3d ux;
  ux << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  return std::cos(a) * Eigen::Matrix3d::Identity() + std::sin(a) * ux + (1.0 - std::cos(a)) * u * u.transpose();
}

inline Eigen::Vector3d random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {n(g), n(g), n(g)};
  } while (v.norm() < 1e-9);
  return v.normalized();
}

/// Uniform point in the unit ball.
inline Eigen::Vector3d random_ball(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return random_unit(g) * std::cbrt(u(g));
}

/// Random physical alpha pair: conversion probabilities with p_g0 > p_e0.
inline std::pair<double, double> random_alpha(std::mt19937_64& g, double min_contrast = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double a = u(g), b = u(g);
    const double pg = std::max(a, b), pe = std::min(a, b);
    if (pg - pe >= min_contrast) return {pg + pe, pg - pe};
  }
}

/// Least-squares slope of y against x.
template <class V>
double ls_slope(const V& x, const V& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
