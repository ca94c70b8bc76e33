#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "aqst/errors.hpp"
#include "aqst/readout_model.hpp"

namespace aqst {

namespace {

// d ln(var_min) / d lambda_c, where var_min is the per-shot variance at the
// best extremal state:
//   var_min = 12/a1^2 (3/4 - 3 h^2),  h = |a0 - 1|/2 + |a1|/(2 sqrt3).
double log_var_min_slope(const ReadoutModel& m, double lambda_c) {
  const AlphaPair a = alphas(m, lambda_c);
  const AlphaPair da = alpha_slopes(m, lambda_c);
  const double s0 = a.alpha0 >= 1.0 ? 1.0 : -1.0;
  const double s1 = a.alpha1 >= 0.0 ? 1.0 : -1.0;
  const double h = std::abs(a.alpha0 - 1.0) / 2.0 + std::abs(a.alpha1) / (2.0 * std::sqrt(3.0));
  const double inner = 0.75 - 3.0 * h * h;
  const double a1sq = a.alpha1 * a.alpha1;
  const double v = 12.0 / a1sq * inner;
  const double dv_da0 = -36.0 * h * s0 / a1sq;
  const double dv_da1 = -24.0 / (a1sq * a.alpha1) * inner - 36.0 * h * s1 / (std::sqrt(3.0) * a1sq);
  return (dv_da0 * da.alpha0 + dv_da1 * da.alpha1) / v;
}

// Free parameters are mapped to unconstrained coordinates: sigma = exp(u),
// w = sin^2(v).
enum class Param { mu_g, mu_e, sigma_env, w_decay, w_therm };

struct Layout {
  std::vector<Param> free;
  ReadoutModel base;

  ReadoutModel decode(const Eigen::VectorXd& x) const {
    ReadoutModel m = base;
    for (std::size_t i = 0; i < free.size(); ++i) {
      const double v = x[Eigen::Index(i)];
      switch (free[i]) {
        case Param::mu_g: m.mu_g = v; break;
        case Param::mu_e: m.mu_e = v; break;
        case Param::sigma_env: m.sigma_env = std::exp(v); break;
        case Param::w_decay: m.w_decay = std::sin(v) * std::sin(v); break;
        case Param::w_therm: m.w_therm = std::sin(v) * std::sin(v); break;
      }
    }
    return m;
  }

  Eigen::VectorXd encode(const ReadoutModel& m) const {
    Eigen::VectorXd x(Eigen::Index(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) {
      double& v = x[Eigen::Index(i)];
      switch (free[i]) {
        case Param::mu_g: v = m.mu_g; break;
        case Param::mu_e: v = m.mu_e; break;
        case Param::sigma_env: v = std::log(m.sigma_env); break;
        case Param::w_decay: v = std::asin(std::sqrt(m.w_decay)); break;
        case Param::w_therm: v = std::asin(std::sqrt(m.w_therm)); break;
      }
    }
    return x;
  }
};

struct Constraint {
  double lambda_c;
  enum class Kind { alpha0, alpha1, slope } kind;
  double target;
  double sqrt_weight;

  double evaluate(const ReadoutModel& m) const {
    switch (kind) {
      case Kind::alpha0: return alphas(m, lambda_c).alpha0;
      case Kind::alpha1: return alphas(m, lambda_c).alpha1;
      case Kind::slope: return log_var_min_slope(m, lambda_c);
    }
    return 0.0;
  }

  const char* name() const {
    switch (kind) {
      case Kind::alpha0: return "alpha0";
      case Kind::alpha1: return "alpha1";
      case Kind::slope: return "dvar_min";
    }
    return "";
  }
};

struct Residuals : Eigen::DenseFunctor<double> {
  const Layout* layout;
  const std::vector<Constraint>* constraints;

  Residuals(const Layout& l, const std::vector<Constraint>& c)
      : Eigen::DenseFunctor<double>(int(l.free.size()), int(c.size())), layout(&l), constraints(&c) {}

  int operator()(const InputType& x, ValueType& fvec) const {
    const ReadoutModel m = layout->decode(x);
    for (std::size_t i = 0; i < constraints->size(); ++i) {
      const Constraint& c = (*constraints)[i];
      fvec[Eigen::Index(i)] = c.sqrt_weight * (c.evaluate(m) - c.target);
    }
    return 0;
  }
};

std::vector<Constraint> flatten(const CalibrationAnchors& anchors) {
  if (anchors.points.empty()) throw UnderConstrained("calibration needs at least one anchor");
  std::vector<Constraint> out;
  std::map<std::pair<double, int>, int> seen;
  auto push = [&](const CalibrationAnchor& a, Constraint::Kind kind, double target) {
    if (seen[{a.lambda_c, int(kind)}]++ > 0) {
      throw InvalidArgument("duplicate calibration constraint at lambda_c = " + std::to_string(a.lambda_c));
    }
    out.push_back({a.lambda_c, kind, target, std::sqrt(a.weight)});
  };
  for (const CalibrationAnchor& a : anchors.points) {
    if (!(a.weight > 0.0)) throw InvalidArgument("anchor weights must be positive");
    if (a.alpha0 && (*a.alpha0 < 0.0 || *a.alpha0 > 2.0)) {
      throw CalibrationFailed("anchor alpha0 outside [0, 2] at lambda_c = " + std::to_string(a.lambda_c));
    }
    if (a.alpha0 && a.alpha1 && std::abs(*a.alpha1) > std::min(*a.alpha0, 2.0 - *a.alpha0) + 1e-12) {
      throw CalibrationFailed("anchor demands |alpha1| > min(alpha0, 2 - alpha0) at lambda_c = " +
                              std::to_string(a.lambda_c) + "; no pair of probabilities satisfies it");
    }
    if (a.alpha1 && std::abs(*a.alpha1) > 1.0) {
      throw CalibrationFailed("anchor alpha1 outside [-1, 1] at lambda_c = " + std::to_string(a.lambda_c));
    }
    if (a.alpha0) push(a, Constraint::Kind::alpha0, *a.alpha0);
    if (a.alpha1) push(a, Constraint::Kind::alpha1, *a.alpha1);
    if (a.stationary) push(a, Constraint::Kind::slope, 0.0);
  }
  return out;
}

}  // namespace

CalibrationResult calibrate(const CalibrationAnchors& anchors, const PartialReadoutModel& fixed,
                            const CalibrationOptions& options) {
  const std::vector<Constraint> constraints = flatten(anchors);

  Layout layout;
  layout.base = options.initial_guess;
  auto bind = [&](const std::optional<double>& pinned, double& slot, Param p) {
    if (pinned) {
      slot = *pinned;
    } else {
      layout.free.push_back(p);
    }
  };
  bind(fixed.mu_g, layout.base.mu_g, Param::mu_g);
  bind(fixed.mu_e, layout.base.mu_e, Param::mu_e);
  bind(fixed.sigma_env, layout.base.sigma_env, Param::sigma_env);
  bind(fixed.w_decay, layout.base.w_decay, Param::w_decay);
  bind(fixed.w_therm, layout.base.w_therm, Param::w_therm);

  if (layout.free.size() > constraints.size()) {
    throw UnderConstrained(std::to_string(layout.free.size()) + " free readout parameters but only " +
                           std::to_string(constraints.size()) + " anchor constraints");
  }
  layout.base.validate();

  ReadoutModel fitted = layout.base;
  if (!layout.free.empty()) {
    Residuals functor(layout, constraints);
    Eigen::NumericalDiff<Residuals, Eigen::Central> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals, Eigen::Central>> lm(diff);
    lm.setFtol(1e-15);
    lm.setXtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(options.max_function_evals);
    Eigen::VectorXd x = layout.encode(layout.base);
    lm.minimize(x);
    fitted = layout.decode(x);
  }

  CalibrationResult result;
  result.model = fitted;
  double weighted = 0.0;
  for (const Constraint& c : constraints) {
    const double value = c.evaluate(fitted);
    result.residuals.push_back({c.lambda_c, c.name(), c.target, value});
    weighted += c.sqrt_weight * c.sqrt_weight * (value - c.target) * (value - c.target);
  }
  result.rms_residual = std::sqrt(weighted / double(constraints.size()));

  try {
    fitted.validate();
  } catch (const InvalidArgument& e) {
    throw CalibrationFailed(std::string("fit left the valid parameter region: ") + e.what());
  }
  if (!(result.rms_residual <= options.residual_ceiling)) {
    throw CalibrationFailed("calibration residual " + std::to_string(result.rms_residual) +
                            " exceeds ceiling " + std::to_string(options.residual_ceiling));
  }
  return result;
}

}  // namespace aqst
