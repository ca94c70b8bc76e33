#include "aqst/criteria_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aqst/errors.hpp"

namespace aqst {

namespace {

constexpr double kRefineTol = 1e-6;
// Relative gap below which two refined minima count as the same value.
constexpr double kTieTol = 1e-6;

double var_min_at(const ReadoutModel& m, double lambda_c) {
  const SweepRow row = sweep_row(m, lambda_c);
  return row.degenerate ? std::numeric_limits<double>::infinity() : row.var_min_per_shot;
}

}  // namespace

void SweepGrid::validate() const {
  if (!(lambda_min < lambda_max) || !std::isfinite(lambda_min) || !std::isfinite(lambda_max)) {
    throw InvalidArgument("sweep grid needs lambda_min < lambda_max");
  }
  if (points < 2) throw InvalidArgument("sweep grid needs at least 2 points");
}

double SweepGrid::at(int i) const {
  if (i == points - 1) return lambda_max;
  return lambda_min + (lambda_max - lambda_min) * double(i) / double(points - 1);
}

SweepRow sweep_row(const ReadoutModel& m, double lambda_c) {
  SweepRow row;
  row.lambda_c = lambda_c;
  const AlphaPair a = alphas(m, lambda_c);
  row.alpha0 = a.alpha0;
  row.alpha1 = a.alpha1;
  if (std::abs(a.alpha1) < kMinContrast) {
    row.degenerate = true;
    row.var_min_per_shot = row.var_max_per_shot = row.reduction = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  const auto [v_min, v_max] = extremal_variance_per_shot(a);
  row.var_min_per_shot = v_min;
  row.var_max_per_shot = v_max;
  row.reduction = 1.0 - v_min / v_max;
  return row;
}

std::vector<SweepRow> sweep(const ReadoutModel& m, const SweepGrid& grid, Execution exec) {
  grid.validate();
  m.validate();
  return map_trials(
      std::size_t(grid.points), [&](std::uint64_t i) { return sweep_row(m, grid.at(int(i))); }, exec);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw NoSignChange("function keeps its sign on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

OptimalCriteria optimal_criteria(const ReadoutModel& m, const SweepGrid& grid) {
  grid.validate();
  m.validate();
  std::vector<double> values(std::size_t(grid.points));
  for (int i = 0; i < grid.points; ++i) values[std::size_t(i)] = var_min_at(m, grid.at(i));

  // Refine every grid-local minimum, then keep the lowest (and any ties).
  struct Candidate {
    double lambda_c;
    double value;
  };
  std::vector<Candidate> candidates;
  const int n = grid.points;
  for (int i = 0; i < n; ++i) {
    const double v = values[std::size_t(i)];
    if (!std::isfinite(v)) continue;
    const bool left_ok = i == 0 || v <= values[std::size_t(i - 1)];
    const bool right_ok = i == n - 1 || v < values[std::size_t(i + 1)];
    if (!left_ok || !right_ok) continue;
    const double lo = grid.at(std::max(i - 1, 0));
    const double hi = grid.at(std::min(i + 1, n - 1));
    const double x = golden_section_minimize([&](double l) { return var_min_at(m, l); }, lo, hi, kRefineTol);
    const double fx = var_min_at(m, x);
    candidates.push_back(fx <= v ? Candidate{x, fx} : Candidate{grid.at(i), v});
  }
  if (candidates.empty()) throw DegenerateCalibration("no finite variance anywhere on the sweep grid");

  const double best =
      std::min_element(candidates.begin(), candidates.end(), [](auto& a, auto& b) { return a.value < b.value; })
          ->value;
  OptimalCriteria out;
  out.var_min_per_shot = best;
  for (const Candidate& c : candidates) {
    if (c.value - best <= kTieTol * std::abs(best)) out.tied_minima.push_back(c.lambda_c);
  }
  std::sort(out.tied_minima.begin(), out.tied_minima.end());
  out.lambda_c = out.tied_minima.front();
  out.var_min_per_shot = var_min_at(m, out.lambda_c);
  out.non_unique = out.tied_minima.size() > 1;
  return out;
}

double find_crossing(const ReadoutModel& m, std::pair<double, double> bracket) {
  m.validate();
  auto [lo, hi] = bracket;
  if (lo > hi) std::swap(lo, hi);
  return bisect_root([&](double l) { return alphas(m, l).alpha0 - 1.0; }, lo, hi, 1e-12);
}

double alpha1_argmax(const ReadoutModel& m, const SweepGrid& grid) {
  grid.validate();
  double best_l = grid.at(0);
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.points; ++i) {
    const double v = alphas(m, grid.at(i)).alpha1;
    if (v > best_v) {
      best_v = v;
      best_l = grid.at(i);
    }
  }
  return best_l;
}

}  // namespace aqst
