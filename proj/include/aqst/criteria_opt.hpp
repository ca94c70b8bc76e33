#pragma once

// Threshold sweeps: readout calibration curves, the extremal variances, the
// best/worst crossing and the variance-optimal threshold.

#include <functional>
#include <utility>
#include <vector>

#include "aqst/readout_model.hpp"
#include "aqst/trials.hpp"

namespace aqst {

struct SweepGrid {
  double lambda_min = -1.5;
  double lambda_max = 1.5;
  int points = 601;

  void validate() const;
  double at(int i) const;
};

struct SweepRow {
  double lambda_c = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double var_min_per_shot = 0.0;
  double var_max_per_shot = 0.0;
  double reduction = 0.0;
  /// alpha1 too small to invert; the variance columns hold NaN.
  bool degenerate = false;
};

SweepRow sweep_row(const ReadoutModel& m, double lambda_c);
std::vector<SweepRow> sweep(const ReadoutModel& m, const SweepGrid& grid, Execution exec = Execution::parallel);

struct OptimalCriteria {
  double lambda_c = 0.0;
  double var_min_per_shot = 0.0;
  /// Another grid minimum tied with this one; lambda_c is the smallest.
  bool non_unique = false;
  std::vector<double> tied_minima;
};

/// Threshold minimizing the best-state variance: grid scan, then
/// golden-section refinement to 1e-4.
OptimalCriteria optimal_criteria(const ReadoutModel& m, const SweepGrid& grid);

/// Threshold where alpha0 = 1 (best and worst variance coincide), by bisection.
/// Throws NoSignChange when alpha0 - 1 keeps its sign over the bracket.
double find_crossing(const ReadoutModel& m, std::pair<double, double> bracket);

/// Grid argmax of alpha1.
double alpha1_argmax(const ReadoutModel& m, const SweepGrid& grid);

/// Golden-section minimization of a unimodal f on [lo, hi] down to `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);
/// Bisection root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace aqst
