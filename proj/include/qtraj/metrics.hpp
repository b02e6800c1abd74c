#pragma once

#include <utility>
#include <vector>

#include "qtraj/trajectory.hpp"

namespace qtraj {

/// Trace distance between pure states: sqrt(1 - |<a|b>|^2), in [0, 1].
double trae_pure(const StateVector& a, const StateVector& b);

/// Trace distance between density matrices: half the absolute eigenvalue sum
/// of rho - sigma.
double trae_mixed(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Time-averaged squared trace error of one coarse chain against the true
/// chain: mean over bins of 2(1 - overlap^2). Callers take the square root
/// for histograms.
double time_avg_trse(const TrajectoryRun& run, MapKind kind);

/// Mean over bins of the trace distance between coarse and true states.
double mean_trae(const TrajectoryRun& run, MapKind kind);

/// Ensemble reduction of one map's per-trajectory statistics. sigma is the
/// square root of the time-averaged squared trace error, so mtrse averages
/// roots, not squares.
struct ErrorSummary {
  std::vector<double> sigma_time_avg;  // per surviving trajectory
  double mtrse = 0.0;
  double mtrae = 0.0;
  std::vector<double> hist_edges;  // hist_counts.size() + 1, log-spaced
  std::vector<int> hist_counts;
  int aborted_count = 0;
};

ErrorSummary ensemble_reduce(const std::vector<double>& sigma_per_traj,
                             const std::vector<double>& mean_trae_per_traj, int aborted_count,
                             int hist_bins = 50, double hist_lo = 1e-7, double hist_hi = 1e-1);

/// Log-log least-squares fit of error vs dt; slope is the empirical
/// convergence order. Requires >= 3 strictly increasing dt values and
/// positive errors.
struct ScalingFit {
  std::vector<double> dt_values;
  std::vector<double> error_values;
  double slope = 0.0;
  double intercept = 0.0;  // of log(error) vs log(dt)
  double r_squared = 0.0;
};

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

/// Ratio of a measured N-step accumulated error to the (2/3) sqrt(N) x
/// per-step model; 1 when both vanish. Diagnostic only.
double appendix_b_check(double per_step_D, int N, double measured_Dbar);

double median(std::vector<double> values);

}  // namespace qtraj
