#include "qtraj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qtraj {

double trae_pure(const StateVector& a, const StateVector& b) {
  return std::sqrt(clamp_nonneg(1.0 - pure_overlap_sq(a, b)));
}

double trae_mixed(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  check_same_dim(rho, sigma);
  const auto ev = hermitian_eigenvalues(rho - sigma);
  double sum = 0.0;
  for (double v : ev) sum += std::abs(v);
  return 0.5 * sum;
}

double time_avg_trse(const TrajectoryRun& run, MapKind kind) {
  const auto it = run.coarse_states.find(kind);
  if (it == run.coarse_states.end())
    throw std::invalid_argument("time_avg_trse: map kind not in run");
  const auto& coarse = it->second;
  const std::size_t N = run.records.size();
  if (N == 0 || coarse.size() != N + 1 || run.true_states.size() != N + 1)
    throw std::invalid_argument("time_avg_trse: incomplete run");
  double acc = 0.0;
  for (std::size_t j = 1; j <= N; ++j)
    acc += 2.0 * (1.0 - pure_overlap_sq(run.true_states[j], coarse[j]));
  return acc / N;
}

double mean_trae(const TrajectoryRun& run, MapKind kind) {
  const auto it = run.coarse_states.find(kind);
  if (it == run.coarse_states.end()) throw std::invalid_argument("mean_trae: map kind not in run");
  const auto& coarse = it->second;
  const std::size_t N = run.records.size();
  if (N == 0 || coarse.size() != N + 1 || run.true_states.size() != N + 1)
    throw std::invalid_argument("mean_trae: incomplete run");
  double acc = 0.0;
  for (std::size_t j = 1; j <= N; ++j) acc += trae_pure(run.true_states[j], coarse[j]);
  return acc / N;
}

ErrorSummary ensemble_reduce(const std::vector<double>& sigma_per_traj,
                             const std::vector<double>& mean_trae_per_traj, int aborted_count,
                             int hist_bins, double hist_lo, double hist_hi) {
  if (sigma_per_traj.empty()) throw std::invalid_argument("ensemble_reduce: empty ensemble");
  if (sigma_per_traj.size() != mean_trae_per_traj.size())
    throw std::invalid_argument("ensemble_reduce: mismatched inputs");
  if (hist_bins < 1 || hist_lo <= 0.0 || hist_hi <= hist_lo)
    throw std::invalid_argument("ensemble_reduce: bad histogram spec");

  ErrorSummary s;
  s.sigma_time_avg = sigma_per_traj;
  s.aborted_count = aborted_count;
  s.mtrse = std::accumulate(sigma_per_traj.begin(), sigma_per_traj.end(), 0.0) /
            sigma_per_traj.size();
  s.mtrae = std::accumulate(mean_trae_per_traj.begin(), mean_trae_per_traj.end(), 0.0) /
            mean_trae_per_traj.size();

  const double llo = std::log10(hist_lo);
  const double lhi = std::log10(hist_hi);
  s.hist_edges.resize(hist_bins + 1);
  for (int b = 0; b <= hist_bins; ++b)
    s.hist_edges[b] = std::pow(10.0, llo + (lhi - llo) * b / hist_bins);
  s.hist_counts.assign(hist_bins, 0);
  for (double v : sigma_per_traj) {
    int b;
    if (v <= hist_lo) {
      b = 0;  // out-of-range values land in the edge bins
    } else if (v >= hist_hi) {
      b = hist_bins - 1;
    } else {
      b = static_cast<int>((std::log10(v) - llo) / (lhi - llo) * hist_bins);
      b = std::clamp(b, 0, hist_bins - 1);
    }
    ++s.hist_counts[b];
  }
  return s;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_scaling: need >= 3 points");
  ScalingFit f;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [dt, err] = points[i];
    if (dt <= 0.0 || err <= 0.0)
      throw std::invalid_argument("fit_scaling: values must be positive");
    if (i > 0 && dt <= points[i - 1].first)
      throw std::invalid_argument("fit_scaling: dt values must be strictly increasing");
    f.dt_values.push_back(dt);
    f.error_values.push_back(err);
  }
  const std::size_t n = points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(f.dt_values[i]);
    const double y = std::log(f.error_values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(f.error_values[i]) - (f.slope * std::log(f.dt_values[i]) + f.intercept);
    ss_res += r * r;
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

double appendix_b_check(double per_step_D, int N, double measured_Dbar) {
  if (N < 1) throw std::invalid_argument("appendix_b_check: N must be >= 1");
  const double model = (2.0 / 3.0) * std::sqrt(static_cast<double>(N)) * per_step_D;
  if (model == 0.0 && measured_Dbar == 0.0) return 1.0;
  return measured_Dbar / model;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t m = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + m, values.end());
  if (values.size() % 2 == 1) return values[m];
  const double hi = values[m];
  std::nth_element(values.begin(), values.begin() + m - 1, values.begin() + m);
  return 0.5 * (values[m - 1] + hi);
}

}  // namespace qtraj
