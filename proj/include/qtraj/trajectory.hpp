#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtraj/maps.hpp"
#include "qtraj/records.hpp"

namespace qtraj {

/// Two-resolution protocol parameters, all expressed in units of the setup's
/// reference rate gamma.
struct ProtocolConfig {
  double gamma_dt_bin = 1e-2;
  double gamma_dt_fine = 1e-4;
  double total_time_in_gamma = 1.0;
  int realizations = 5000;
  std::uint64_t seed = 0;
  std::vector<MapKind> map_kinds = all_map_kinds();

  int n_per_bin() const;  // gamma_dt_bin / gamma_dt_fine, must divide exactly
  int n_bins() const;     // total_time_in_gamma / gamma_dt_bin, must divide exactly
  void validate() const;
};

/// One realization: the fine-resolution true chain sampled at bin boundaries,
/// one self-propagating coarse chain per map, and the shared binned records.
struct TrajectoryRun {
  std::vector<StateVector> true_states;  // length n_bins + 1
  std::map<MapKind, std::vector<StateVector>> coarse_states;
  std::vector<BinnedRecord> records;  // length n_bins
  bool aborted = false;
  std::string abort_reason;
};

/// One fine step of the true evolution: samples y with mean <c + c^dag>,
/// applies the Rouchon-Ralph map at resolution dt_fine. Returns the new state
/// and the sampled y.
std::pair<StateVector, double> step_true(const MeasurementSetup& setup, const StateVector& psi,
                                         double dt_fine, RngStream& rng);

TrajectoryRun run_trajectory(const MeasurementSetup& setup, const ProtocolConfig& cfg,
                             std::uint64_t traj_index);

/// Ordered product of fine Rouchon-Ralph updates over a recorded segment:
/// the fully conditioned state for that bin, to O(n (dt_fine)^{3/2}).
StateVector fully_conditioned_oracle(const MeasurementSetup& setup, const FineRecordSegment& seg,
                                     const StateVector& psi);

/// Re-anchored single-bin study: for each record, evolve the true state over
/// one bin at resolution dt_fine from the initial state, bin the record, apply
/// each map once, and take the median trace error against the fully
/// conditioned final state.
std::map<MapKind, double> single_bin_trae_median(const MeasurementSetup& setup,
                                                 const std::vector<MapKind>& kinds, double dt_bin,
                                                 double dt_fine, int n_records,
                                                 std::uint64_t seed);

}  // namespace qtraj
