#include "qtraj/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "qtraj/metrics.hpp"

namespace qtraj {

namespace {

int exact_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const int n = static_cast<int>(std::llround(r));
  if (n < 1 || std::abs(r - n) > 1e-9 * n)
    throw std::invalid_argument(std::string(what) + " must divide exactly");
  return n;
}

}  // namespace

int ProtocolConfig::n_per_bin() const {
  return exact_ratio(gamma_dt_bin, gamma_dt_fine, "gamma_dt_bin / gamma_dt_fine");
}

int ProtocolConfig::n_bins() const {
  return exact_ratio(total_time_in_gamma, gamma_dt_bin, "total_time / gamma_dt_bin");
}

void ProtocolConfig::validate() const {
  if (gamma_dt_bin <= 0.0 || gamma_dt_fine <= 0.0 || total_time_in_gamma <= 0.0)
    throw std::invalid_argument("time steps must be positive");
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (map_kinds.empty()) throw std::invalid_argument("no map kinds requested");
  (void)n_per_bin();
  (void)n_bins();
}

std::pair<StateVector, double> step_true(const MeasurementSetup& setup, const StateVector& psi,
                                         double dt_fine, RngStream& rng) {
  const ComplexMatrix obs = setup.c + setup.c.adjoint();
  const double mu = (psi.adjoint() * obs * psi)(0, 0).real();
  const double y = sample_fine_increment(mu, dt_fine, rng);
  BinnedRecord rec{std::sqrt(dt_fine) * y, 0.0, 0.0, dt_fine};
  ComplexMatrix M = build_map(MapKind::RouchonRalph, setup, rec);
  auto [out, w] = apply_pure_map(M, psi);
  (void)w;
  return {out, y};
}

TrajectoryRun run_trajectory(const MeasurementSetup& setup, const ProtocolConfig& cfg,
                             std::uint64_t traj_index) {
  setup.validate();
  cfg.validate();
  const double dt_fine = cfg.gamma_dt_fine / setup.gamma;
  const double dt_bin = cfg.gamma_dt_bin / setup.gamma;
  const int n = cfg.n_per_bin();
  const int N = cfg.n_bins();

  TrajectoryRun run;
  run.true_states.reserve(N + 1);
  run.true_states.push_back(setup.initial_state);
  run.records.reserve(N);
  for (MapKind kind : cfg.map_kinds) {
    run.coarse_states[kind].reserve(N + 1);
    run.coarse_states[kind].push_back(setup.initial_state);
  }

  RngStream rng(cfg.seed, traj_index);
  StateVector psi = setup.initial_state;
  try {
    for (int j = 0; j < N; ++j) {
      FineRecordSegment seg;
      seg.t0 = j * dt_bin;
      seg.dt_fine = dt_fine;
      seg.samples.resize(n);
      for (int k = 0; k < n; ++k) {
        auto [next, y] = step_true(setup, psi, dt_fine, rng);
        psi = std::move(next);
        seg.samples[k] = y;
      }
      run.true_states.push_back(psi);
      const BinnedRecord rec = bin_record(seg);
      run.records.push_back(rec);
      for (MapKind kind : cfg.map_kinds) {
        BinnedRecord rec_k = rec;
        if (kind != MapKind::Phi) rec_k.phi = 0.0;
        auto& chain = run.coarse_states[kind];
        ComplexMatrix M = build_map(kind, setup, rec_k);
        chain.push_back(apply_pure_map(M, chain.back()).first);
      }
    }
  } catch (const std::runtime_error& e) {
    run.aborted = true;
    run.abort_reason = e.what();
  }
  return run;
}

StateVector fully_conditioned_oracle(const MeasurementSetup& setup, const FineRecordSegment& seg,
                                     const StateVector& psi) {
  if (seg.count() < 1) throw std::invalid_argument("empty record segment");
  StateVector out = psi;
  const double rdt = std::sqrt(seg.dt_fine);
  for (double y : seg.samples) {
    BinnedRecord rec{rdt * y, 0.0, 0.0, seg.dt_fine};
    ComplexMatrix M = build_map(MapKind::RouchonRalph, setup, rec);
    out = apply_pure_map(M, out).first;
  }
  return out;
}

std::map<MapKind, double> single_bin_trae_median(const MeasurementSetup& setup,
                                                 const std::vector<MapKind>& kinds, double dt_bin,
                                                 double dt_fine, int n_records,
                                                 std::uint64_t seed) {
  setup.validate();
  if (n_records < 1) throw std::invalid_argument("n_records must be >= 1");
  const int n = exact_ratio(dt_bin, dt_fine, "dt_bin / dt_fine");

  std::map<MapKind, std::vector<double>> traes;
  for (MapKind kind : kinds) traes[kind].reserve(n_records);

  for (int r = 0; r < n_records; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    FineRecordSegment seg;
    seg.dt_fine = dt_fine;
    seg.samples.resize(n);
    StateVector psi = setup.initial_state;
    for (int k = 0; k < n; ++k) {
      auto [next, y] = step_true(setup, psi, dt_fine, rng);
      psi = std::move(next);
      seg.samples[k] = y;
    }
    const StateVector oracle = psi;  // product of the fine maps
    const BinnedRecord rec = bin_record(seg);
    for (MapKind kind : kinds) {
      BinnedRecord rec_k = rec;
      if (kind != MapKind::Phi) rec_k.phi = 0.0;
      ComplexMatrix M = build_map(kind, setup, rec_k);
      const StateVector est = apply_pure_map(M, setup.initial_state).first;
      traes[kind].push_back(trae_pure(est, oracle));
    }
  }

  std::map<MapKind, double> medians;
  for (auto& [kind, values] : traes) medians[kind] = median(std::move(values));
  return medians;
}

}  // namespace qtraj
