#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qtraj/maps.hpp"

namespace qtraj {

/// Deterministic per-trajectory noise source. The (seed, stream_id) pair is
/// mixed into the engine seed so parallel trajectories draw independent,
/// reproducible sequences. Gaussians come from Box-Muller rather than
/// std::normal_distribution so sequences are bit-exact across standard
/// libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();  // (0, 1]
  double normal();   // N(0, 1)

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// One coarse bin's worth of fine-grained homodyne samples y_k (units
/// sqrt(rate)), taken at t0 + k*dt_fine.
struct FineRecordSegment {
  double t0 = 0.0;
  double dt_fine = 0.0;
  std::vector<double> samples;

  int count() const { return static_cast<int>(samples.size()); }
  double dt_bin() const { return dt_fine * static_cast<double>(samples.size()); }
};

/// y = mu + N(0,1)/sqrt(dt_fine), so y*dt_fine has mean mu*dt_fine and
/// variance dt_fine.
double sample_fine_increment(double mu, double dt_fine, RngStream& rng);

/// Discrete binning of a fine segment into the dual statistic:
///   I   = (sqrt(dt_bin)/n) sum_k y_k
///   phi = (2 sqrt(3)/(sqrt(dt_bin) n)) sum_k y_k (k*dt_fine - dt_bin/2)
BinnedRecord bin_record(const FineRecordSegment& seg);

/// Direct coarse sampling: I ~ N(sqrt(eta*dt_bin)*<c + c^dag>, 1) and
/// phi ~ N(0, 1), independent. Only first-order accurate in the mean; the
/// benchmark protocol uses the fine-grained path instead.
BinnedRecord sample_binned_direct(const MeasurementSetup& setup, const StateVector& psi,
                                  double dt_bin, RngStream& rng, double t = 0.0);

/// Raw-record file: magic "QTRJREC1", then little-endian u64 dim, f64 dt_fine,
/// u64 n (samples per segment), u64 segment count, then count*n f64 samples.
struct RecordFile {
  int dim = 0;
  double dt_fine = 0.0;
  std::size_t samples_per_segment = 0;
  std::vector<FineRecordSegment> segments;
};

void write_record_file(const std::string& path, int dim, double dt_fine,
                       const std::vector<FineRecordSegment>& segments);
RecordFile read_record_file(const std::string& path);

}  // namespace qtraj
