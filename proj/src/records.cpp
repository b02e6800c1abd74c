#include "qtraj/records.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qtraj {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x517cc1b727220a95ULL))) {}

double RngStream::uniform() {
  // (0, 1]: never 0, so logs are safe.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double sample_fine_increment(double mu, double dt_fine, RngStream& rng) {
  if (dt_fine <= 0.0) throw std::invalid_argument("dt_fine must be positive");
  return mu + rng.normal() / std::sqrt(dt_fine);
}

BinnedRecord bin_record(const FineRecordSegment& seg) {
  const int n = seg.count();
  if (n < 1) throw std::invalid_argument("bin_record: empty segment");
  if (seg.dt_fine <= 0.0) throw std::invalid_argument("bin_record: dt_fine must be positive");
  const double dt = seg.dt_bin();
  const double rdt = std::sqrt(dt);
  double sum = 0.0;
  double wsum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += seg.samples[k];
    wsum += seg.samples[k] * (k * seg.dt_fine - 0.5 * dt);
  }
  BinnedRecord rec;
  rec.t = seg.t0;
  rec.dt_bin = dt;
  rec.I = rdt * sum / n;
  rec.phi = 2.0 * std::sqrt(3.0) * wsum / (rdt * n);
  return rec;
}

BinnedRecord sample_binned_direct(const MeasurementSetup& setup, const StateVector& psi,
                                  double dt_bin, RngStream& rng, double t) {
  if (dt_bin <= 0.0) throw std::invalid_argument("dt_bin must be positive");
  const ComplexMatrix obs = setup.c + setup.c.adjoint();
  const double mu = (psi.adjoint() * obs * psi)(0, 0).real();
  BinnedRecord rec;
  rec.t = t;
  rec.dt_bin = dt_bin;
  rec.I = std::sqrt(setup.eta * dt_bin) * mu + rng.normal();
  rec.phi = rng.normal();
  return rec;
}

namespace {

constexpr char kMagic[8] = {'Q', 'T', 'R', 'J', 'R', 'E', 'C', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("record file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  const std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_record_file(const std::string& path, int dim, double dt_fine,
                       const std::vector<FineRecordSegment>& segments) {
  if (segments.empty()) throw std::invalid_argument("no segments to write");
  const std::size_t n = segments.front().samples.size();
  for (const auto& seg : segments)
    if (seg.samples.size() != n)
      throw std::invalid_argument("all segments must have the same length");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open record file for writing: " + path);
  os.write(kMagic, 8);
  put_u64(os, static_cast<std::uint64_t>(dim));
  put_f64(os, dt_fine);
  put_u64(os, static_cast<std::uint64_t>(n));
  put_u64(os, static_cast<std::uint64_t>(segments.size()));
  for (const auto& seg : segments)
    for (double y : seg.samples) put_f64(os, y);
  if (!os) throw std::runtime_error("write failed: " + path);
}

RecordFile read_record_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open record file: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a record file: " + path);
  RecordFile rf;
  rf.dim = static_cast<int>(get_u64(is));
  rf.dt_fine = get_f64(is);
  rf.samples_per_segment = static_cast<std::size_t>(get_u64(is));
  const std::uint64_t count = get_u64(is);
  rf.segments.reserve(count);
  double t0 = 0.0;
  const double dt_bin = rf.dt_fine * static_cast<double>(rf.samples_per_segment);
  for (std::uint64_t s = 0; s < count; ++s) {
    FineRecordSegment seg;
    seg.t0 = t0;
    seg.dt_fine = rf.dt_fine;
    seg.samples.resize(rf.samples_per_segment);
    for (auto& y : seg.samples) y = get_f64(is);
    rf.segments.push_back(std::move(seg));
    t0 += dt_bin;
  }
  return rf;
}

}  // namespace qtraj
