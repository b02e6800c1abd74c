#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtraj/metrics.hpp"
#include "qtraj/records.hpp"

using namespace qtraj;

namespace {

StateVector random_state(int dim, RngStream& rng) {
  StateVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(rng.normal(), rng.normal());
  return normalized_state(v);
}

}  // namespace

TEST_CASE("trae_pure basics") {
  StateVector e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  CHECK(trae_pure(e0, e0) == 0.0);
  CHECK(trae_pure(e0, e1) == 1.0);

  RngStream rng(1, 0);
  for (int t = 0; t < 100; ++t) {
    const StateVector a = random_state(3, rng), b = random_state(3, rng);
    const double d = trae_pure(a, b);
    const double trse = 2.0 * (1.0 - pure_overlap_sq(a, b));
    CHECK(2.0 * d * d == doctest::Approx(trse).epsilon(1e-12));
  }
}

TEST_CASE("trae_pure triangle inequality") {
  RngStream rng(2, 0);
  for (int t = 0; t < 200; ++t) {
    const StateVector a = random_state(4, rng), b = random_state(4, rng),
                      c = random_state(4, rng);
    CHECK(trae_pure(a, b) <= trae_pure(a, c) + trae_pure(c, b) + 1e-12);
  }
}

TEST_CASE("trae_mixed") {
  StateVector e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  const ComplexMatrix p0 = pure_projector(e0), p1 = pure_projector(e1);
  CHECK(trae_mixed(p0, p0) == 0.0);
  CHECK(trae_mixed(p0, p1) == doctest::Approx(1.0).epsilon(1e-12));

  RngStream rng(3, 0);
  for (int t = 0; t < 50; ++t) {
    const StateVector a = random_state(3, rng), b = random_state(3, rng);
    CHECK(trae_mixed(pure_projector(a), pure_projector(b)) ==
          doctest::Approx(trae_pure(a, b)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(trae_mixed(sigma_minus(), p0), std::invalid_argument);
}

TEST_CASE("ensemble_reduce") {
  SUBCASE("all zero") {
    const ErrorSummary s = ensemble_reduce({0, 0, 0}, {0, 0, 0}, 0);
    CHECK(s.mtrse == 0.0);
    CHECK(s.mtrae == 0.0);
  }
  SUBCASE("constant value") {
    const ErrorSummary s = ensemble_reduce({1e-3, 1e-3, 1e-3, 1e-3}, {2e-3, 2e-3, 2e-3, 2e-3}, 1);
    CHECK(s.mtrse == doctest::Approx(1e-3));
    CHECK(s.mtrae == doctest::Approx(2e-3));
    CHECK(s.aborted_count == 1);
    int total = 0, nonzero_bins = 0;
    for (int c : s.hist_counts) {
      total += c;
      nonzero_bins += c > 0;
    }
    CHECK(total == 4);
    CHECK(nonzero_bins == 1);  // degenerate histogram
    CHECK(s.hist_edges.size() == s.hist_counts.size() + 1);
  }
  SUBCASE("reordering invariance and edge clamping") {
    const std::vector<double> a{1e-8, 5e-4, 0.5, 3e-3};
    std::vector<double> b{3e-3, 1e-8, 5e-4, 0.5};
    const auto sa = ensemble_reduce(a, a, 0);
    const auto sb = ensemble_reduce(b, b, 0);
    CHECK(sa.mtrse == doctest::Approx(sb.mtrse).epsilon(1e-15));
    CHECK(sa.hist_counts == sb.hist_counts);
    CHECK(sa.hist_counts.front() >= 1);  // 1e-8 clamped into the lowest bin
    CHECK(sa.hist_counts.back() >= 1);   // 0.5 clamped into the highest bin
  }
  CHECK_THROWS_AS(ensemble_reduce({}, {}, 0), std::invalid_argument);
}

TEST_CASE("fit_scaling on synthetic power laws") {
  std::vector<std::pair<double, double>> pts;
  for (double dt : {1e-3, 1e-2, 1e-1, 1.0}) pts.push_back({dt, std::pow(dt, 1.5)});
  ScalingFit f = fit_scaling(pts);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  pts.clear();
  for (double dt : {1e-3, 1e-2, 1e-1}) pts.push_back({dt, 3.0 * dt * dt});
  f = fit_scaling(pts);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(fit_scaling({{1e-3, 1.0}, {1e-2, 0.0}, {1e-1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling({{1e-3, 1.0}, {1e-2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling({{1e-2, 1.0}, {1e-3, 1.0}, {1e-1, 1.0}}), std::invalid_argument);
}

TEST_CASE("appendix-style accumulation ratio") {
  CHECK(appendix_b_check(0.0, 100, 0.0) == 1.0);
  CHECK(appendix_b_check(3e-3, 100, 2e-2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(appendix_b_check(1.0, 0, 1.0), std::invalid_argument);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("run-level reductions") {
  // Two-bin synthetic run with the coarse chain equal to the true chain.
  TrajectoryRun run;
  StateVector e0(2), mid(2);
  e0 << 1, 0;
  mid << 1, 1;
  mid /= std::sqrt(2.0);
  run.true_states = {e0, mid, e0};
  run.coarse_states[MapKind::Ito] = run.true_states;
  run.records.resize(2);
  CHECK(time_avg_trse(run, MapKind::Ito) < 1e-12);
  CHECK(mean_trae(run, MapKind::Ito) < 1e-6);

  // Against an always-e0 chain: bins contribute TrSE {1, 0}.
  run.coarse_states[MapKind::Phi] = {e0, e0, e0};
  CHECK(time_avg_trse(run, MapKind::Phi) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mean_trae(run, MapKind::Phi) ==
        doctest::Approx(0.5 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(time_avg_trse(run, MapKind::Wonglakhon), std::invalid_argument);
}
