#include "qtraj/maps.hpp"

#include <stdexcept>

namespace qtraj {

namespace {

const Complex kI(0.0, 1.0);
const double kSqrt3 = std::sqrt(3.0);

void require_pure_map_preconditions(MapKind kind, const MeasurementSetup& setup,
                                    const BinnedRecord& rec) {
  setup.validate();
  if (rec.dt_bin <= 0.0) throw std::invalid_argument("dt_bin must be positive");
  if (setup.eta != 1.0)
    throw std::invalid_argument("pure-state maps require unit efficiency; use the superoperator");
  if (kind != MapKind::Phi && rec.phi != 0.0)
    throw std::invalid_argument("phi must be 0 for every map kind except Phi");
}

}  // namespace

std::optional<MapKind> parse_map_kind(const std::string& name) {
  if (name == "ito") return MapKind::Ito;
  if (name == "rouchon-ralph") return MapKind::RouchonRalph;
  if (name == "wonglakhon") return MapKind::Wonglakhon;
  if (name == "robinet") return MapKind::RobinetTruncated;
  if (name == "phi") return MapKind::Phi;
  return std::nullopt;
}

std::string map_name(MapKind kind) {
  switch (kind) {
    case MapKind::Ito: return "ito";
    case MapKind::RouchonRalph: return "rouchon-ralph";
    case MapKind::Wonglakhon: return "wonglakhon";
    case MapKind::RobinetTruncated: return "robinet";
    case MapKind::Phi: return "phi";
  }
  return "?";
}

std::vector<MapKind> all_map_kinds() {
  return {MapKind::Ito, MapKind::RouchonRalph, MapKind::Wonglakhon, MapKind::RobinetTruncated,
          MapKind::Phi};
}

ComplexMatrix table1_term(TermCell cell, double order, const BinnedRecord& rec,
                          const MeasurementSetup& setup) {
  const ComplexMatrix& c = setup.c;
  const int d = setup.dim;
  const double dt = rec.dt_bin;
  const double I = rec.I;
  const ComplexMatrix cdc = c.adjoint() * c;

  auto unknown = [&]() -> ComplexMatrix {
    throw std::invalid_argument("table1_term: no entry at this (cell, order)");
  };

  switch (cell) {
    case TermCell::AllMaps:
      if (order == 0.0) return ComplexMatrix::Identity(d, d);
      if (order == 0.5) return I * std::sqrt(dt) * c;
      if (order == 1.0) return -0.5 * dt * cdc;
      return unknown();
    case TermCell::RouchonAndUp:
      if (order == 1.0) return 0.5 * dt * (I * I - 1.0) * (c * c).eval();
      return unknown();
    case TermCell::WonglakhonAndUp:
      if (order == 1.5) return -0.25 * I * dt * std::sqrt(dt) * anticommutator(c, cdc);
      if (order == 2.0) return 0.125 * dt * dt * (cdc * cdc).eval();
      return unknown();
    case TermCell::RobinetAndPhi:
      if (order == 1.5)
        return (1.0 / 6.0) * (I * I * I - 3.0 * I) * dt * std::sqrt(dt) * (c * c * c).eval();
      return unknown();
    case TermCell::RobinetOnly:
      if (order == 2.0) {
        const ComplexMatrix c2 = c * c;
        const ComplexMatrix c3 = c2 * c;
        const double i2 = I * I;
        ComplexMatrix term =
            (dt * dt / 24.0) * (i2 * i2 - 6.0 * i2 + 3.0) * (c2 * c2).eval();
        term -= (dt * dt / 12.0) * (i2 - 1.0) *
                (c.adjoint() * c3 + c * c.adjoint() * c2 + c2 * c.adjoint() * c).eval();
        return term;
      }
      return unknown();
    case TermCell::PhiOnly:
      if (order == 1.5)
        return -(rec.phi / (4.0 * kSqrt3)) * dt * std::sqrt(dt) * commutator(c, cdc);
      return unknown();
  }
  return unknown();
}

ComplexMatrix build_map(MapKind kind, const MeasurementSetup& setup, const BinnedRecord& rec,
                        bool include_hamiltonian) {
  require_pure_map_preconditions(kind, setup, rec);

  const ComplexMatrix& c = setup.c;
  const ComplexMatrix& H = setup.H;
  const int d = setup.dim;
  const double dt = rec.dt_bin;
  const double rdt = std::sqrt(dt);
  const double I = rec.I;
  const ComplexMatrix cdc = c.adjoint() * c;

  ComplexMatrix M = ComplexMatrix::Identity(d, d) + I * rdt * c - 0.5 * dt * cdc;
  if (kind == MapKind::Ito) {
    // nothing further
  } else {
    M += 0.5 * dt * (I * I - 1.0) * (c * c);
  }
  if (kind == MapKind::Wonglakhon || kind == MapKind::RobinetTruncated || kind == MapKind::Phi) {
    M += -0.25 * I * dt * rdt * anticommutator(c, cdc) + 0.125 * dt * dt * cdc * cdc;
  }
  if (kind == MapKind::RobinetTruncated || kind == MapKind::Phi) {
    M += (1.0 / 6.0) * (I * I * I - 3.0 * I) * dt * rdt * (c * c * c);
  }
  if (kind == MapKind::RobinetTruncated) {
    const ComplexMatrix c2 = c * c;
    const ComplexMatrix c3 = c2 * c;
    const double i2 = I * I;
    M += (dt * dt / 24.0) * (i2 * i2 - 6.0 * i2 + 3.0) * c2 * c2;
    M -= (dt * dt / 12.0) * (i2 - 1.0) *
         (c.adjoint() * c3 + c * c.adjoint() * c2 + c2 * c.adjoint() * c);
  }
  if (kind == MapKind::Phi) {
    M += -(rec.phi / (4.0 * kSqrt3)) * dt * rdt * commutator(c, cdc);
    // Hamiltonian terms carried by the Phi map itself.
    M += -0.5 * dt * kI * H;
    M += -0.5 * dt * rdt *
         (I * anticommutator(c, kI * H) + (rec.phi / kSqrt3) * commutator(c, kI * H));
    M += -0.5 * dt * dt * H * H;
  } else if (include_hamiltonian) {
    ComplexMatrix U = ComplexMatrix::Identity(d, d) - kI * dt * H - 0.5 * dt * dt * H * H;
    M = U * M;
  }
  return M;
}

double ostensible_density_I(double I) {
  return std::exp(-0.5 * I * I) / std::sqrt(2.0 * M_PI);
}

double ostensible_density_phi(double phi) { return ostensible_density_I(phi); }

Quadrature gauss_hermite_prob(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  // Golub-Welsch for the monic Hermite recurrence with weight N(0,1):
  // Jacobi matrix is zero on the diagonal with off-diagonal sqrt(k).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Quadrature q;
  q.nodes = es.eigenvalues();
  q.weights = es.eigenvectors().row(0).array().square();
  return q;
}

namespace {

// int dI [dphi] M^dag M - 1 at a given quadrature order.
ComplexMatrix completeness_residual_matrix(MapKind kind, const MeasurementSetup& setup, double dt,
                                           int quad_order) {
  const Quadrature q = gauss_hermite_prob(quad_order);
  const int d = setup.dim;
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  if (kind == MapKind::Phi) {
    for (int i = 0; i < quad_order; ++i)
      for (int j = 0; j < quad_order; ++j) {
        BinnedRecord rec{q.nodes[i], q.nodes[j], 0.0, dt};
        ComplexMatrix M = build_map(kind, setup, rec);
        acc += q.weights[i] * q.weights[j] * (M.adjoint() * M);
      }
  } else {
    for (int i = 0; i < quad_order; ++i) {
      BinnedRecord rec{q.nodes[i], 0.0, 0.0, dt};
      ComplexMatrix M = build_map(kind, setup, rec);
      acc += q.weights[i] * (M.adjoint() * M);
    }
  }
  return acc - ComplexMatrix::Identity(d, d);
}

}  // namespace

double completeness_residual(MapKind kind, const MeasurementSetup& setup, double dt,
                             int quad_order) {
  if (quad_order < 20) throw std::invalid_argument("quadrature order must be >= 20");
  const double r1 =
      hermitian_operator_norm(completeness_residual_matrix(kind, setup, dt, quad_order));
  const double r2 =
      hermitian_operator_norm(completeness_residual_matrix(kind, setup, dt, 2 * quad_order));
  if (std::abs(r1 - r2) > 0.01 * std::max(std::abs(r2), 1e-12))
    throw std::runtime_error("completeness_residual: quadrature under-resolved");
  return r2;
}

std::pair<StateVector, double> apply_pure_map(const ComplexMatrix& M, const StateVector& psi) {
  if (M.cols() != psi.size()) throw std::invalid_argument("dimension mismatch");
  StateVector out = M * psi;
  const double w = out.squaredNorm();
  if (w < 1e-30)
    throw std::runtime_error("apply_pure_map: record annihilates the state (weight underflow)");
  return {out / std::sqrt(w), w};
}

ComplexMatrix liouvillian(const MeasurementSetup& setup, const ComplexMatrix& rho) {
  const ComplexMatrix& c = setup.c;
  ComplexMatrix out = -kI * commutator(setup.H, rho);
  out += c * rho * c.adjoint() - 0.5 * anticommutator((c.adjoint() * c).eval(), rho);
  for (const auto& l : setup.extra_lindblads)
    out += l * rho * l.adjoint() - 0.5 * anticommutator((l.adjoint() * l).eval(), rho);
  return out;
}

ComplexMatrix backaction(const MeasurementSetup& setup, const ComplexMatrix& rho) {
  const double re = std::sqrt(setup.eta);
  return re * (setup.c * rho + rho * setup.c.adjoint());
}

std::pair<ComplexMatrix, double> apply_superoperator_phi(const MeasurementSetup& setup,
                                                         const BinnedRecord& rec,
                                                         const ComplexMatrix& rho) {
  setup.validate();
  if (rec.dt_bin <= 0.0) throw std::invalid_argument("dt_bin must be positive");
  const double dt = rec.dt_bin;
  const double rdt = std::sqrt(dt);
  const double I = rec.I;

  const ComplexMatrix Crho = backaction(setup, rho);
  const ComplexMatrix C2rho = backaction(setup, Crho);
  const ComplexMatrix C3rho = backaction(setup, C2rho);
  const ComplexMatrix Lrho = liouvillian(setup, rho);
  const ComplexMatrix LCrho = liouvillian(setup, Crho);
  const ComplexMatrix CLrho = backaction(setup, Lrho);

  ComplexMatrix out = rho + rdt * I * Crho + dt * (Lrho + 0.5 * (I * I - 1.0) * C2rho);
  out += 0.5 * dt * rdt *
         (I * (LCrho + CLrho) + ((I * I * I - 3.0 * I) / 3.0) * C3rho -
          (rec.phi / kSqrt3) * (LCrho - CLrho));

  const double w = out.trace().real();
  if (w < 1e-30) throw std::runtime_error("apply_superoperator_phi: weight underflow");
  out /= w;
  // Symmetrize away rounding before the positivity check.
  ComplexMatrix herm = 0.5 * (out + out.adjoint());
  const auto ev = hermitian_eigenvalues(herm);
  if (ev.front() < -1e-8)
    throw std::runtime_error("apply_superoperator_phi: state left the positive cone; dt too large");
  return {herm, w};
}

ComplexMatrix error_superoperator_faucet(const MeasurementSetup& setup, const BinnedRecord& rec,
                                         const ComplexMatrix& rho) {
  const double dt = rec.dt_bin;
  const ComplexMatrix LCrho = liouvillian(setup, backaction(setup, rho));
  const ComplexMatrix CLrho = backaction(setup, liouvillian(setup, rho));
  ComplexMatrix err = -(rec.phi / (2.0 * kSqrt3)) * dt * std::sqrt(dt) * (LCrho - CLrho);
  // The trace part only renormalizes the record weight; the state correction
  // is the traceless projection.
  err -= err.trace() * rho;
  return err;
}

ComplexMatrix ostensible_average_channel(MapKind kind, const MeasurementSetup& setup, double dt,
                                         const ComplexMatrix& rho, int quad_order) {
  const Quadrature q = gauss_hermite_prob(quad_order);
  const int d = setup.dim;
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  if (kind == MapKind::Phi) {
    for (int i = 0; i < quad_order; ++i)
      for (int j = 0; j < quad_order; ++j) {
        BinnedRecord rec{q.nodes[i], q.nodes[j], 0.0, dt};
        ComplexMatrix M = build_map(kind, setup, rec);
        acc += q.weights[i] * q.weights[j] * (M * rho * M.adjoint());
      }
  } else {
    for (int i = 0; i < quad_order; ++i) {
      BinnedRecord rec{q.nodes[i], 0.0, 0.0, dt};
      ComplexMatrix M = build_map(kind, setup, rec);
      acc += q.weights[i] * (M * rho * M.adjoint());
    }
  }
  return acc;
}

double lindblad_residual(const MeasurementSetup& setup, double dt, int quad_order) {
  const ComplexMatrix rho = pure_projector(setup.initial_state);
  const ComplexMatrix avg = ostensible_average_channel(MapKind::Phi, setup, dt, rho, quad_order);
  const ComplexMatrix Lrho = liouvillian(setup, rho);
  const ComplexMatrix target = rho + dt * Lrho + 0.5 * dt * dt * liouvillian(setup, Lrho);
  return hermitian_operator_norm(avg - target);
}

double purity_deficit_phi(const MeasurementSetup& setup, double dt, double I, int quad_order) {
  const Quadrature q = gauss_hermite_prob(quad_order);
  const int d = setup.dim;
  ComplexMatrix mix = ComplexMatrix::Zero(d, d);
  double total = 0.0;
  for (int j = 0; j < quad_order; ++j) {
    BinnedRecord rec{I, q.nodes[j], 0.0, dt};
    ComplexMatrix M = build_map(MapKind::Phi, setup, rec);
    auto [psi, w] = apply_pure_map(M, setup.initial_state);
    const double p = q.weights[j] * w;  // Bayesian weight of this phi at fixed I
    mix += p * pure_projector(psi);
    total += p;
  }
  mix /= total;
  return 1.0 - (mix * mix).trace().real();
}

}  // namespace qtraj
