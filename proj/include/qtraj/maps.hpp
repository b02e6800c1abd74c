#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtraj/setup.hpp"

namespace qtraj {

enum class MapKind { Ito, RouchonRalph, Wonglakhon, RobinetTruncated, Phi };

std::optional<MapKind> parse_map_kind(const std::string& name);
std::string map_name(MapKind kind);
std::vector<MapKind> all_map_kinds();

/// One coarse bin of the homodyne record: the mean statistic I and the
/// linearly weighted statistic phi, both dimensionless with ostensible
/// distribution N(0,1). phi must stay 0 for every map except Phi.
struct BinnedRecord {
  double I = 0.0;
  double phi = 0.0;
  double t = 0.0;
  double dt_bin = 0.0;

  double Y() const { return I / std::sqrt(dt_bin); }
  double Z() const { return phi * dt_bin * std::sqrt(dt_bin) / (2.0 * std::sqrt(3.0)); }
};

/// Column of the term ledger: which maps share a given correction term.
enum class TermCell {
  AllMaps,
  RouchonAndUp,    // shared by R, W, robinet, Phi
  WonglakhonAndUp, // shared by W, robinet, Phi
  RobinetAndPhi,
  RobinetOnly,
  PhiOnly,
};

/// The individual ledger cell (kind-set, order) as a matrix, including its
/// dt power. Throws on a (cell, order) pair that has no entry.
ComplexMatrix table1_term(TermCell cell, double order, const BinnedRecord& rec,
                          const MeasurementSetup& setup);

/// The finite-dt measurement operator M_A(I) or M_Phi(I, phi). Non-Phi kinds
/// use the H = 0 convention; with include_hamiltonian they are premultiplied
/// by (1 - iH dt - H^2 dt^2/2), a convenience extension beyond the published
/// forms. Phi always carries H. Requires eta = 1 (pure-state maps) and
/// rec.phi = 0 for non-Phi kinds.
ComplexMatrix build_map(MapKind kind, const MeasurementSetup& setup, const BinnedRecord& rec,
                        bool include_hamiltonian = false);

double ostensible_density_I(double I);
double ostensible_density_phi(double phi);

/// Gauss-Hermite rule for the weight N(0,1); weights sum to 1.
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
Quadrature gauss_hermite_prob(int order);

/// Operator norm of int dI [dphi] M^dag M - 1 over the ostensible Gaussians.
/// Throws if doubling the quadrature order moves the answer by > 1%.
double completeness_residual(MapKind kind, const MeasurementSetup& setup, double dt,
                             int quad_order = 40);

/// Normalized M|psi> together with the weight <psi|M^dag M|psi>. Throws when
/// the weight underflows (numerically impossible record).
std::pair<StateVector, double> apply_pure_map(const ComplexMatrix& M, const StateVector& psi);

/// Lindbladian L rho = -i[H, rho] + D[c]rho + sum_k D[l_k]rho.
ComplexMatrix liouvillian(const MeasurementSetup& setup, const ComplexMatrix& rho);

/// Measurement backaction superoperator C rho = sqrt(eta)(c rho + rho c^dag).
ComplexMatrix backaction(const MeasurementSetup& setup, const ComplexMatrix& rho);

/// Conditional update through order dt^{3/2}:
///   rho + sqrt(dt) I C rho + dt (L + (I^2-1)/2 C^2) rho
///       + dt^{3/2}/2 (I {{LC}} + (I^3-3I)/3 C^3 - phi/sqrt(3) [[LC]]) rho,
/// renormalized by trace. Returns (rho', trace weight). Throws when rho'
/// develops an eigenvalue below -1e-8 (step size too large).
std::pair<ComplexMatrix, double> apply_superoperator_phi(const MeasurementSetup& setup,
                                                         const BinnedRecord& rec,
                                                         const ComplexMatrix& rho);

/// Leading correction missed by conditioning on I alone:
/// -(phi/(2 sqrt 3)) dt^{3/2} (LC - CL) rho. Traceless.
ComplexMatrix error_superoperator_faucet(const MeasurementSetup& setup, const BinnedRecord& rec,
                                         const ComplexMatrix& rho);

/// Record-averaged channel int dI dphi p(I)p(phi) M rho M^dag via quadrature
/// (no renormalization).
ComplexMatrix ostensible_average_channel(MapKind kind, const MeasurementSetup& setup, double dt,
                                         const ComplexMatrix& rho, int quad_order = 40);

/// Operator norm of the record-averaged Phi channel minus
/// rho + dt L rho + dt^2/2 L^2 rho, at the setup's initial state.
double lindblad_residual(const MeasurementSetup& setup, double dt, int quad_order = 40);

/// 1 - Tr[rho^2] of the Bayesian phi-average of the Phi-map state at fixed I,
/// starting from the setup's initial state.
double purity_deficit_phi(const MeasurementSetup& setup, double dt, double I,
                          int quad_order = 40);

}  // namespace qtraj
