#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qtraj {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr int kMaxDim = 8;

inline void check_dim(Eigen::Index d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("matrix dimension must be in [1, 8]");
}

inline void check_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("dimension mismatch");
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
Complex trace_of(const ComplexMatrix& a);

/// Eigenvalues of a Hermitian matrix, ascending. Rejects inputs whose
/// anti-Hermitian part exceeds 1e-10 in max norm.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

/// Max |eigenvalue| of a Hermitian matrix (the operator norm for Hermitian residuals).
double hermitian_operator_norm(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10);

/// Clamps tiny negative rounding residue (>= -1e-12) to zero before sqrt-like uses.
inline double clamp_nonneg(double x) {
  if (x < 0.0 && x >= -1e-12) return 0.0;
  return x;
}

StateVector normalized_state(const StateVector& v);

/// |<a|b>|^2, clamped into [0, 1].
double pure_overlap_sq(const StateVector& a, const StateVector& b);

/// Projector |psi><psi|.
ComplexMatrix pure_projector(const StateVector& psi);

// Fixed operators used by the benchmark setups.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix sigma_minus();
ComplexMatrix spin1_z();
ComplexMatrix spin1_minus();
ComplexMatrix spin32_minus();

}  // namespace qtraj
