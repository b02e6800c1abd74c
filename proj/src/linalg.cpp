#include "qtraj/linalg.hpp"

#include <algorithm>

namespace qtraj {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_dim(a, b);
  return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_dim(a, b);
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  check_same_dim(a, b);
  return a * b + b * a;
}

Complex trace_of(const ComplexMatrix& a) { return a.trace(); }

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  check_dim(a.rows());
  if (!is_hermitian(a)) throw std::invalid_argument("hermitian_eigenvalues: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  return {ev.data(), ev.data() + ev.size()};
}

double hermitian_operator_norm(const ComplexMatrix& a) {
  auto ev = hermitian_eigenvalues(a);
  double m = 0.0;
  for (double v : ev) m = std::max(m, std::abs(v));
  return m;
}

StateVector normalized_state(const StateVector& v) {
  double n = v.norm();
  if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero vector");
  return v / n;
}

double pure_overlap_sq(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double o = std::norm(a.dot(b));
  return std::min(1.0, clamp_nonneg(o));
}

ComplexMatrix pure_projector(const StateVector& psi) { return psi * psi.adjoint(); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  const Complex i(0, 1);
  ComplexMatrix m(2, 2);
  m << 0, -i, i, 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}

ComplexMatrix spin1_z() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 1;
  m(2, 2) = -1;
  return m;
}

ComplexMatrix spin1_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(1, 0) = 1;
  m(2, 1) = 1;
  return m;
}

ComplexMatrix spin32_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(1, 0) = std::sqrt(3.0);
  m(2, 1) = 2.0;
  m(3, 2) = std::sqrt(3.0);
  return m;
}

}  // namespace qtraj
