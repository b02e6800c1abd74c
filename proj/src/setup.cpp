#include "qtraj/setup.hpp"

#include <cmath>

namespace qtraj {

void MeasurementSetup::validate() const {
  check_dim(dim);
  if (c.rows() != dim || c.cols() != dim) throw std::invalid_argument("c has wrong dimension");
  if (H.rows() != dim || H.cols() != dim) throw std::invalid_argument("H has wrong dimension");
  if (!is_hermitian(H, 1e-12)) throw std::invalid_argument("H must be Hermitian");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (initial_state.size() != dim) throw std::invalid_argument("initial state has wrong dimension");
  if (std::abs(initial_state.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("initial state must be normalized");
  for (const auto& l : extra_lindblads)
    if (l.rows() != dim || l.cols() != dim)
      throw std::invalid_argument("extra Lindblad operator has wrong dimension");
}

MeasurementSetup example_setup(ExampleId id, double gamma) {
  MeasurementSetup s;
  s.gamma = gamma;
  const double rg = std::sqrt(gamma);
  const double rg2 = std::sqrt(gamma / 2.0);
  switch (id) {
    case ExampleId::QubitZ:
      s.dim = 2;
      s.c = rg2 * pauli_z();
      break;
    case ExampleId::QubitFluorescence:
      s.dim = 2;
      s.c = rg * sigma_minus();
      break;
    case ExampleId::Spin1Lowering:
      s.dim = 3;
      s.c = rg * spin1_minus();
      break;
    case ExampleId::Spin1Z:
      s.dim = 3;
      s.c = rg2 * spin1_z();
      break;
    case ExampleId::Spin32Lowering:
      s.dim = 4;
      s.c = rg * spin32_minus();
      break;
  }
  s.H = ComplexMatrix::Zero(s.dim, s.dim);
  StateVector psi(s.dim);
  if (s.dim == 2) {
    psi << 1, 1;
    psi /= std::sqrt(2.0);
  } else if (s.dim == 3) {
    psi << 1, std::sqrt(2.0), 1;
    psi /= 2.0;
  } else {
    psi << 1, std::sqrt(3.0), std::sqrt(3.0), 1;
    psi /= std::sqrt(8.0);
  }
  s.initial_state = psi;
  s.validate();
  return s;
}

std::optional<ExampleId> parse_example_id(const std::string& name) {
  if (name == "qubit-z") return ExampleId::QubitZ;
  if (name == "qubit-fluorescence") return ExampleId::QubitFluorescence;
  if (name == "spin1-lowering") return ExampleId::Spin1Lowering;
  if (name == "spin1-z") return ExampleId::Spin1Z;
  if (name == "spin32-lowering") return ExampleId::Spin32Lowering;
  return std::nullopt;
}

std::string example_name(ExampleId id) {
  switch (id) {
    case ExampleId::QubitZ: return "qubit-z";
    case ExampleId::QubitFluorescence: return "qubit-fluorescence";
    case ExampleId::Spin1Lowering: return "spin1-lowering";
    case ExampleId::Spin1Z: return "spin1-z";
    case ExampleId::Spin32Lowering: return "spin32-lowering";
  }
  return "?";
}

std::vector<ExampleId> all_examples() {
  return {ExampleId::QubitZ, ExampleId::QubitFluorescence, ExampleId::Spin1Lowering,
          ExampleId::Spin1Z, ExampleId::Spin32Lowering};
}

bool step_size_ok(const MeasurementSetup& setup, double dt) {
  double cnorm = setup.c.operatorNorm();
  return dt * cnorm * cnorm <= 1.0;
}

}  // namespace qtraj
