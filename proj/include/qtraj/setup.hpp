#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtraj/linalg.hpp"

namespace qtraj {

/// Physical scenario: monitored coupling c (units sqrt(rate)), Hamiltonian H
/// (units rate), measurement efficiency eta, extra unmonitored Lindblad
/// channels, initial pure state, and the reference rate gamma used for
/// reporting dimensionless gamma*dt.
struct MeasurementSetup {
  int dim = 0;
  ComplexMatrix c;
  ComplexMatrix H;
  double eta = 1.0;
  std::vector<ComplexMatrix> extra_lindblads;
  StateVector initial_state;
  double gamma = 1.0;

  void validate() const;
};

enum class ExampleId {
  QubitZ,             // c = sqrt(gamma/2) sigma_z
  QubitFluorescence,  // c = sqrt(gamma) sigma_-
  Spin1Lowering,      // c = sqrt(gamma) S_-
  Spin1Z,             // c = sqrt(gamma/2) S_z
  Spin32Lowering,     // c = sqrt(gamma) L_-
};

MeasurementSetup example_setup(ExampleId id, double gamma = 1.0);

std::optional<ExampleId> parse_example_id(const std::string& name);
std::string example_name(ExampleId id);
std::vector<ExampleId> all_examples();

/// True when dt * ||c||^2 is small enough for the finite-step maps to be
/// trustworthy; callers warn when it fails.
bool step_size_ok(const MeasurementSetup& setup, double dt);

}  // namespace qtraj
