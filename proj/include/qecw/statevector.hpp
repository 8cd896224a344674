#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "qecw/circuit.hpp"
#include "qecw/pauli.hpp"

namespace qecw {

// Dense statevector on up to 20 qubits, little-endian (qubit 0 fastest).
// Measurements collapse trajectories; randomness comes from explicit
// uniform draws so callers control the stream.
class StateVector {
 public:
  explicit StateVector(size_t n);

  size_t num_qubits() const { return n_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }

  void apply_h(size_t q);
  void apply_s(size_t q, bool dagger = false);
  void apply_t(size_t q, bool dagger = false);
  void apply_rz(double angle, size_t q);
  void apply_x(size_t q);
  void apply_y(size_t q);
  void apply_z(size_t q);
  void apply_cz(size_t a, size_t b);
  void apply_cnot(size_t c, size_t t);
  void apply_unitary1(const Eigen::Matrix2cd& u, size_t q);
  void apply_pauli(const PauliString& p);
  void apply_permutation(const std::vector<std::pair<uint32_t, uint32_t>>& mapping);

  double norm() const { return amp_.norm(); }

  // <psi| P |psi>, exact.
  std::complex<double> expectation(const PauliString& p) const;

  // Projective measurement of a Hermitian Pauli; collapses. u in [0,1).
  // Returns outcome +1 -> 0, -1 -> 1.
  int measure_pauli(const PauliString& p, double u);
  int measure_qubit(size_t q, char basis, double u);
  void reset_qubit(size_t q, double u);

  // Measures in `basis` and removes the qubit from the register.
  int measure_and_remove(size_t q, char basis, double u);
  // Appends one |0> qubit at the top index.
  void append_qubit();

  // Reduced density matrix of the listed qubits.
  Eigen::MatrixXcd reduced_density(const std::vector<size_t>& region) const;

 private:
  size_t n_;
  Eigen::VectorXcd amp_;
};

// Base-2 von Neumann entropy of the region's reduced state.
double entanglement_entropy(const StateVector& state, const std::vector<size_t>& region);
double entropy_of_density(const Eigen::MatrixXcd& rho);

struct SimResult {
  StateVector state;
  std::vector<uint8_t> record;
};

// Trajectory simulation of a circuit (rejects LOSS).
SimResult simulate(const Circuit& circuit, uint64_t seed);

}  // namespace qecw
