#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qecw {

// Signed n-qubit Pauli operator stored as P = i^phase * X^x * Z^z, with
// x, z packed bit masks and phase in Z_4. Y on a site is x=z=1 with an
// extra factor of i folded into the phase.
class PauliString {
 public:
  PauliString() : n_(0), phase_(0) {}
  explicit PauliString(size_t n) : n_(n), phase_(0), x_(words(n), 0), z_(words(n), 0) {}

  // Parse e.g. "+XIZ", "-iYY", "XZ". Characters: I X Y Z.
  static PauliString from_string(const std::string& s);

  static PauliString single(size_t n, size_t qubit, char p);

  size_t num_qubits() const { return n_; }
  uint8_t phase_exponent() const { return phase_; }  // power of i
  std::complex<double> phase() const;

  bool x_bit(size_t q) const { return (x_[q >> 6] >> (q & 63)) & 1; }
  bool z_bit(size_t q) const { return (z_[q >> 6] >> (q & 63)) & 1; }
  void set_x(size_t q, bool v);
  void set_z(size_t q, bool v);
  void set_phase_exponent(uint8_t e) { phase_ = e & 3; }

  const std::vector<uint64_t>& x_words() const { return x_; }
  const std::vector<uint64_t>& z_words() const { return z_; }

  size_t weight() const;
  bool is_identity() const;  // ignores phase

  bool commutes(const PauliString& other) const;

  // Group product with exact phase tracking.
  PauliString operator*(const PauliString& other) const;
  bool operator==(const PauliString& other) const;

  // Dense 2^n x 2^n matrix (column-major, little-endian qubit 0 fastest).
  // Only sensible for small n; used by tests.
  std::vector<std::complex<double>> to_dense() const;

  std::string str() const;

 private:
  static size_t words(size_t n) { return (n + 63) / 64; }

  size_t n_;
  uint8_t phase_;
  std::vector<uint64_t> x_, z_;
};

}  // namespace qecw
