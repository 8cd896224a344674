#pragma once

#include <cstdint>
#include <vector>

namespace qecw {

// Sign-tracked stabilizer tableau (destabilizer/stabilizer form), bit-sliced
// by qubit so gates are O(rows/64). Used by the sampler to compute one
// reference sample per loss pattern; not a general-purpose state simulator.
class Tableau {
 public:
  explicit Tableau(size_t n);

  size_t num_qubits() const { return n_; }

  void h(size_t q);
  void s(size_t q);
  void s_dag(size_t q);
  void x(size_t q);
  void y(size_t q);
  void z(size_t q);
  void cnot(size_t c, size_t t);
  void cz(size_t a, size_t b);
  void swap_labels(size_t a, size_t b);
  // Relabeling: qubit `from` becomes `to` for every (from, to) pair.
  void apply_permutation(const std::vector<std::pair<size_t, size_t>>& mapping);

  struct MeasureResult {
    bool outcome;
    bool was_random;
  };

  // Z-basis measurement. Random outcomes take `forced` when >= 0, else 0.
  MeasureResult measure_z(size_t q, int forced = -1);
  MeasureResult measure_x(size_t q, int forced = -1);
  void reset_z(size_t q);  // project to |0>

 private:
  bool bitr(size_t row) const { return (r_[row >> 6] >> (row & 63)) & 1; }
  void set_bitr(size_t row, bool v);
  bool bitx(size_t q, size_t row) const { return (x_[q * rw_ + (row >> 6)] >> (row & 63)) & 1; }
  bool bitz(size_t q, size_t row) const { return (z_[q * rw_ + (row >> 6)] >> (row & 63)) & 1; }
  void mult_row(size_t dst, size_t src);  // row_dst := row_src * row_dst
  void clear_row(size_t row);
  void copy_row(size_t dst, size_t src);

  size_t n_;
  size_t rw_;                   // words per row-mask
  std::vector<uint64_t> x_, z_; // [q * rw_ + w], bit per row; rows 0..n-1 destab, n..2n-1 stab, 2n scratch
  std::vector<uint64_t> r_;     // sign bit per row
};

}  // namespace qecw
