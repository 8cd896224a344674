#pragma once

#include <string>

#include "qecw/circuit.hpp"

namespace qecw {

enum class IdleScope {
  ALL_SEGMENTS,    // idle error in every TICK segment the qubit sits out
  RESET_SEGMENTS,  // idle error only in segments containing a RESET
};

// Per-operation-class Pauli and loss rates. Pauli channels are uniform
// depolarizing of the matching arity; measurement Pauli error is a
// pre-measurement flip in the measured basis's conjugate.
struct NoiseModel {
  struct Rates {
    double pauli = 0;
    double loss = 0;
  };
  Rates single_qubit_gate;
  Rates two_qubit_gate;
  Rates idle_per_tick;
  Rates reset;
  Rates measure;
  Rates move;  // applied to PERMUTE participants
  IdleScope idle_scope = IdleScope::ALL_SEGMENTS;
  std::string name = "custom";

  void validate() const;  // rates in [0,1], pauli+loss <= 1 per location

  static NoiseModel named(const std::string& name);  // "none", "theory-p006", "exp-like", "loss-heavy"
  static NoiseModel from_json_file(const std::string& path);
  std::string to_json() const;
};

// Rewrites a noiseless circuit with error/loss instructions inserted after
// gates and around resets/measurements according to the model. Idle noise
// is decided per TICK segment. DETECTOR/OBSERVABLE bookkeeping is preserved.
Circuit apply_noise(const Circuit& circuit, const NoiseModel& model);

}  // namespace qecw
