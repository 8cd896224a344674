#pragma once

#include <cstdint>
#include <vector>

#include "qecw/circuit.hpp"

namespace qecw {

enum class LossGateSemantics {
  // Two-qubit gate with one lost partner: unitary off, error channel still
  // applied (restricted to surviving targets).
  ERROR_TO_SURVIVOR,
  // Gates touching a lost qubit are removed together with their error
  // channels.
  STRICT_REMOVAL,
};

struct SampleOptions {
  int threads = 1;
  LossGateSemantics loss_semantics = LossGateSemantics::ERROR_TO_SURVIVOR;
};

constexpr uint8_t kLost = 2;

struct LossEvent {
  uint32_t instruction;
  uint32_t qubit;
  auto operator<=>(const LossEvent&) const = default;
};

struct ShotBatch {
  size_t n_shots = 0;
  size_t n_records = 0;
  uint64_t master_seed = 0;
  std::vector<uint8_t> records;                  // [shot * n_records + r], 0/1/kLost
  std::vector<std::vector<LossEvent>> losses;    // ground-truth loss events per shot

  uint8_t record(size_t shot, size_t r) const { return records[shot * n_records + r]; }

  // Records that read LOST in a shot.
  std::vector<size_t> lost_records(size_t shot) const;
};

// Pauli-frame Monte Carlo with loss. One reference sample is computed per
// distinct loss pattern with a sign-tracked tableau; frames then propagate
// per shot. Deterministic in (circuit, n_shots, master_seed) regardless of
// thread count. Rejects non-Clifford gates.
ShotBatch sample_shots(const Circuit& circuit, size_t n_shots, uint64_t master_seed,
                       const SampleOptions& options = {});

// Independently flips listed (non-LOST) measurement bits with probability
// p_m. Used for software-injected ancilla measurement error.
ShotBatch inject_measurement_error(const ShotBatch& batch, double p_m, uint64_t seed,
                                   const std::vector<uint8_t>& record_is_flippable);

// Detector/observable parities with LOST counted as 0.
void compute_detector_bits(const Circuit& circuit, const ShotBatch& batch, size_t shot,
                           std::vector<uint8_t>& detectors, std::vector<uint8_t>& observables);

}  // namespace qecw
