#pragma once

#include <cstdint>
#include <vector>

#include "qecw/circuit.hpp"
#include "qecw/geometry.hpp"
#include "qecw/sampler.hpp"

namespace qecw {

enum class LossPolicy { BARE, DETECT_LOSS, SUPERCHECK, POSTSELECT };

// Per-shot detector values under a loss-handling policy. Detector slots are
// the circuit's declared detectors; under SUPERCHECK a merged product lands
// in the representative slot and the other members are invalidated.
struct DetectorArrays {
  size_t n_shots = 0;
  size_t n_detectors = 0;
  size_t n_observables = 0;
  std::vector<uint8_t> detector_bits;    // [shot * n_detectors + d]
  std::vector<uint8_t> detector_valid;   // same shape; 0 = excluded from stats
  std::vector<float> detector_weight;    // same shape; error contribution scale
  std::vector<uint8_t> observable_bits;  // [shot * n_observables + o]

  uint8_t det(size_t s, size_t d) const { return detector_bits[s * n_detectors + d]; }
  bool valid(size_t s, size_t d) const { return detector_valid[s * n_detectors + d]; }
};

// BARE counts LOST as 0 everywhere. DETECT_LOSS marks detectors containing a
// LOST record as non-erroneous by assignment. SUPERCHECK multiplies the
// checks around lost data qubits (requires geometry). POSTSELECT invalidates
// detectors involving any lost atom, readout or support.
DetectorArrays extract_detectors(const Circuit& circuit, const ShotBatch& batch, LossPolicy policy,
                                 const Geometry* geometry = nullptr);

}  // namespace qecw
