#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qecw/circuit.hpp"
#include "qecw/geometry.hpp"
#include "qecw/sampler.hpp"

namespace qecw {

struct Mechanism {
  double p = 0;
  std::vector<uint32_t> detectors;  // sorted, unique
  uint64_t observables = 0;         // bit mask, up to 64 observables
  // (instruction index, term index) pairs; loss hypotheses use term = 0xffff.
  std::vector<std::pair<uint32_t, uint16_t>> provenance;
};

struct DetectorErrorModel {
  size_t num_detectors = 0;
  size_t num_observables = 0;
  std::vector<Mechanism> mechanisms;

  // Merges mechanisms with identical signatures via p = p1 + p2 - 2 p1 p2,
  // drops identity signatures and p == 0, and enforces p < 0.5.
  void canonicalize();

  std::string to_text() const;  // error(p) D3 D7 L0
  static DetectorErrorModel from_text(const std::string& text);

  // Bernoulli-samples every mechanism and XORs signatures.
  void sample(uint64_t seed, size_t shot, std::vector<uint8_t>& detectors,
              std::vector<uint8_t>& observables) const;
};

// Propagates every Pauli term of every error instruction to its detector
// and observable signature. LOSS instructions are ignored here.
DetectorErrorModel build_dem(const Circuit& circuit);

// Detector-space rewrite produced by supercheck merging: groups of merged
// detectors, dropped detectors, and observable reroutes.
struct DetectorTransform {
  size_t num_detectors_in = 0;
  // For each input detector: index of its merge group, or -1 if dropped.
  std::vector<int> group_of;
  // Representative input detector per group (lowest index), for reporting.
  std::vector<uint32_t> representative;
  // Operator weight of each merged check product (for 4/w style weighting).
  std::vector<double> group_weight_scale;
  // Observable rewrites: per observable, a list of input detectors whose
  // records were XORed into it to route readout around lost qubits.
  std::vector<std::vector<uint32_t>> observable_patches;

  size_t num_groups() const { return representative.size(); }
  void apply(const std::vector<uint8_t>& det_in, std::vector<uint8_t>& det_out) const;
};

// Builds the supercheck transform for one shot's observed losses.
// `lost_data_qubits` are data qubits whose final readout returned LOST;
// `lost_ancilla_records` are LOST mid-circuit records.
DetectorTransform build_supercheck_transform(const Circuit& circuit, const Geometry& geometry,
                                             const std::vector<uint32_t>& lost_data_qubits,
                                             const std::vector<size_t>& lost_ancilla_records);

struct ConditionedDem {
  DetectorErrorModel dem;  // in the transformed detector space
  DetectorTransform transform;
};

// Per-shot loss conditioning: enumerates loss-origin hypotheses for each
// observed lost qubit, adds their propagated error patterns with
// rate-weighted priors, and merges invalidated checks into superchecks.
ConditionedDem condition_dem_on_loss(const DetectorErrorModel& dem, const Circuit& circuit,
                                     const Geometry& geometry, const ShotBatch& batch, size_t shot);

}  // namespace qecw
