#include "qecw/detectors.hpp"

#include <set>
#include <stdexcept>

#include "qecw/dem.hpp"

namespace qecw {

DetectorArrays extract_detectors(const Circuit& circuit, const ShotBatch& batch, LossPolicy policy,
                                 const Geometry* geometry) {
  if (policy == LossPolicy::SUPERCHECK && geometry == nullptr)
    throw std::invalid_argument("SUPERCHECK policy needs code geometry metadata");

  DetectorArrays out;
  out.n_shots = batch.n_shots;
  out.n_detectors = circuit.num_detectors();
  out.n_observables = circuit.num_observables();
  out.detector_bits.assign(out.n_shots * out.n_detectors, 0);
  out.detector_valid.assign(out.n_shots * out.n_detectors, 1);
  out.detector_weight.assign(out.n_shots * out.n_detectors, 1.0f);
  out.observable_bits.assign(out.n_shots * out.n_observables, 0);

  // Record -> detector membership, and per-detector record lists.
  std::vector<std::vector<int64_t>> records_of_detector;
  for (const auto& ins : circuit.instructions())
    if (ins.op == Op::DETECTOR) records_of_detector.push_back(ins.records);

  std::vector<uint8_t> dets, obs;
  for (size_t shot = 0; shot < batch.n_shots; ++shot) {
    compute_detector_bits(circuit, batch, shot, dets, obs);
    std::copy(dets.begin(), dets.end(), out.detector_bits.begin() + shot * out.n_detectors);
    std::copy(obs.begin(), obs.end(), out.observable_bits.begin() + shot * out.n_observables);
    if (policy == LossPolicy::BARE) continue;

    auto lost = batch.lost_records(shot);
    if (lost.empty()) continue;
    std::set<size_t> lost_set(lost.begin(), lost.end());

    if (policy == LossPolicy::DETECT_LOSS) {
      for (size_t d = 0; d < out.n_detectors; ++d)
        for (int64_t r : records_of_detector[d])
          if (lost_set.count(size_t(r))) out.detector_valid[shot * out.n_detectors + d] = 0;
      continue;
    }

    if (policy == LossPolicy::POSTSELECT) {
      // An atom of the detector is lost when its readout is LOST or any
      // support data qubit's final readout is LOST.
      std::set<uint32_t> lost_data;
      if (geometry) {
        for (size_t r : lost)
          if (geometry->record_roles.at(r).kind == RecordRole::DATA)
            lost_data.insert(uint32_t(geometry->record_roles.at(r).qubit));
      }
      for (size_t d = 0; d < out.n_detectors; ++d) {
        bool invalid = false;
        for (int64_t r : records_of_detector[d])
          if (lost_set.count(size_t(r))) invalid = true;
        if (geometry && !invalid) {
          int check = geometry->detectors[d].check;
          if (check >= 0)
            for (uint32_t q : geometry->checks[check].data)
              if (lost_data.count(q)) invalid = true;
        }
        if (invalid) out.detector_valid[shot * out.n_detectors + d] = 0;
      }
      continue;
    }

    // SUPERCHECK
    std::vector<uint32_t> lost_data;
    std::vector<size_t> lost_other;
    for (size_t r : lost) {
      const auto& role = geometry->record_roles.at(r);
      if (role.kind == RecordRole::DATA)
        lost_data.push_back(uint32_t(role.qubit));
      else
        lost_other.push_back(r);
    }
    DetectorTransform tr = build_supercheck_transform(circuit, *geometry, lost_data, lost_other);
    std::vector<uint8_t> merged;
    tr.apply(dets, merged);
    for (size_t d = 0; d < out.n_detectors; ++d) {
      out.detector_valid[shot * out.n_detectors + d] = 0;
      out.detector_bits[shot * out.n_detectors + d] = 0;
    }
    for (size_t g = 0; g < tr.num_groups(); ++g) {
      uint32_t slot = tr.representative[g];
      out.detector_bits[shot * out.n_detectors + slot] = merged[g];
      out.detector_valid[shot * out.n_detectors + slot] = 1;
      out.detector_weight[shot * out.n_detectors + slot] = float(tr.group_weight_scale[g]);
    }
  }
  return out;
}

}  // namespace qecw
