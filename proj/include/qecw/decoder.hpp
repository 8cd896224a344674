#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qecw/code.hpp"
#include "qecw/dem.hpp"

namespace qecw {

enum class DecodeStatus : uint8_t { OK, REJECTED, TIMEOUT };

struct DecodeResult {
  uint64_t observable_flips = 0;  // predicted flip mask
  double p0 = 0;                  // probability of the most likely error set
  double p1 = 0;                  // most likely competitor with different flips
  double confidence = 1.0;        // p0 / (p0 + p1)
  DecodeStatus status = DecodeStatus::OK;
  std::vector<uint32_t> error_set;  // chosen mechanism indices, ascending
};

struct DecodeBudget {
  uint64_t max_nodes = 20'000'000;
  size_t beam = 0;  // 0 = exact; otherwise limits branch candidates per pivot
};

// Exact most-likely-error decoding on a detector error model. Finds the
// error subset E maximizing prod_{e in E} p_e prod_{e not in E} (1 - p_e)
// subject to the XOR of detector signatures matching the events, via branch
// and bound in log-odds weight, independently per connected component. Also
// finds the best competitor whose observable flips differ, giving the
// confidence p0/(p0+p1). Ties break to the lexicographically smallest
// mechanism index set. Exact while the node budget lasts; on exhaustion the
// best found so far is returned with status TIMEOUT.
class DemDecoder {
 public:
  explicit DemDecoder(const DetectorErrorModel& dem, const DecodeBudget& budget = {});
  ~DemDecoder();
  DemDecoder(DemDecoder&&) noexcept;
  DemDecoder& operator=(DemDecoder&&) noexcept;

  DecodeResult decode(const std::vector<uint8_t>& events) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around DemDecoder.
DecodeResult mle_decode(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                        const DecodeBudget& budget = {});

// Exhaustive oracle over all mechanism subsets (or subsets of size
// <= max_weight when a cap is given). Ground truth for mle_decode.
DecodeResult brute_force_decode(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                                size_t max_weight = 0);

// Minimum-weight coset-representative table decoding for small codes.
class LookupDecoder {
 public:
  explicit LookupDecoder(const StabilizerCode& code);
  // syndrome bit i = 1 when stabilizer i anticommutes with the error.
  PauliString decode(const std::vector<uint8_t>& syndrome) const;
  const StabilizerCode& code() const { return code_; }

 private:
  StabilizerCode code_;
  std::vector<uint64_t> corr_x_, corr_z_;
  std::vector<uint8_t> filled_;
};

struct PostselectResult {
  std::vector<size_t> accepted;  // shot indices, ascending
  double achieved_fraction = 0;
};

// Rejects shots with any fired detector.
PostselectResult postselect_error_detect(const std::vector<std::vector<uint8_t>>& detector_events);

// Keeps the top acceptance_fraction of shots by decoder confidence.
PostselectResult postselect_confidence(const std::vector<DecodeResult>& results,
                                       double acceptance_fraction);

// Batch decoding with syndrome deduplication and optional threading.
std::vector<DecodeResult> decode_batch(const DetectorErrorModel& dem,
                                       const std::vector<std::vector<uint8_t>>& events,
                                       const DecodeBudget& budget = {}, int threads = 1);

}  // namespace qecw
