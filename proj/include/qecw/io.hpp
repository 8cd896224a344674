#pragma once

#include <map>
#include <string>
#include <vector>

#include "qecw/decoder.hpp"
#include "qecw/sampler.hpp"

namespace qecw {

// FNV-1a content hash used to fingerprint circuits and configs in metadata.
uint64_t content_hash(const std::string& data);
std::string content_hash_hex(const std::string& data);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Shot records: header `shot,measurement_index,value`, value in {0,1,L}.
std::string shot_records_csv(const ShotBatch& batch);

// Detector events: header `shot,events` with a packed 0/1 string per shot.
std::string detector_events_csv(const std::vector<std::vector<uint8_t>>& events);
std::vector<std::vector<uint8_t>> parse_detector_events_csv(const std::string& text);

// Decode results: `shot,flip0..flipK,p0,p1,confidence,status`.
std::string decode_results_csv(const std::vector<DecodeResult>& results, size_t n_observables);

// Stable float formatting shared by every CSV writer.
std::string fmt_g(double v);

// Sidecar metadata (seeds, hashes, resolved options) as pretty JSON.
std::string metadata_json(const std::map<std::string, std::string>& entries);

}  // namespace qecw
