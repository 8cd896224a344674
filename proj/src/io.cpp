#include "qecw/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qecw {

uint64_t content_hash(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string content_hash_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)content_hash(data));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string shot_records_csv(const ShotBatch& batch) {
  std::ostringstream out;
  out << "shot,measurement_index,value\n";
  for (size_t s = 0; s < batch.n_shots; ++s) {
    for (size_t r = 0; r < batch.n_records; ++r) {
      uint8_t v = batch.record(s, r);
      out << s << ',' << r << ',' << (v == kLost ? "L" : v ? "1" : "0") << '\n';
    }
  }
  return out.str();
}

std::string detector_events_csv(const std::vector<std::vector<uint8_t>>& events) {
  std::ostringstream out;
  out << "shot,events\n";
  for (size_t s = 0; s < events.size(); ++s) {
    out << s << ',';
    for (uint8_t b : events[s]) out << (b ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<uint8_t>> parse_detector_events_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<uint8_t>> out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("bad events line: " + line);
    std::vector<uint8_t> ev;
    for (size_t i = comma + 1; i < line.size(); ++i) {
      if (line[i] == '0')
        ev.push_back(0);
      else if (line[i] == '1')
        ev.push_back(1);
      else if (line[i] != '\r')
        throw std::invalid_argument("bad event bit in: " + line);
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::string decode_results_csv(const std::vector<DecodeResult>& results, size_t n_observables) {
  std::ostringstream out;
  out << "shot";
  for (size_t o = 0; o < n_observables; ++o) out << ",flip" << o;
  out << ",p0,p1,confidence,status\n";
  for (size_t s = 0; s < results.size(); ++s) {
    out << s;
    for (size_t o = 0; o < n_observables; ++o)
      out << ',' << ((results[s].observable_flips >> o) & 1);
    const char* status = results[s].status == DecodeStatus::OK        ? "OK"
                         : results[s].status == DecodeStatus::TIMEOUT ? "TIMEOUT"
                                                                      : "REJECTED";
    out << ',' << fmt_g(results[s].p0) << ',' << fmt_g(results[s].p1) << ','
        << fmt_g(results[s].confidence) << ',' << status << '\n';
  }
  return out.str();
}

std::string metadata_json(const std::map<std::string, std::string>& entries) {
  nlohmann::json j;
  for (auto& [k, v] : entries) j[k] = v;
  return j.dump(2) + "\n";
}

}  // namespace qecw
