#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qecw {

// Sidecar metadata emitted by circuit generators: which measurement record
// belongs to which check/round, check adjacency for superchecks, and qubit
// roles. Everything the loss policies need beyond the raw records.
struct CheckInfo {
  uint32_t ancilla = 0;
  char basis = 'Z';
  std::vector<uint32_t> data;  // data-qubit support
};

struct DetectorInfo {
  int check = -1;    // index into checks, -1 when not check-derived
  int round_a = -1;  // earlier compared round, -1 = preparation boundary
  int round_b = -1;  // later compared round, rounds count from 0; -2 = final data round
};

struct RecordRole {
  enum Kind : uint8_t { ANCILLA, DATA, OTHER };
  Kind kind = OTHER;
  int check = -1;
  int round = -1;
  int qubit = -1;
};

struct Geometry {
  std::vector<uint32_t> data_qubits;
  std::vector<CheckInfo> checks;
  std::vector<DetectorInfo> detectors;
  std::vector<RecordRole> record_roles;
  std::map<uint32_t, std::pair<double, double>> coords;
  int rounds = 0;

  std::string to_json() const;
  static Geometry from_json(const std::string& text);

  std::vector<int> checks_containing(uint32_t data_qubit, char basis) const;
};

}  // namespace qecw
