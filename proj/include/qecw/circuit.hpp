#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qecw/pauli.hpp"

namespace qecw {

enum class Op : uint8_t {
  H,
  S,
  S_DAG,
  T,
  T_DAG,
  X,
  Y,
  Z,
  RZ,           // arg = angle
  CZ,           // target pairs
  CNOT,         // (control, target) pairs
  MEASURE,      // basis X or Z, one record per target
  RESET,        // to |0>, clears loss flags
  PAULI_ERROR,  // probability table over Pauli terms on the target tuple
  LOSS,         // arg = probability, per target
  DETECTOR,     // record references
  OBSERVABLE,   // arg0 = observable index, record references
  TICK,
  PERMUTE,  // qubit relabeling, pairs (from, to)
};

// One Pauli term of an error channel: per-target Pauli letters and a
// probability. Letters are 'I','X','Y','Z'.
struct PauliTerm {
  std::string letters;
  double probability = 0;
};

struct Instruction {
  Op op;
  std::vector<uint32_t> targets;
  std::vector<int64_t> records;  // absolute measurement indices (DETECTOR/OBSERVABLE)
  std::vector<PauliTerm> terms;  // PAULI_ERROR
  double arg = 0;                // RZ angle, LOSS probability
  char basis = 'Z';              // MEASURE basis
  uint32_t index = 0;            // OBSERVABLE index

  bool is_unitary() const;
  bool is_two_qubit_gate() const { return op == Op::CZ || op == Op::CNOT; }
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(uint32_t n_qubits) : n_qubits_(n_qubits) {}

  uint32_t num_qubits() const { return n_qubits_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  size_t num_measurements() const { return num_measurements_; }
  size_t num_detectors() const { return num_detectors_; }
  size_t num_observables() const { return num_observables_; }

  void append(Instruction instr);

  // Convenience builders.
  void gate(Op op, std::initializer_list<uint32_t> targets);
  void gate(Op op, const std::vector<uint32_t>& targets);
  void rz(double angle, const std::vector<uint32_t>& targets);
  // Returns the absolute record index of the first target's measurement.
  size_t measure(char basis, const std::vector<uint32_t>& targets);
  void reset(const std::vector<uint32_t>& targets);
  void pauli_error1(double p, const std::vector<uint32_t>& targets);  // depolarizing
  void pauli_error2(double p, uint32_t a, uint32_t b);                // depolarizing
  void biased_error(char pauli, double p, const std::vector<uint32_t>& targets);
  void loss(double p, const std::vector<uint32_t>& targets);
  void detector(const std::vector<int64_t>& absolute_records);
  void observable(uint32_t idx, const std::vector<int64_t>& absolute_records);
  void tick();
  void permute(const std::vector<std::pair<uint32_t, uint32_t>>& mapping);

  // Text format, one instruction per line. Record references are
  // serialized relative (rec[-k]) and resolved to absolute on parse.
  std::string to_text() const;
  static Circuit from_text(const std::string& text);

  bool operator==(const Circuit& other) const;

  std::map<std::string, std::string> metadata;

  // Phase-exact conjugation P -> U P U^dag for Clifford instructions
  // (H, S, S_DAG, X, Y, Z, CZ, CNOT, PERMUTE). Throws on non-Clifford.
  static void conjugate_pauli(PauliString& p, const Instruction& ins);

 private:
  void validate_targets(const std::vector<uint32_t>& targets) const;

  uint32_t n_qubits_ = 0;
  std::vector<Instruction> instructions_;
  size_t num_measurements_ = 0;
  size_t num_detectors_ = 0;
  size_t num_observables_ = 0;
};

}  // namespace qecw
