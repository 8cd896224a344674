#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qecw/pauli.hpp"

namespace qecw {

struct StabilizerCode {
  size_t n = 0;
  size_t k = 0;
  size_t d = 0;
  std::vector<PauliString> stabilizers;  // n-k independent generators
  std::vector<PauliString> logical_x;    // k
  std::vector<PauliString> logical_z;    // k
  std::string label;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::pair<size_t, size_t>> commutation_failures;  // stabilizer index pairs
  std::vector<std::string> pairing_failures;
  bool independent = true;
  std::optional<size_t> distance_found;  // set when brute force ran
  std::string summary() const;
};

enum class PauliSector { ANY, X_ONLY, Z_ONLY };

// Checks stabilizer commutation, logical pairing, generator independence,
// and (for n <= 20) brute-force distance against the declared d.
ValidationReport validate_code(const StabilizerCode& code);

// Minimum weight of a normalizer element outside the stabilizer group,
// searched over weights 1..max_weight. Returns nullopt when the search
// exceeds max_weight. Requires n <= 24.
std::optional<size_t> code_distance_bruteforce(const StabilizerCode& code, size_t max_weight,
                                               PauliSector sector = PauliSector::ANY);

// GF(2) span membership of the symplectic vector of p (phases ignored).
bool in_pauli_span(const std::vector<PauliString>& generators, const PauliString& p);

// Finds some Pauli with the prescribed commutation pattern against ops
// (true = anticommute). Returns nullopt when the system is inconsistent.
std::optional<PauliString> solve_commutation(const std::vector<PauliString>& ops,
                                             const std::vector<bool>& anticommute, size_t n);

}  // namespace qecw
