#include <doctest.h>

#include "qecw/code.hpp"

using namespace qecw;

namespace {

StabilizerCode steane() {
  StabilizerCode code;
  code.n = 7;
  code.k = 1;
  code.d = 3;
  code.label = "steane";
  const char* stabs[] = {"XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ"};
  for (auto* s : stabs) code.stabilizers.push_back(PauliString::from_string(s));
  code.logical_x = {PauliString::from_string("XXXXXXX")};
  code.logical_z = {PauliString::from_string("ZZZZZZZ")};
  return code;
}

StabilizerCode repetition3() {
  StabilizerCode code;
  code.n = 3;
  code.k = 1;
  code.d = 1;  // Z distance 1
  code.label = "rep3";
  code.stabilizers = {PauliString::from_string("ZZI"), PauliString::from_string("IZZ")};
  code.logical_x = {PauliString::from_string("XXX")};
  code.logical_z = {PauliString::from_string("ZII")};
  return code;
}

}  // namespace

TEST_CASE("steane validates at distance 3") {
  auto report = validate_code(steane());
  CHECK(report.valid);
  REQUIRE(report.distance_found.has_value());
  CHECK(*report.distance_found == 3);
}

TEST_CASE("anticommuting stabilizers are caught") {
  auto code = steane();
  code.stabilizers[0] = PauliString::from_string("ZXXXIII");  // breaks commutation
  auto report = validate_code(code);
  CHECK(!report.valid);
  CHECK(!report.commutation_failures.empty());
}

TEST_CASE("repetition code sector distances") {
  auto code = repetition3();
  auto dx = code_distance_bruteforce(code, 3, PauliSector::X_ONLY);
  auto dz = code_distance_bruteforce(code, 3, PauliSector::Z_ONLY);
  REQUIRE(dx.has_value());
  REQUIRE(dz.has_value());
  CHECK(*dx == 3);
  CHECK(*dz == 1);
}

TEST_CASE("span membership") {
  auto code = steane();
  CHECK(in_pauli_span(code.stabilizers, code.stabilizers[0] * code.stabilizers[1]));
  CHECK(!in_pauli_span(code.stabilizers, code.logical_x[0]));
}

TEST_CASE("solve_commutation finds a partner") {
  auto code = steane();
  std::vector<PauliString> ops = code.stabilizers;
  ops.push_back(code.logical_z[0]);
  std::vector<bool> anti(ops.size(), false);
  anti.back() = true;
  auto partner = solve_commutation(ops, anti, 7);
  REQUIRE(partner.has_value());
  for (size_t i = 0; i < code.stabilizers.size(); ++i) CHECK(partner->commutes(code.stabilizers[i]));
  CHECK(!partner->commutes(code.logical_z[0]));
}
