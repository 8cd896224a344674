#include <doctest.h>

#include "qecw/circuit.hpp"

using namespace qecw;

TEST_CASE("parse and serialize round trip") {
  std::string text = R"(QUBITS 49
H 0 1 2
CZ 0 1
PAULI_ERROR2 p=0.003 0 1
LOSS p=0.005 7
M Z 5
DETECTOR rec[-1]
M X 6 7
OBSERVABLE 0 rec[-1] rec[-2] rec[-3]
TICK
PERMUTE 3:4 4:3
)";
  Circuit c = Circuit::from_text(text);
  CHECK(c.num_qubits() == 49);
  CHECK(c.num_measurements() == 3);
  CHECK(c.num_detectors() == 1);
  CHECK(c.num_observables() == 1);
  Circuit c2 = Circuit::from_text(c.to_text());
  CHECK(c == c2);
  CHECK(c.to_text() == c2.to_text());
}

TEST_CASE("unknown instruction reports line number") {
  CHECK_THROWS_WITH_AS(Circuit::from_text("QUBITS 2\nFROB 1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
}

TEST_CASE("record references must resolve") {
  CHECK_THROWS_AS(Circuit::from_text("QUBITS 2\nM Z 0\nDETECTOR rec[-2]\n"), std::invalid_argument);
}

TEST_CASE("permute must be a bijection") {
  Circuit c(4);
  CHECK_THROWS_AS(c.permute({{0, 1}}), std::invalid_argument);
  CHECK_NOTHROW(c.permute({{0, 1}, {1, 0}}));
}

TEST_CASE("targets validated") {
  Circuit c(2);
  CHECK_THROWS_AS(c.gate(Op::H, {5}), std::invalid_argument);
}

TEST_CASE("conjugation rules") {
  // H: X <-> Z
  PauliString p = PauliString::from_string("X");
  Instruction h;
  h.op = Op::H;
  h.targets = {0};
  Circuit::conjugate_pauli(p, h);
  CHECK(p == PauliString::from_string("Z"));

  // S X S^dag = Y
  p = PauliString::from_string("X");
  Instruction s;
  s.op = Op::S;
  s.targets = {0};
  Circuit::conjugate_pauli(p, s);
  CHECK(p == PauliString::from_string("Y"));

  // S Y S^dag = -X
  p = PauliString::from_string("Y");
  Circuit::conjugate_pauli(p, s);
  CHECK(p == PauliString::from_string("-X"));

  // CZ: X1 -> X1 Z2, and phase on XX -> YY
  p = PauliString::from_string("XI");
  Instruction cz;
  cz.op = Op::CZ;
  cz.targets = {0, 1};
  Circuit::conjugate_pauli(p, cz);
  CHECK(p == PauliString::from_string("XZ"));
  p = PauliString::from_string("XX");
  Circuit::conjugate_pauli(p, cz);
  CHECK(p == PauliString::from_string("YY"));

  // CNOT: X_c -> X_c X_t, Z_t -> Z_c Z_t
  p = PauliString::from_string("XI");
  Instruction cx;
  cx.op = Op::CNOT;
  cx.targets = {0, 1};
  Circuit::conjugate_pauli(p, cx);
  CHECK(p == PauliString::from_string("XX"));
  p = PauliString::from_string("IZ");
  Circuit::conjugate_pauli(p, cx);
  CHECK(p == PauliString::from_string("ZZ"));
}
