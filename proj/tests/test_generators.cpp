#include <doctest.h>

#include "qecw/detectors.hpp"
#include "qecw/generators.hpp"
#include "qecw/sampler.hpp"
#include "qecw/statevector.hpp"

using namespace qecw;

namespace {

void expect_noiseless_silence(const Circuit& c, size_t shots = 200, uint64_t seed = 23) {
  auto batch = sample_shots(c, shots, seed);
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < shots; ++s) {
    compute_detector_bits(c, batch, s, dets, obs);
    for (size_t d = 0; d < dets.size(); ++d) {
      INFO("detector ", d, " shot ", s);
      REQUIRE(dets[d] == 0);
    }
  }
}

}  // namespace

TEST_CASE("hypercube codes validate with target parameters") {
  struct Want {
    HypercubeFamily family;
    size_t n, k, d;
  };
  for (auto want : {Want{HypercubeFamily::STEANE_7_1_3, 7, 1, 3},
                    Want{HypercubeFamily::REED_MULLER_15_1_3, 15, 1, 3},
                    Want{HypercubeFamily::CODE_16_6_4, 16, 6, 4}}) {
    for (char basis : {'Z', 'X'}) {
      auto gen = hypercube_encoder(want.family, default_puncture(want.family), basis);
      REQUIRE(gen.codes.size() == 1);
      const auto& code = gen.codes[0];
      CHECK(code.n == want.n);
      CHECK(code.k == want.k);
      CHECK(code.d == want.d);
      auto report = validate_code(code);
      INFO(code.label, " basis ", basis, ": ", report.summary());
      CHECK(report.valid);
    }
  }
}

TEST_CASE("hypercube encoder prepares eigenstates of the extracted code") {
  for (auto family : {HypercubeFamily::STEANE_7_1_3, HypercubeFamily::REED_MULLER_15_1_3,
                      HypercubeFamily::CODE_16_6_4}) {
    for (char basis : {'Z', 'X'}) {
      auto gen = hypercube_encoder(family, default_puncture(family), basis);
      auto sim = simulate(gen.circuit, 5);
      for (const auto& s : gen.codes[0].stabilizers) {
        auto e = sim.state.expectation(s);
        INFO(gen.codes[0].label, " basis ", basis, " stab ", s.str());
        CHECK(std::abs(e.real() - 1.0) < 1e-10);
        CHECK(std::abs(e.imag()) < 1e-10);
      }
      const auto& logical = basis == 'Z' ? gen.codes[0].logical_z : gen.codes[0].logical_x;
      for (const auto& l : logical) {
        auto e = sim.state.expectation(l);
        CHECK(std::abs(e.real() - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("steane top puncture also validates") {
  auto gen = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::TOP, 'Z');
  auto report = validate_code(gen.codes[0]);
  INFO(report.summary());
  CHECK(report.valid);
}

TEST_CASE("surface code memory codes validate") {
  for (auto variant : {SurfaceVariant::CSS, SurfaceVariant::XZZX}) {
    auto gen = surface_code_memory(3, 2, 'Z', CheckOrdering::N_Z_ZR_NR, variant);
    auto report = validate_code(gen.codes[0]);
    INFO(gen.codes[0].label, ": ", report.summary());
    CHECK(report.valid);
  }
}

TEST_CASE("xzzx variant detectors silent") {
  auto gen = surface_code_memory(3, 3, 'Z', CheckOrdering::N_Z_ZR_NR, SurfaceVariant::XZZX);
  expect_noiseless_silence(gen.circuit);
}

TEST_CASE("generated circuits round trip through text") {
  auto g1 = surface_code_memory(3, 2, 'X');
  CHECK(Circuit::from_text(g1.circuit.to_text()) == g1.circuit);
  auto g2 = transversal_cnot_bell(3, 3, 'X');
  CHECK(Circuit::from_text(g2.circuit.to_text()) == g2.circuit);
  auto g3 = lattice_surgery_zz(3, 2, 'Z');
  CHECK(Circuit::from_text(g3.circuit.to_text()) == g3.circuit);
  auto g4 = cluster_state_circuit(HypercubeFamily::STEANE_7_1_3, ClusterGeometry::ONE_D_TIME, 4);
  CHECK(Circuit::from_text(g4.circuit.to_text()) == g4.circuit);
}

TEST_CASE("transversal bell: noiseless parities are +1 for odd totals") {
  for (char basis : {'X', 'Z'}) {
    for (int n : {1, 3}) {
      auto gen = transversal_cnot_bell(3, n, basis);
      expect_noiseless_silence(gen.circuit);
      auto batch = sample_shots(gen.circuit, 300, 77);
      std::vector<uint8_t> dets, obs;
      for (size_t s = 0; s < batch.n_shots; ++s) {
        compute_detector_bits(gen.circuit, batch, s, dets, obs);
        INFO("basis ", basis, " N ", n);
        REQUIRE(obs[0] == 0);
      }
    }
  }
}

TEST_CASE("lattice surgery: seam and data readouts agree, random sign") {
  auto gen = lattice_surgery_zz(3, 2, 'Z');
  expect_noiseless_silence(gen.circuit);
  auto batch = sample_shots(gen.circuit, 2000, 31);
  std::vector<uint8_t> dets, obs;
  size_t plus = 0;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(gen.circuit, batch, s, dets, obs);
    REQUIRE(obs[0] == obs[1]);  // consistency
    REQUIRE(obs[2] == 0);
    plus += obs[0];
  }
  double frac = double(plus) / double(batch.n_shots);
  CHECK(frac > 0.4);
  CHECK(frac < 0.6);
}

TEST_CASE("lattice surgery: joint XX deterministic") {
  auto gen = lattice_surgery_zz(3, 2, 'X');
  expect_noiseless_silence(gen.circuit);
  auto batch = sample_shots(gen.circuit, 300, 37);
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(gen.circuit, batch, s, dets, obs);
    REQUIRE(obs[0] == 0);
  }
}

TEST_CASE("1D cluster: all logical cluster stabilizers +1") {
  for (auto gate : {ClusterGate::CZ, ClusterGate::CNOT}) {
    ClusterOptions opt;
    opt.gate = gate;
    auto gen = cluster_state_circuit(HypercubeFamily::STEANE_7_1_3, ClusterGeometry::ONE_D_TIME, 5, opt);
    auto batch = sample_shots(gen.circuit, 200, 13);
    std::vector<uint8_t> dets, obs;
    for (size_t s = 0; s < batch.n_shots; ++s) {
      compute_detector_bits(gen.circuit, batch, s, dets, obs);
      for (size_t o = 0; o < obs.size(); ++o) {
        INFO("gate ", gate == ClusterGate::CZ ? "CZ" : "CNOT", " obs ", o);
        REQUIRE(obs[o] == 0);
      }
    }
  }
}

TEST_CASE("2D cluster: logical cluster stabilizers +1") {
  ClusterOptions opt;
  opt.width = 3;
  auto gen = cluster_state_circuit(HypercubeFamily::STEANE_7_1_3, ClusterGeometry::TWO_D, 4, opt);
  auto batch = sample_shots(gen.circuit, 100, 19);
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(gen.circuit, batch, s, dets, obs);
    for (size_t o = 0; o < obs.size(); ++o) REQUIRE(obs[o] == 0);
  }
}

TEST_CASE("cluster with permutation still deterministic") {
  ClusterOptions opt;
  opt.permutation_layer = 1;
  auto gen =
      cluster_state_circuit(HypercubeFamily::CODE_16_6_4, ClusterGeometry::ONE_D_TIME, 4, opt);
  auto batch = sample_shots(gen.circuit, 100, 3);
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(gen.circuit, batch, s, dets, obs);
    for (size_t o = 0; o < obs.size(); ++o) REQUIRE(obs[o] == 0);
  }
}

TEST_CASE("global rotation: twirled angle becomes sin^2(theta/2) channel") {
  auto gen = surface_code_memory(3, 1, 'Z');
  auto rotated = inject_global_rotation(gen.circuit, gen.geometry.data_qubits, 0.3, true);
  bool found = false;
  for (const auto& ins : rotated.instructions()) {
    if (ins.op == Op::PAULI_ERROR) {
      REQUIRE(ins.terms.size() == 1);
      CHECK(ins.terms[0].letters == "Z");
      CHECK(ins.terms[0].probability == doctest::Approx(std::sin(0.15) * std::sin(0.15)));
      found = true;
    }
  }
  CHECK(found);
  // theta = 0 leaves the circuit unchanged
  auto same = inject_global_rotation(gen.circuit, gen.geometry.data_qubits, 0.0, false);
  CHECK(same == gen.circuit);
}
