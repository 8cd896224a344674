#include <doctest.h>

#include <cmath>
#include <map>

#include "qecw/detectors.hpp"
#include "qecw/generators.hpp"
#include "qecw/noise.hpp"
#include "qecw/sampler.hpp"

using namespace qecw;

namespace {

double detector_rate(const Circuit& c, const ShotBatch& batch, size_t det) {
  std::vector<uint8_t> dets, obs;
  size_t fired = 0;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(c, batch, s, dets, obs);
    fired += dets[det];
  }
  return double(fired) / double(batch.n_shots);
}

}  // namespace

TEST_CASE("noiseless memory circuit fires no detectors") {
  for (char basis : {'Z', 'X'}) {
    auto gen = surface_code_memory(3, 4, basis);
    auto batch = sample_shots(gen.circuit, 300, 17);
    std::vector<uint8_t> dets, obs;
    for (size_t s = 0; s < batch.n_shots; ++s) {
      compute_detector_bits(gen.circuit, batch, s, dets, obs);
      for (auto b : dets) REQUIRE(b == 0);
      for (auto b : obs) REQUIRE(b == 0);
    }
  }
}

TEST_CASE("deterministic detector counts") {
  auto g5 = surface_code_memory(5, 4, 'X');
  CHECK(g5.circuit.num_detectors() == 96);
  auto g3 = surface_code_memory(3, 4, 'X');
  CHECK(g3.circuit.num_detectors() == 32);
}

TEST_CASE("certain loss reads LOST") {
  Circuit c(1);
  c.loss(1.0, {0});
  c.measure('Z', {0});
  auto batch = sample_shots(c, 50, 3);
  for (size_t s = 0; s < 50; ++s) CHECK(batch.record(s, 0) == kLost);
}

TEST_CASE("X error rate before measurement is binomial") {
  Circuit c(1);
  c.reset({0});
  c.biased_error('X', 0.01, {0});
  size_t r = c.measure('Z', {0});
  c.detector({int64_t(r)});
  size_t shots = 100000;
  auto batch = sample_shots(c, shots, 99);
  double rate = detector_rate(c, batch, 0);
  double sigma = std::sqrt(0.01 * 0.99 / double(shots));
  CHECK(std::abs(rate - 0.01) < 3 * sigma);
}

TEST_CASE("identical seeds give identical batches regardless of threads") {
  auto gen = surface_code_memory(3, 2, 'Z');
  auto noisy = apply_noise(gen.circuit, NoiseModel::named("exp-like"));
  SampleOptions one;
  one.threads = 1;
  SampleOptions four;
  four.threads = 4;
  auto b1 = sample_shots(noisy, 2000, 42, one);
  auto b4 = sample_shots(noisy, 2000, 42, four);
  CHECK(b1.records == b4.records);
  REQUIRE(b1.losses.size() == b4.losses.size());
  for (size_t s = 0; s < b1.losses.size(); ++s) CHECK(b1.losses[s] == b4.losses[s]);
}

TEST_CASE("measurement randomness is consistent: bell pair correlations") {
  Circuit c(2);
  c.reset({0, 1});
  c.gate(Op::H, {0});
  c.gate(Op::CNOT, {0, 1});
  c.measure('Z', {0});
  c.measure('Z', {1});
  auto batch = sample_shots(c, 20000, 7);
  size_t ones = 0;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    REQUIRE(batch.record(s, 0) == batch.record(s, 1));
    ones += batch.record(s, 0);
  }
  double frac = double(ones) / double(batch.n_shots);
  CHECK(std::abs(frac - 0.5) < 0.02);
}

TEST_CASE("frame sampling matches exhaustive enumeration on a small circuit") {
  // 3 qubits, Z-checks measured twice with several error locations.
  Circuit c(3);
  c.reset({0, 1, 2});
  c.pauli_error1(0.05, {0, 1, 2});
  size_t m0 = c.measure('Z', {0});
  size_t m1 = c.measure('Z', {1});
  c.biased_error('X', 0.07, {2});
  size_t m2 = c.measure('Z', {2});
  c.detector({int64_t(m0)});
  c.detector({int64_t(m1)});
  c.detector({int64_t(m2)});
  c.observable(0, {int64_t(m0), int64_t(m2)});

  // Exhaustive over all error assignments (4^3 x 2 outcomes of biased err).
  std::map<std::vector<uint8_t>, double> expected;
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (int e0 = 0; e0 < 4; ++e0)
    for (int e1 = 0; e1 < 4; ++e1)
      for (int e2 = 0; e2 < 4; ++e2)
        for (int f2 = 0; f2 < 2; ++f2) {
          double p = 1;
          auto term_p = [&](int e) { return e == 0 ? 1 - 0.05 : 0.05 / 3; };
          p *= term_p(e0) * term_p(e1) * term_p(e2);
          p *= f2 ? 0.07 : 1 - 0.07;
          auto flips = [&](int e) { return letters[e] == 'X' || letters[e] == 'Y'; };
          std::vector<uint8_t> sig = {uint8_t(flips(e0)), uint8_t(flips(e1)),
                                      uint8_t(flips(e2) ^ f2),
                                      uint8_t(flips(e0) ^ flips(e2) ^ f2)};
          expected[sig] += p;
        }

  size_t shots = 200000;
  auto batch = sample_shots(c, shots, 11);
  std::map<std::vector<uint8_t>, size_t> counts;
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < shots; ++s) {
    compute_detector_bits(c, batch, s, dets, obs);
    counts[{dets[0], dets[1], dets[2], obs[0]}]++;
  }
  for (auto& [sig, prob] : expected) {
    double got = double(counts[sig]) / double(shots);
    double sigma = std::sqrt(prob * (1 - prob) / double(shots)) + 1e-9;
    INFO(int(sig[0]), int(sig[1]), int(sig[2]), int(sig[3]), " p=", prob, " got=", got);
    CHECK(std::abs(got - prob) < 4 * sigma + 1e-4);
  }
}

TEST_CASE("permute then inverse is identity on outcomes") {
  Circuit c1(2);
  c1.reset({0, 1});
  c1.gate(Op::H, {0});
  c1.permute({{0, 1}, {1, 0}});
  c1.permute({{0, 1}, {1, 0}});
  c1.measure('X', {0});
  c1.measure('Z', {1});
  Circuit c2(2);
  c2.reset({0, 1});
  c2.gate(Op::H, {0});
  c2.measure('X', {0});
  c2.measure('Z', {1});
  auto b1 = sample_shots(c1, 500, 5);
  auto b2 = sample_shots(c2, 500, 5);
  CHECK(b1.records == b2.records);
}

TEST_CASE("forced data loss: constituent checks flicker, supercheck silent") {
  auto gen = surface_code_memory(3, 6, 'Z');
  // Lose one bulk data qubit after the first round: insert LOSS right
  // after the first TICK-separated measurement block.
  uint32_t victim = gen.geometry.checks[0].data[0];
  // pick a data qubit belonging to two Z checks (bulk for the Z graph)
  for (uint32_t q : gen.geometry.data_qubits) {
    if (gen.geometry.checks_containing(q, 'Z').size() == 2) {
      victim = q;
      break;
    }
  }
  Circuit lossy(gen.circuit.num_qubits());
  size_t measure_blocks_seen = 0;
  bool inserted = false;
  for (const auto& ins : gen.circuit.instructions()) {
    lossy.append(ins);
    if (ins.op == Op::MEASURE) {
      ++measure_blocks_seen;
      if (!inserted && measure_blocks_seen == 8) {  // after round-1 ancillas
        Instruction l;
        l.op = Op::LOSS;
        l.arg = 1.0;
        l.targets = {victim};
        lossy.append(l);
        inserted = true;
      }
    }
  }
  REQUIRE(inserted);
  size_t shots = 4000;
  auto batch = sample_shots(lossy, shots, 1234);

  auto zchecks = gen.geometry.checks_containing(victim, 'Z');
  REQUIRE(zchecks.size() == 2);
  // Find a mid-circuit detector slot for each of the two checks (round 3
  // vs round 4, say) and their supercheck product.
  int slot_a = -1, slot_b = -1;
  for (size_t dIdx = 0; dIdx < gen.geometry.detectors.size(); ++dIdx) {
    const auto& dInfo = gen.geometry.detectors[dIdx];
    if (dInfo.round_a == 3 && dInfo.round_b == 4) {
      if (dInfo.check == zchecks[0]) slot_a = int(dIdx);
      if (dInfo.check == zchecks[1]) slot_b = int(dIdx);
    }
  }
  REQUIRE(slot_a >= 0);
  REQUIRE(slot_b >= 0);

  std::vector<uint8_t> dets, obs;
  size_t fa = 0, fb = 0, fsuper = 0;
  for (size_t s = 0; s < shots; ++s) {
    compute_detector_bits(lossy, batch, s, dets, obs);
    fa += dets[slot_a];
    fb += dets[slot_b];
    fsuper += dets[slot_a] ^ dets[slot_b];
  }
  double ra = double(fa) / shots, rb = double(fb) / shots;
  CHECK(std::abs(ra - 0.5) < 0.05);
  CHECK(std::abs(rb - 0.5) < 0.05);
  CHECK(fsuper == 0);  // the product of the two checks stays deterministic

  // Under the supercheck policy every surviving detector is exactly silent:
  // the merged products are deterministic and there is no Pauli noise.
  auto arrays = extract_detectors(lossy, batch, LossPolicy::SUPERCHECK, &gen.geometry);
  size_t valid_total = 0;
  for (size_t s = 0; s < std::min<size_t>(shots, 500); ++s) {
    for (size_t dIdx = 0; dIdx < arrays.n_detectors; ++dIdx) {
      if (!arrays.valid(s, dIdx)) continue;
      ++valid_total;
      REQUIRE(arrays.det(s, dIdx) == 0);
    }
  }
  CHECK(valid_total > 0);

  // BARE keeps the flicker visible in the same shots.
  auto bare = extract_detectors(lossy, batch, LossPolicy::BARE, nullptr);
  size_t bare_fired = 0;
  for (size_t s = 0; s < std::min<size_t>(shots, 500); ++s)
    for (size_t dIdx = 0; dIdx < bare.n_detectors; ++dIdx) bare_fired += bare.det(s, dIdx);
  CHECK(bare_fired > 0);
}
