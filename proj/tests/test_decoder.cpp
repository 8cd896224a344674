#include <doctest.h>

#include <cmath>
#include <random>

#include "qecw/decoder.hpp"
#include "qecw/generators.hpp"

using namespace qecw;

namespace {

DetectorErrorModel random_dem(std::mt19937& gen, size_t max_mech = 20, size_t max_det = 10) {
  std::uniform_int_distribution<size_t> nmech(1, max_mech);
  std::uniform_int_distribution<size_t> ndet(1, max_det);
  std::uniform_real_distribution<double> prob(0.001, 0.45);
  DetectorErrorModel dem;
  dem.num_detectors = ndet(gen);
  dem.num_observables = 1 + gen() % 2;
  size_t m = nmech(gen);
  for (size_t e = 0; e < m; ++e) {
    Mechanism mech;
    mech.p = prob(gen);
    size_t k = 1 + gen() % 3;
    for (size_t i = 0; i < k; ++i) mech.detectors.push_back(uint32_t(gen() % dem.num_detectors));
    std::sort(mech.detectors.begin(), mech.detectors.end());
    mech.detectors.erase(std::unique(mech.detectors.begin(), mech.detectors.end()),
                         mech.detectors.end());
    if (gen() % 3 == 0) mech.observables = 1 + gen() % ((1u << dem.num_observables) - 1);
    dem.mechanisms.push_back(mech);
  }
  dem.canonicalize();
  return dem;
}

std::vector<uint8_t> random_feasible_events(const DetectorErrorModel& dem, std::mt19937& gen) {
  std::vector<uint8_t> ev(dem.num_detectors, 0);
  for (const auto& m : dem.mechanisms)
    if (gen() % 4 == 0)
      for (uint32_t d : m.detectors) ev[d] ^= 1;
  return ev;
}

}  // namespace

TEST_CASE("all-zero events decode to the empty set") {
  std::mt19937 gen(5);
  auto dem = random_dem(gen);
  std::vector<uint8_t> ev(dem.num_detectors, 0);
  auto res = mle_decode(dem, ev);
  CHECK(res.error_set.empty());
  CHECK(res.observable_flips == 0);
  CHECK(res.p0 > 0);
}

TEST_CASE("two mechanisms covering one detector: confidence formula") {
  DetectorErrorModel dem;
  dem.num_detectors = 1;
  dem.num_observables = 1;
  Mechanism a;
  a.p = 0.01;
  a.detectors = {0};
  a.observables = 1;
  Mechanism b;
  b.p = 0.001;
  b.detectors = {0};
  dem.mechanisms = {a, b};
  auto res = mle_decode(dem, {1});
  CHECK(res.observable_flips == 1);
  double p0 = 0.01 * (1 - 0.001);
  double p1 = 0.001 * (1 - 0.01);
  CHECK(res.confidence == doctest::Approx(p0 / (p0 + p1)).epsilon(1e-12));
  auto oracle = brute_force_decode(dem, {1});
  CHECK(oracle.observable_flips == res.observable_flips);
  CHECK(oracle.confidence == doctest::Approx(res.confidence).epsilon(1e-12));
}

TEST_CASE("symmetric tie breaks to the lexicographically smallest set") {
  DetectorErrorModel dem;
  dem.num_detectors = 1;
  dem.num_observables = 1;
  Mechanism a;
  a.p = 0.01;
  a.detectors = {0};
  a.observables = 1;
  Mechanism b = a;
  b.observables = 0;
  dem.mechanisms = {a, b};
  auto res = mle_decode(dem, {1});
  CHECK(res.confidence == doctest::Approx(0.5));
  REQUIRE(res.error_set.size() == 1);
  CHECK(res.error_set[0] == 0);
  auto oracle = brute_force_decode(dem, {1});
  CHECK(oracle.error_set == res.error_set);
}

TEST_CASE("infeasible syndrome names the uncovered detector") {
  DetectorErrorModel dem;
  dem.num_detectors = 2;
  dem.num_observables = 1;
  Mechanism a;
  a.p = 0.1;
  a.detectors = {0};
  dem.mechanisms = {a};
  CHECK_THROWS_WITH_AS(mle_decode(dem, {0, 1}), doctest::Contains("detector 1"),
                       std::runtime_error);
}

TEST_CASE("oracle equivalence on random models") {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    auto dem = random_dem(gen);
    auto ev = random_feasible_events(dem, gen);
    auto fast = mle_decode(dem, ev);
    auto slow = brute_force_decode(dem, ev);
    INFO("trial ", trial);
    REQUIRE(fast.status == DecodeStatus::OK);
    REQUIRE(fast.observable_flips == slow.observable_flips);
    REQUIRE(fast.p0 == doctest::Approx(slow.p0).epsilon(1e-12));
    REQUIRE(fast.p1 == doctest::Approx(slow.p1).epsilon(1e-12));
    REQUIRE(fast.error_set == slow.error_set);
  }
}

TEST_CASE("lookup decoder corrects all single errors at d=3") {
  for (auto family : {HypercubeFamily::STEANE_7_1_3, HypercubeFamily::REED_MULLER_15_1_3}) {
    auto gen = hypercube_encoder(family, default_puncture(family), 'Z');
    const auto& code = gen.codes[0];
    LookupDecoder dec(code);
    // zero syndrome -> identity
    std::vector<uint8_t> zero(code.stabilizers.size(), 0);
    CHECK(dec.decode(zero).is_identity());
    for (size_t q = 0; q < code.n; ++q) {
      for (char letter : {'X', 'Y', 'Z'}) {
        auto err = PauliString::single(code.n, q, letter);
        std::vector<uint8_t> syn;
        for (const auto& s : code.stabilizers) syn.push_back(s.commutes(err) ? 0 : 1);
        auto corr = dec.decode(syn);
        // correction * error must be in the stabilizer group (no logical)
        auto net = corr * err;
        std::vector<PauliString> gens = code.stabilizers;
        CHECK(in_pauli_span(gens, net));
      }
    }
  }
}

TEST_CASE("postselection") {
  std::vector<std::vector<uint8_t>> events = {{0, 0}, {1, 0}, {0, 0}, {0, 1}};
  auto res = postselect_error_detect(events);
  CHECK(res.accepted == std::vector<size_t>{0, 2});
  CHECK(res.achieved_fraction == doctest::Approx(0.5));

  std::vector<DecodeResult> dr(4);
  dr[0].confidence = 0.9;
  dr[1].confidence = 0.99;
  dr[2].confidence = 0.6;
  dr[3].confidence = 0.7;
  auto keep = postselect_confidence(dr, 0.5);
  CHECK(keep.accepted == std::vector<size_t>{0, 1});
  auto all = postselect_confidence(dr, 1.0);
  CHECK(all.accepted.size() == 4);
  CHECK_THROWS_AS(postselect_confidence({}, 0.5), std::invalid_argument);
}

TEST_CASE("decode_batch dedupes and matches single decodes") {
  std::mt19937 gen(31);
  auto dem = random_dem(gen, 15, 8);
  std::vector<std::vector<uint8_t>> events;
  for (int i = 0; i < 50; ++i) events.push_back(random_feasible_events(dem, gen));
  auto batch = decode_batch(dem, events, {}, 3);
  for (size_t i = 0; i < events.size(); ++i) {
    auto single = mle_decode(dem, events[i]);
    CHECK(batch[i].observable_flips == single.observable_flips);
    CHECK(batch[i].p0 == doctest::Approx(single.p0).epsilon(1e-12));
  }
}
