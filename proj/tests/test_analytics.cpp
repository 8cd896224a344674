#include <doctest.h>

#include <cmath>
#include <random>

#include "qecw/analytics.hpp"
#include "qecw/dem.hpp"
#include "qecw/io.hpp"
#include "qecw/sampler.hpp"

using namespace qecw;

TEST_CASE("lepr formula values") {
  CHECK(lepr(0, 4) == doctest::Approx(0.0));
  CHECK(lepr(0.5, 3) == doctest::Approx(0.5));
  CHECK(lepr(0.0243, 4) == doctest::Approx(0.0062).epsilon(0.01));
  CHECK(std::abs(lepr(0.0243, 4) - 0.0062) < 5e-5);
  CHECK_THROWS_AS(lepr(0.7, 4), std::invalid_argument);
  // multi-qubit form reduces to the single form at N=1
  CHECK(lepr_multi(0.2, 4, 1) == doctest::Approx(lepr(0.2, 4)));
}

TEST_CASE("epsilon and lepr are mutually consistent") {
  for (double p : {0.001, 0.01, 0.1, 0.3}) {
    for (int n : {1, 2, 3, 5, 9}) {
      CHECK(epsilon_per_logical_op(p, n) == doctest::Approx(lepr(p, 3.0 * n)).epsilon(1e-12));
    }
  }
  // monotone in N
  double prev = 1;
  for (int n = 1; n <= 20; ++n) {
    double e = epsilon_per_logical_op(0.2, n);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("lambda ratio") {
  CHECK(lambda_ratio(0.1, 0.1) == doctest::Approx(1.0));
  CHECK(lambda_ratio(0.2, 0.1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lambda_ratio(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("pij estimator recovers a shared mechanism") {
  // Synthetic: mechanism p flips detectors 0 and 1; independent noise on 2.
  size_t shots = 200000;
  DetectorArrays arrays;
  arrays.n_shots = shots;
  arrays.n_detectors = 3;
  arrays.detector_bits.assign(shots * 3, 0);
  arrays.detector_valid.assign(shots * 3, 1);
  arrays.detector_weight.assign(shots * 3, 1.0f);
  std::mt19937 gen(7);
  std::bernoulli_distribution shared(0.07), solo1(0.02), solo2(0.05);
  for (size_t s = 0; s < shots; ++s) {
    bool m = shared(gen);
    bool a = solo1(gen), b = solo1(gen), c = solo2(gen);
    arrays.detector_bits[s * 3 + 0] = uint8_t(m ^ a);
    arrays.detector_bits[s * 3 + 1] = uint8_t(m ^ b);
    arrays.detector_bits[s * 3 + 2] = uint8_t(c);
  }
  auto pij = pij_matrix(arrays);
  double sigma = 4 * std::sqrt(0.07 / double(shots)) + 2e-3;
  CHECK(std::abs(pij(0, 1) - 0.07) < sigma);
  CHECK(std::abs(pij(0, 2)) < 4e-3);
  CHECK(std::abs(pij(1, 2)) < 4e-3);
}

TEST_CASE("gate model fit recovers synthetic parameters") {
  double A = 2.3, p = 0.004, dp = 0.0015;
  int d = 5;
  std::vector<std::pair<double, double>> data;
  for (double n : {1.0, 2.0, 3.0, 5.0, 7.0, 9.0, 12.0})
    data.emplace_back(n, A * std::pow(p + n * dp, (d + 1) / 2.0));
  auto fit = fit_gate_model(data, d);
  CHECK(fit.converged);
  // canonical gauge: the amplitude folds into the rates as A^(2/(d+1))
  double fold = std::pow(A, 2.0 / (d + 1));
  CHECK(fit.p_qec == doctest::Approx(p * fold).epsilon(0.05));
  CHECK(fit.delta_p_det == doctest::Approx(dp * fold).epsilon(0.05));
  CHECK(fit.delta_p_det >= 0);
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("circuit distance of the d=3 repetition code is 3") {
  // Three data qubits, two Z checks measured perfectly, X errors on data.
  Circuit c(5);
  c.reset({0, 1, 2, 3, 4});
  c.pauli_error1(0.01, {0, 1, 2});
  c.gate(Op::CNOT, {0, 3, 1, 4});
  c.gate(Op::CNOT, {1, 3, 2, 4});
  auto m3 = c.measure('Z', {3});
  auto m4 = c.measure('Z', {4});
  c.detector({int64_t(m3)});
  c.detector({int64_t(m4)});
  std::vector<int64_t> data_recs;
  for (uint32_t q : {0u, 1u, 2u}) data_recs.push_back(int64_t(c.measure('Z', {q})));
  c.observable(0, data_recs);
  auto dem = build_dem(c);
  auto dist = circuit_distance(dem, 4);
  REQUIRE(dist.has_value());
  CHECK(*dist == 3);
  // brute-force oracle at weight <= 3: enumerate subsets directly
  size_t m = dem.mechanisms.size();
  size_t best = SIZE_MAX;
  for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
    if (size_t(std::popcount(mask)) > 3) continue;
    std::vector<uint8_t> det(dem.num_detectors, 0);
    uint64_t obs = 0;
    for (size_t e = 0; e < m; ++e)
      if ((mask >> e) & 1) {
        for (uint32_t dd : dem.mechanisms[e].detectors) det[dd] ^= 1;
        obs ^= dem.mechanisms[e].observables;
      }
    bool silent = true;
    for (uint8_t b : det) silent &= b == 0;
    if (silent && obs) best = std::min(best, size_t(std::popcount(mask)));
  }
  CHECK(best == 3);
}

TEST_CASE("circuit distance invariant under mechanism reordering") {
  DetectorErrorModel dem;
  dem.num_detectors = 3;
  dem.num_observables = 1;
  auto mech = [](double p, std::vector<uint32_t> d, uint64_t o) {
    Mechanism m;
    m.p = p;
    m.detectors = std::move(d);
    m.observables = o;
    return m;
  };
  dem.mechanisms = {mech(0.01, {0}, 1), mech(0.01, {0, 1}, 0), mech(0.01, {1, 2}, 0),
                    mech(0.01, {2}, 0)};
  auto d1 = circuit_distance(dem, 5);
  std::reverse(dem.mechanisms.begin(), dem.mechanisms.end());
  auto d2 = circuit_distance(dem, 5);
  REQUIRE(d1.has_value());
  CHECK(*d1 == *d2);
  CHECK(*d1 == 4);
}

TEST_CASE("ordering comparison: fixed strokes admit a cheaper undetectable error") {
  auto same = surface_code_memory(3, 4, 'Z', CheckOrdering::SAME);
  auto alt = surface_code_memory(3, 4, 'Z', CheckOrdering::N_Z_ZR_NR);
  auto dem_same = build_dem(apply_noise(same.circuit, NoiseModel::named("theory-p006")));
  auto dem_alt = build_dem(apply_noise(alt.circuit, NoiseModel::named("theory-p006")));
  auto ds = circuit_distance(dem_same, 3);
  auto da = circuit_distance(dem_alt, 3);
  size_t vs = ds ? *ds : 99, va = da ? *da : 99;
  INFO("same ", vs, " alternating ", va);
  CHECK(va >= vs);  // alternating never smaller
}

TEST_CASE("error budget: single channel owns the whole budget") {
  auto gen = surface_code_memory(3, 2, 'Z');
  NoiseModel m;
  m.two_qubit_gate.pauli = 0.01;
  auto budget = error_budget(gen, m, 20000, 3);
  REQUIRE(budget.size() == 1);
  CHECK(budget[0].channel == std::string("two_qubit_gate.pauli"));
  CHECK(budget[0].contribution == doctest::Approx(1.0));
}

TEST_CASE("detector stats and histogram") {
  auto gen = surface_code_memory(3, 3, 'Z');
  auto noisy = apply_noise(gen.circuit, NoiseModel::named("theory-p006"));
  auto batch = sample_shots(noisy, 20000, 9);
  auto arrays = extract_detectors(noisy, batch, LossPolicy::BARE, &gen.geometry);
  auto stats = detector_stats(arrays);
  CHECK(stats.mean_rate > 0.001);
  CHECK(stats.mean_rate < 0.2);
  size_t total = 0;
  for (size_t c : stats.fired_histogram) total += c;
  CHECK(total == 20000);
}

TEST_CASE("co-propagating weights with and without permutation") {
  auto plain = co_propagating_weights(HypercubeFamily::CODE_16_6_4, false);
  CHECK(plain == std::vector<int>{3, 3, 3, 3, 3, 3});
  auto permuted = co_propagating_weights(HypercubeFamily::CODE_16_6_4, true);
  CHECK(permuted == std::vector<int>{3, 3, 3, 6, 6, 12});
}

TEST_CASE("io round trips") {
  std::vector<std::vector<uint8_t>> events = {{1, 0, 1}, {0, 0, 0}, {1, 1, 1}};
  auto text = detector_events_csv(events);
  CHECK(parse_detector_events_csv(text) == events);
  CHECK(content_hash("abc") != content_hash("abd"));
}
