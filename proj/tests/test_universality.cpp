#include <doctest.h>

#include <cmath>

#include "qecw/universality.hpp"

using namespace qecw;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("statevector basics") {
  StateVector psi(2);
  psi.apply_h(0);
  psi.apply_cnot(0, 1);
  CHECK(psi.expectation(PauliString::from_string("XX")).real() == doctest::Approx(1.0));
  CHECK(psi.expectation(PauliString::from_string("ZZ")).real() == doctest::Approx(1.0));
  CHECK(entanglement_entropy(psi, {0}) == doctest::Approx(1.0));
  StateVector prod(3);
  prod.apply_h(1);
  CHECK(entanglement_entropy(prod, {0, 1}) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("H then measure X gives deterministic outcome") {
  Circuit c(1);
  c.reset({0});
  c.gate(Op::H, {0});
  c.measure('X', {0});
  for (uint64_t seed = 0; seed < 8; ++seed) {
    auto sim = simulate(c, seed);
    CHECK(sim.record[0] == 0);
  }
}

TEST_CASE("transversal T convention on the 3D block") {
  auto enc = hypercube_encoder(HypercubeFamily::REED_MULLER_15_1_3, Puncture::BOTTOM, 'X');
  auto sim = simulate(enc.circuit, 3);
  const auto& code = enc.codes[0];
  for (size_t q = 0; q < 15; ++q) sim.state.apply_t(q);
  // still in code space
  for (const auto& s : code.stabilizers)
    CHECK(sim.state.expectation(s).real() == doctest::Approx(1.0).epsilon(1e-9));
  PauliString ylog = code.logical_x[0] * code.logical_z[0];
  ylog.set_phase_exponent((ylog.phase_exponent() + 1) & 3);
  double x = sim.state.expectation(code.logical_x[0]).real();
  double y = sim.state.expectation(ylog).real();
  CHECK(x == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
  // kTransversalTIsLogicalTDag pins the sign of <Y_L>.
  double expect_y = kTransversalTIsLogicalTDag ? -1 / std::sqrt(2.0) : 1 / std::sqrt(2.0);
  CHECK(y == doctest::Approx(expect_y).epsilon(1e-9));
}

TEST_CASE("T plateau: code-space return at pi/4 only with positive signs") {
  std::vector<double> phis = {kPi / 4};
  auto clean = global_rotation_scan(HypercubeFamily::REED_MULLER_15_1_3, phis, {}, 8, 5);
  CHECK(std::abs(clean.stabilizer_mean[0] - 1.0) < 1e-9);
  auto flipped = global_rotation_scan(HypercubeFamily::REED_MULLER_15_1_3, phis,
                                      corner_sign_flips(HypercubeFamily::REED_MULLER_15_1_3), 8, 5);
  CHECK(std::abs(flipped.stabilizer_mean[0] - 1.0) > 0.01);
}

TEST_CASE("rotation scan basics") {
  auto scan = global_rotation_scan(HypercubeFamily::STEANE_7_1_3, {0.0}, {}, 4, 1);
  CHECK(scan.logical[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(scan.stabilizer_mean[0] == doctest::Approx(1.0).epsilon(1e-9));
  auto unenc = global_rotation_scan(std::nullopt, {0.0, kPi / 2}, {}, 1, 1);
  CHECK(unenc.logical[0] == doctest::Approx(1.0));
  CHECK(unenc.logical[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("angle set basics") {
  auto clifford = ht_angle_set(0);
  for (const auto& r : clifford.records) CHECK(r.t_count == 0);
  auto one = ht_angle_set(1);
  bool found = false;
  for (const auto& r : one.records)
    if (r.sequence == "T") {
      found = true;
      CHECK(r.theta == doctest::Approx(kPi / 2));
      CHECK(r.phi == doctest::Approx(kPi / 4));
    }
  CHECK(found);
  // angles recomputable: records already store exact values; a target in
  // the set synthesizes with zero error
  auto synth = synthesize_angle(kPi / 2, kPi / 4, 2);
  CHECK(synth.angular_error < 1e-12);
}

TEST_CASE("min separation decreases with richer sets") {
  double prev = 10;
  for (int t = 2; t <= 6; ++t) {
    auto set = ht_angle_set(t);
    CHECK(set.min_separation <= prev + 1e-12);
    prev = set.min_separation;
  }
}

TEST_CASE("synthesis error non-increasing in max_t") {
  double prev = 10;
  for (int t = 0; t <= 6; ++t) {
    auto s = synthesize_angle(kPi / 2, 0.3927, t);
    CHECK(s.angular_error <= prev + 1e-12);
    prev = s.angular_error;
  }
}

TEST_CASE("teleport H maps |+L> to |0L>") {
  for (uint64_t seed : {0ull, 1ull, 2ull, 3ull}) {
    auto out = teleport_logical(0, seed);
    auto enc7 = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
    const auto& code = enc7.codes[0];
    for (const auto& s : code.stabilizers)
      CHECK(out.state.expectation(s).real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.state.expectation(code.logical_z[0]).real() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("teleported T state lands on the 2D block") {
  auto out = teleport_logical(1, 7);
  auto enc7 = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
  const auto& code = enc7.codes[0];
  for (const auto& s : code.stabilizers)
    CHECK(out.state.expectation(s).real() == doctest::Approx(1.0).epsilon(1e-9));
  // H T^(dagger?) |+>: regardless of convention the state is H applied to an
  // equatorial state at azimuth +-pi/4.
  PauliString ylog = code.logical_x[0] * code.logical_z[0];
  ylog.set_phase_exponent((ylog.phase_exponent() + 1) & 3);
  double z = out.state.expectation(code.logical_z[0]).real();
  double y = out.state.expectation(ylog).real();
  CHECK(z == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(y) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("chain of teleports reproduces enumerated angles") {
  // Word T then H then T: the chain realizes H T^a per step, so t_runs
  // {1, 1} gives (H T)(H T)|+> up to the documented dagger convention.
  auto [theta, phi] = teleport_chain_angles({1, 1}, 3);
  // compare against direct 2x2 computation honoring the convention
  Eigen::Matrix2cd h, t;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  double sign = kTransversalTIsLogicalTDag ? -1.0 : 1.0;
  t << 1, 0, 0, std::exp(std::complex<double>(0, sign * kPi / 4));
  Eigen::Vector2cd v;
  v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  v = h * t * v;
  v = h * t * v;
  double x = 2 * (std::conj(v(0)) * v(1)).real();
  double y = 2 * (std::conj(v(0)) * v(1)).imag();
  double z = std::norm(v(0)) - std::norm(v(1));
  CHECK(theta == doctest::Approx(std::acos(z)).epsilon(1e-9));
  double dphi = std::remainder(phi - std::atan2(y, x), 2 * kPi);
  CHECK(std::abs(dphi) < 1e-9);
}

TEST_CASE("chsh at zero noise saturates the quantum bound") {
  CHECK(chsh(0, ChshMode::PHYSICAL) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(chsh(0, ChshMode::LOGICAL) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(chsh(0.3, ChshMode::PHYSICAL, 5, 200) < 2.0);
}

TEST_CASE("entropy bounds for the shipped codes") {
  struct Want {
    HypercubeFamily family;
    size_t k, d;
  };
  for (auto w : {Want{HypercubeFamily::STEANE_7_1_3, 1, 3},
                 Want{HypercubeFamily::REED_MULLER_15_1_3, 1, 3},
                 Want{HypercubeFamily::CODE_16_6_4, 6, 4}}) {
    auto enc = hypercube_encoder(w.family, default_puncture(w.family), 'Z');
    double s = min_region_entropy(enc.codes[0], enc, w.d - 1);
    double bound = std::min(double(w.k), double(w.d - 1));
    INFO(enc.codes[0].label, " S_PS ", s, " bound ", bound);
    CHECK(s >= bound - 1e-9);
  }
}

TEST_CASE("logical operator entanglement bounded by k/2") {
  auto enc = hypercube_encoder(HypercubeFamily::CODE_16_6_4, Puncture::NONE, 'Z');
  // In-block permutation (two permutation CNOTs).
  Circuit perm(16);
  auto spec = detail::build_hypercube(HypercubeFamily::CODE_16_6_4, Puncture::NONE, 'Z');
  std::vector<std::pair<uint32_t, uint32_t>> mapping;
  auto pv = [](int v) {
    int b1 = v & 1, b2 = (v >> 1) & 1, b3 = (v >> 2) & 1, b4 = (v >> 3) & 1;
    return b1 | ((b2 ^ b1 ^ 1) << 1) | (b3 << 2) | ((b4 ^ b3 ^ 1) << 3);
  };
  for (int v : spec.vertices)
    if (pv(v) != v) mapping.emplace_back(spec.index_of.at(v), spec.index_of.at(pv(v)));
  perm.permute(mapping);
  double slo = logical_operator_entanglement(enc, perm);
  INFO("S_LO ", slo);
  CHECK(slo <= 3.0 + 1e-9);
  CHECK(slo > 0.5);  // the permutation really is entangling
}

TEST_CASE("coherent sim: zero angle gives zero error, rotation visible without QEC") {
  auto none = coherent_qec_sim(0.0, 0, 20, 1);
  CHECK(none.logical_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(none.same_basis == doctest::Approx(1.0).epsilon(1e-10));
  double theta = 2 * kPi * 0.016;
  auto rot = coherent_qec_sim(theta, 0, 50, 2);
  CHECK(std::abs(rot.orthogonal_basis) > 0.1);  // coherent logical rotation
}
