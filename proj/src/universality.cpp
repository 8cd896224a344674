#include "qecw/universality.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qecw/decoder.hpp"
#include "qecw/rng.hpp"

namespace qecw {

namespace {

constexpr double kPi = 3.14159265358979323846;

StateVector run_encoder(const GeneratedCircuit& enc, uint64_t seed) {
  return simulate(enc.circuit, seed).state;
}

// Projective stabilizer measurement + lookup correction, in place.
std::vector<uint8_t> ideal_decode(StateVector& psi, const StabilizerCode& code,
                                  const LookupDecoder& lookup, CounterRng& rng, uint64_t site,
                                  uint64_t shot) {
  std::vector<uint8_t> syndrome(code.stabilizers.size());
  for (size_t i = 0; i < code.stabilizers.size(); ++i)
    syndrome[i] = uint8_t(psi.measure_pauli(code.stabilizers[i], rng.uniform(shot, site, i)));
  auto corr = lookup.decode(syndrome);
  if (!corr.is_identity()) psi.apply_pauli(corr);
  return syndrome;
}

}  // namespace

std::vector<uint32_t> corner_sign_flips(HypercubeFamily family) {
  auto spec = detail::build_hypercube(family, default_puncture(family), 'X');
  std::vector<uint32_t> out;
  for (int v : spec.vertices)
    if (std::popcount(unsigned(v ^ spec.source)) == 1) out.push_back(spec.index_of.at(v));
  std::sort(out.begin(), out.end());
  return out;
}

RotationScan global_rotation_scan(std::optional<HypercubeFamily> family,
                                  const std::vector<double>& phis,
                                  const std::vector<uint32_t>& sign_flips, int trajectories,
                                  uint64_t seed) {
  RotationScan out;
  out.phis = phis;
  CounterRng rng(seed ^ 0x726f746174ULL);
  if (!family) {
    for (double phi : phis) {
      StateVector psi(1);
      psi.apply_h(0);
      psi.apply_rz(phi, 0);
      out.logical.push_back(psi.expectation(PauliString::from_string("X")).real());
      out.stabilizer_mean.push_back(1.0);
    }
    return out;
  }
  auto enc = hypercube_encoder(*family, default_puncture(*family), 'X', sign_flips);
  const auto& code = enc.codes[0];
  LookupDecoder lookup(code);
  for (size_t pi = 0; pi < phis.size(); ++pi) {
    StateVector base = run_encoder(enc, seed);
    for (size_t q = 0; q < code.n; ++q) base.apply_rz(phis[pi], q);
    double stab_mean = 0;
    for (const auto& s : code.stabilizers) stab_mean += base.expectation(s).real();
    stab_mean /= double(code.stabilizers.size());
    double logical = 0;
    for (int t = 0; t < trajectories; ++t) {
      StateVector psi = base;
      ideal_decode(psi, code, lookup, rng, pi * 1000 + t, 0);
      double l = 0;
      for (const auto& lx : code.logical_x) l += psi.expectation(lx).real();
      logical += l / double(code.logical_x.size());
    }
    out.logical.push_back(logical / trajectories);
    out.stabilizer_mean.push_back(stab_mean);
  }
  return out;
}

AngleSet ht_angle_set(int max_t) {
  if (max_t < 0 || max_t > 12) throw std::invalid_argument("max_t must lie in [0, 12]");
  Eigen::Matrix2cd h, t;
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  t << 1, 0, 0, std::exp(std::complex<double>(0, kPi / 4));
  Eigen::Vector2cd plus;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);

  // Words: optional leading H, T-runs of length 1..7 separated by single Hs,
  // optional trailing H. Runs longer than 7 wrap (T^8 = 1 up to phase).
  std::vector<std::string> words{""};
  std::vector<std::string> result_words;
  std::function<void(std::string, int, bool)> extend = [&](std::string w, int t_used,
                                                           bool after_h) {
    result_words.push_back(w);
    if (!after_h || w.empty()) {
      // may append an H (no HH pairs)
      if (w.empty() || w.back() == 'T') extend(w + "H", t_used, true);
    }
    for (int run = 1; run <= 7 && t_used + run <= max_t; ++run) {
      if (!w.empty() && w.back() == 'T') break;  // runs handled atomically
      std::string w2 = w;
      for (int i = 0; i < run; ++i) w2 += 'T';
      extend(w2, t_used + run, false);
    }
  };
  extend("", 0, false);

  std::vector<AngleRecord> records;
  auto bloch = [&](const Eigen::Vector2cd& v) {
    std::complex<double> a = v(0), b = v(1);
    double x = 2 * (std::conj(a) * b).real();
    double y = 2 * (std::conj(a) * b).imag();
    double z = std::norm(a) - std::norm(b);
    return std::array<double, 3>{x, y, z};
  };
  for (const auto& w : result_words) {
    Eigen::Vector2cd v = plus;
    int tc = 0;
    for (char g : w) {
      if (g == 'H') v = h * v;
      if (g == 'T') {
        v = t * v;
        ++tc;
      }
    }
    auto [x, y, z] = bloch(v);
    AngleRecord rec;
    rec.sequence = w;
    rec.t_count = tc;
    rec.theta = std::acos(std::clamp(z, -1.0, 1.0));
    rec.phi = std::atan2(y, x);
    records.push_back(rec);
  }
  // Deduplicate by angular separation.
  auto dir = [](const AngleRecord& r) {
    return std::array<double, 3>{std::sin(r.theta) * std::cos(r.phi),
                                 std::sin(r.theta) * std::sin(r.phi), std::cos(r.theta)};
  };
  auto sep = [&](const AngleRecord& a, const AngleRecord& b) {
    auto da = dir(a), db = dir(b);
    double dot = std::clamp(da[0] * db[0] + da[1] * db[1] + da[2] * db[2], -1.0, 1.0);
    return std::acos(dot);
  };
  AngleSet out;
  for (const auto& r : records) {
    bool dup = false;
    for (auto& kept : out.records)
      if (sep(kept, r) < 1e-9) {
        dup = true;
        if (r.t_count < kept.t_count) kept = r;  // keep the cheapest word
        break;
      }
    if (!dup) out.records.push_back(r);
  }
  double min_sep = kPi;
  for (size_t i = 0; i < out.records.size(); ++i)
    for (size_t j = i + 1; j < out.records.size(); ++j)
      min_sep = std::min(min_sep, sep(out.records[i], out.records[j]));
  out.min_separation = out.records.size() > 1 ? min_sep : 0;
  return out;
}

SynthesisResult synthesize_angle(double target_theta, double target_phi, int max_t) {
  auto set = ht_angle_set(max_t);
  std::array<double, 3> td{std::sin(target_theta) * std::cos(target_phi),
                           std::sin(target_theta) * std::sin(target_phi),
                           std::cos(target_theta)};
  SynthesisResult best;
  best.angular_error = 2 * kPi;
  for (const auto& r : set.records) {
    std::array<double, 3> rd{std::sin(r.theta) * std::cos(r.phi),
                             std::sin(r.theta) * std::sin(r.phi), std::cos(r.theta)};
    double dot = std::clamp(td[0] * rd[0] + td[1] * rd[1] + td[2] * rd[2], -1.0, 1.0);
    double eps = std::acos(dot);
    if (eps < best.angular_error) {
      best.angular_error = eps;
      best.best = r;
    }
  }
  return best;
}

namespace {

// Prepares the [[15,1,3]] |+L> block, applies t_layers transversal T
// layers, and teleports onto a fresh [[7,1,3]] block through the face CZ.
// The source's eight non-face qubits are measured first so the register
// never exceeds fifteen qubits; those measurements commute with the face
// CZ and the Steane encoding.
TeleportOutcome teleport_impl(int t_layers, uint64_t seed, StateVector* source_override) {
  auto spec15 = detail::build_hypercube(HypercubeFamily::REED_MULLER_15_1_3, Puncture::BOTTOM, 'X');
  auto enc15 = hypercube_encoder(HypercubeFamily::REED_MULLER_15_1_3, Puncture::BOTTOM, 'X');
  auto enc7 = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
  CounterRng rng(seed ^ 0x74656c65ULL);

  StateVector psi = source_override ? *source_override : run_encoder(enc15, seed);
  for (int l = 0; l < t_layers; ++l)
    for (size_t q = 0; q < 15; ++q) psi.apply_t(q);

  // Face = vertices with the fourth axis low, i.e. the bottom 3-cube.
  std::vector<size_t> face, nonface;
  for (int v : spec15.vertices) {
    if (v & 8)
      nonface.push_back(spec15.index_of.at(v));
    else
      face.push_back(spec15.index_of.at(v));
  }

  TeleportOutcome out{{}, 0, StateVector(1)};
  std::vector<uint8_t> outcomes(15, 0);
  // Non-face X readout first (descending so indices stay valid), tracking
  // where the face qubits land as the register shrinks.
  std::vector<int> face_pos(face.begin(), face.end());
  std::vector<size_t> nonface_desc = nonface;
  std::sort(nonface_desc.rbegin(), nonface_desc.rend());
  for (size_t q : nonface_desc) {
    int o = psi.measure_and_remove(q, 'X', rng.uniform(0, 1, q));
    outcomes[q] = uint8_t(o);
    for (auto& f : face_pos)
      if (size_t(f) > q) --f;
  }
  // Append and encode the Steane target.
  size_t base = psi.num_qubits();
  for (int i = 0; i < 7; ++i) psi.append_qubit();
  {
    // replay the Steane encoder on the appended qubits
    for (const auto& ins : enc7.circuit.instructions()) {
      if (ins.op == Op::H)
        for (auto q : ins.targets) psi.apply_h(base + q);
      if (ins.op == Op::CNOT)
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          psi.apply_cnot(base + ins.targets[i], base + ins.targets[i + 1]);
    }
  }
  // Transversal CZ between the face and the Steane block: vertex v of the
  // face pairs with the same vertex of the 3-cube.
  auto spec7 = detail::build_hypercube(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
  for (int v : spec7.vertices) {
    size_t src = size_t(face_pos[std::distance(
        face.begin(), std::find(face.begin(), face.end(), spec15.index_of.at(v)))]);
    psi.apply_cz(src, base + spec7.index_of.at(v));
  }
  // X readout of the remaining source qubits (descending).
  std::vector<std::pair<size_t, size_t>> face_with_orig;  // (current pos, original index)
  for (size_t i = 0; i < face.size(); ++i) face_with_orig.emplace_back(face_pos[i], face[i]);
  std::sort(face_with_orig.rbegin(), face_with_orig.rend());
  for (auto& [pos, orig] : face_with_orig) {
    int o = psi.measure_and_remove(pos, 'X', rng.uniform(0, 2, orig));
    outcomes[orig] = uint8_t(o);
  }
  out.source_x_outcomes = outcomes;
  // Logical X of the source is the parity of all fifteen X outcomes.
  int m = 0;
  for (uint8_t o : outcomes) m ^= o;
  out.feedforward = m;
  // Feedforward: the teleported state is X_L^m H |psi_L>; undo the frame.
  if (m)
    for (size_t q = 0; q < 7; ++q) psi.apply_x(q);
  out.state = std::move(psi);
  return out;
}

}  // namespace

TeleportOutcome teleport_logical(int t_layers, uint64_t seed) {
  return teleport_impl(t_layers, seed, nullptr);
}

std::pair<double, double> teleport_chain_angles(const std::vector<int>& t_runs, uint64_t seed) {
  // The hypercube skeleton only prepares fixed logical states, so moving an
  // arbitrary qubit in and out of the codes is done by teleportation too:
  // teleport-encode into a fresh |0L> [[15,1,3]] block, apply the T layers,
  // teleport through the face onto the 2D block, then teleport back out
  // onto a bare qubit.
  auto enc15z = hypercube_encoder(HypercubeFamily::REED_MULLER_15_1_3, Puncture::BOTTOM, 'Z');
  auto enc7 = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
  CounterRng rng(seed ^ 0x636861696eULL);

  StateVector cur(1);
  cur.apply_h(0);  // |+>
  for (size_t step = 0; step < t_runs.size(); ++step) {
    // Teleport-encode: |psi>_a (x) |0L>, logical CNOT(a -> block), X-measure a.
    StateVector psi = cur;  // qubit 0 carries the state
    {
      StateVector block = simulate(enc15z.circuit, rng.bits(step, 7, 0)).state;
      // join: qubit 0 = a, qubits 1..15 = block
      Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(int64_t(1) << 16);
      for (int64_t b = 0; b < block.amplitudes().size(); ++b)
        for (int64_t a = 0; a < 2; ++a)
          joint((b << 1) | a) = psi.amplitudes()(a) * block.amplitudes()(b);
      StateVector j(16);
      j.amplitudes() = std::move(joint);
      const auto& xl = enc15z.codes[0].logical_x[0];
      for (size_t q = 0; q < 15; ++q)
        if (xl.x_bit(q)) j.apply_cnot(0, 1 + q);
      int m = j.measure_and_remove(0, 'X', rng.uniform(step, 8, 0));
      if (m) j.apply_pauli([&] {
        PauliString z15(15);
        const auto& zl = enc15z.codes[0].logical_z[0];
        for (size_t q = 0; q < 15; ++q) z15.set_z(q, zl.z_bit(q));
        return z15;
      }());
      psi = std::move(j);
    }

    auto tele = teleport_impl(t_runs[step], rng.bits(step, 0, 0), &psi);

    // Teleport-decode the Steane block onto a fresh qubit: CX(logical -> a),
    // transversal X readout of the block, Z feedforward.
    StateVector s7 = std::move(tele.state);
    s7.append_qubit();  // index 7 = a
    const auto& zl7 = enc7.codes[0].logical_z[0];
    for (size_t q = 0; q < 7; ++q)
      if (zl7.z_bit(q)) s7.apply_cnot(q, 7);
    int m = 0;
    for (int q = 6; q >= 0; --q) m ^= s7.measure_and_remove(size_t(q), 'X', rng.uniform(step, 9, q));
    if (m) s7.apply_z(0);
    cur = std::move(s7);
  }
  double x = cur.expectation(PauliString::from_string("X")).real();
  double y = cur.expectation(PauliString::from_string("Y")).real();
  double z = cur.expectation(PauliString::from_string("Z")).real();
  double theta = std::acos(std::clamp(z, -1.0, 1.0));
  double phi = std::atan2(y, x);
  return {theta, phi};
}

double chsh(double p, ChshMode mode, uint64_t seed, int trajectories) {
  CounterRng rng(seed ^ 0x63687368ULL);
  auto evaluate = [&](StateVector psi, const std::vector<PauliString>& a_ops,
                      const std::vector<PauliString>& b_ops) {
    // S = E(X,T) + E(X,Tdag) + E(Y,T) - E(Y,Tdag)
    //   = sqrt(2) (<A_x B_x> + <A_y B_y>) for T-basis ops (X+-Y)/sqrt2.
    double axbx = psi.expectation(a_ops[0] * b_ops[0]).real();
    double ayby = psi.expectation(a_ops[1] * b_ops[1]).real();
    return std::sqrt(2.0) * (axbx + ayby);
  };
  auto run = [&](int traj) {
    if (mode == ChshMode::PHYSICAL) {
      StateVector psi(2);
      // |Psi+> = (|01> + |10>)/sqrt2 has <XX> = <YY> = +1.
      psi.apply_h(0);
      psi.apply_cnot(0, 1);
      psi.apply_x(1);
      if (p > 0)
        for (size_t q = 0; q < 2; ++q) {
          double u = rng.uniform(traj, 90, q);
          if (u < p) {
            double which = rng.uniform(traj, 91, q);
            if (which < 1.0 / 3)
              psi.apply_x(q);
            else if (which < 2.0 / 3)
              psi.apply_y(q);
            else
              psi.apply_z(q);
          }
        }
      PauliString ax = PauliString::from_string("XI"), ay = PauliString::from_string("YI");
      PauliString bx = PauliString::from_string("IX"), by = PauliString::from_string("IY");
      return evaluate(std::move(psi), {ax, ay}, {bx, by});
    }
    // Logical mode: two [[7,1,3]] blocks, CZ-linked, H then X on block A to
    // reach the logical |Psi+>.
    auto enc = hypercube_encoder(HypercubeFamily::STEANE_7_1_3, Puncture::BOTTOM, 'X');
    const auto& code = enc.codes[0];
    StateVector psi(14);
    for (int blk = 0; blk < 2; ++blk) {
      size_t base = size_t(blk) * 7;
      for (const auto& ins : enc.circuit.instructions()) {
        if (ins.op == Op::H)
          for (auto q : ins.targets) psi.apply_h(base + q);
        if (ins.op == Op::CNOT)
          for (size_t i = 0; i < ins.targets.size(); i += 2)
            psi.apply_cnot(base + ins.targets[i], base + ins.targets[i + 1]);
      }
    }
    for (size_t q = 0; q < 7; ++q) psi.apply_cz(q, 7 + q);  // logical CZ
    for (size_t q = 0; q < 7; ++q) psi.apply_h(q);          // logical H on A
    for (size_t q = 0; q < 7; ++q) psi.apply_x(q);          // logical X on A
    if (p > 0)
      for (size_t q = 0; q < 14; ++q) {
        double u = rng.uniform(traj, 80, q);
        if (u < p) {
          double which = rng.uniform(traj, 81, q);
          if (which < 1.0 / 3)
            psi.apply_x(q);
          else if (which < 2.0 / 3)
            psi.apply_y(q);
          else
            psi.apply_z(q);
        }
      }
    auto embed = [&](const PauliString& l, size_t base) {
      PauliString out(14);
      for (size_t q = 0; q < 7; ++q) {
        if (l.x_bit(q)) out.set_x(base + q, true);
        if (l.z_bit(q)) out.set_z(base + q, true);
      }
      out.set_phase_exponent(l.phase_exponent());
      return out;
    };
    PauliString ax = embed(code.logical_x[0], 0);
    PauliString az = embed(code.logical_z[0], 0);
    PauliString ay = (ax * az);
    ay.set_phase_exponent((ay.phase_exponent() + 1) & 3);  // Y_L = i X_L Z_L
    PauliString bx = embed(code.logical_x[0], 7);
    PauliString bz = embed(code.logical_z[0], 7);
    PauliString by = (bx * bz);
    by.set_phase_exponent((by.phase_exponent() + 1) & 3);
    return evaluate(std::move(psi), {ax, ay}, {bx, by});
  };
  if (p == 0) return run(0);
  double acc = 0;
  for (int t = 0; t < trajectories; ++t) acc += run(t);
  return acc / trajectories;
}

double min_region_entropy(const StabilizerCode& code, const GeneratedCircuit& encoder,
                          size_t region_size) {
  (void)encoder;
  // The maximally mixed logical state is (1/2^n) sum over the stabilizer
  // group, so S(rho_A) = |A| - log2 |{g in S : supp(g) in A}| exactly.
  // The subgroup rank comes from the kernel of the outside-region columns.
  auto rank_inside = [&](const std::vector<size_t>& region) {
    std::vector<bool> inside(code.n, false);
    for (size_t q : region) inside[q] = true;
    size_t ng = code.stabilizers.size();
    // rows = generators, columns = (x|z) bits OUTSIDE the region; kernel
    // combos are the subgroup supported inside.
    std::vector<size_t> outside;
    for (size_t q = 0; q < code.n; ++q)
      if (!inside[q]) outside.push_back(q);
    size_t cols = 2 * outside.size();
    std::vector<std::vector<uint8_t>> m(ng, std::vector<uint8_t>(cols, 0));
    for (size_t g = 0; g < ng; ++g)
      for (size_t i = 0; i < outside.size(); ++i) {
        m[g][2 * i] = code.stabilizers[g].x_bit(outside[i]);
        m[g][2 * i + 1] = code.stabilizers[g].z_bit(outside[i]);
      }
    // rank of the outside map
    size_t rank = 0;
    std::vector<std::vector<uint8_t>> rows = m;
    for (size_t c = 0; c < cols && rank < ng; ++c) {
      size_t pivot = SIZE_MAX;
      for (size_t r = rank; r < ng; ++r)
        if (rows[r][c]) {
          pivot = r;
          break;
        }
      if (pivot == SIZE_MAX) continue;
      std::swap(rows[pivot], rows[rank]);
      for (size_t r = 0; r < ng; ++r)
        if (r != rank && rows[r][c])
          for (size_t cc = 0; cc < cols; ++cc) rows[r][cc] ^= rows[rank][cc];
      ++rank;
    }
    return ng - rank;  // kernel dimension = log2 of the inside subgroup
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<size_t> region(region_size);
  for (size_t i = 0; i < region_size; ++i) region[i] = i;
  while (true) {
    best = std::min(best, double(region_size) - double(rank_inside(region)));
    size_t i = region_size;
    while (i > 0 && region[i - 1] == code.n - region_size + (i - 1)) --i;
    if (i == 0) break;
    ++region[i - 1];
    for (size_t j = i; j < region_size; ++j) region[j] = region[j - 1] + 1;
  }
  return best;
}

double logical_operator_entanglement(const GeneratedCircuit& encoder, const Circuit& block_op) {
  const auto& code = encoder.codes[0];
  size_t k = code.k;
  if (k > 6) throw std::invalid_argument("too many logicals");
  size_t dim = size_t(1) << k;
  // Logical basis states.
  std::vector<StateVector> basis;
  for (size_t c = 0; c < dim; ++c) {
    StateVector psi = simulate(encoder.circuit, 1).state;
    for (size_t i = 0; i < k; ++i)
      if ((c >> i) & 1) psi.apply_pauli(code.logical_x[i]);
    basis.push_back(std::move(psi));
  }
  // Logical unitary matrix elements <c'|U|c>.
  Eigen::MatrixXcd u(dim, dim);
  for (size_t c = 0; c < dim; ++c) {
    StateVector evolved = basis[c];
    for (const auto& ins : block_op.instructions()) {
      switch (ins.op) {
        case Op::H:
          for (auto q : ins.targets) evolved.apply_h(q);
          break;
        case Op::S:
          for (auto q : ins.targets) evolved.apply_s(q);
          break;
        case Op::CZ:
          for (size_t i = 0; i < ins.targets.size(); i += 2)
            evolved.apply_cz(ins.targets[i], ins.targets[i + 1]);
          break;
        case Op::CNOT:
          for (size_t i = 0; i < ins.targets.size(); i += 2)
            evolved.apply_cnot(ins.targets[i], ins.targets[i + 1]);
          break;
        case Op::PERMUTE: {
          std::vector<std::pair<uint32_t, uint32_t>> mapping;
          for (size_t i = 0; i < ins.targets.size(); i += 2)
            mapping.emplace_back(ins.targets[i], ins.targets[i + 1]);
          evolved.apply_permutation(mapping);
          break;
        }
        default:
          throw std::invalid_argument("unsupported block op");
      }
    }
    for (size_t c2 = 0; c2 < dim; ++c2)
      u(c2, c) = basis[c2].amplitudes().dot(evolved.amplitudes());
  }
  // Unitarity check: the op must preserve the code space.
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).norm() > 1e-8)
    throw std::invalid_argument("block op does not preserve the code space");

  // Max output entanglement over logical bipartitions for stabilizer product
  // inputs |0/1/+/-/i/-i>^k.
  double best = 0;
  size_t n_inputs = 1;
  for (size_t i = 0; i < k; ++i) n_inputs *= 6;
  Eigen::Vector2cd states1[6];
  states1[0] << 1, 0;
  states1[1] << 0, 1;
  states1[2] << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  states1[3] << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  states1[4] << 1 / std::sqrt(2.0), std::complex<double>(0, 1 / std::sqrt(2.0));
  states1[5] << 1 / std::sqrt(2.0), std::complex<double>(0, -1 / std::sqrt(2.0));
  // limit the sweep when k is large
  size_t cap = 4000;
  CounterRng rng(99);
  for (size_t trial = 0; trial < std::min(n_inputs, cap); ++trial) {
    size_t c = trial < n_inputs ? trial : rng.bits(trial, 0, 0) % n_inputs;
    Eigen::VectorXcd in = Eigen::VectorXcd::Ones(1);
    size_t rest = c;
    for (size_t i = 0; i < k; ++i) {
      Eigen::VectorXcd next(in.size() * 2);
      const auto& s1 = states1[rest % 6];
      rest /= 6;
      for (int64_t j = 0; j < in.size(); ++j) {
        next(j) = in(j) * s1(0);
        next(j + in.size()) = in(j) * s1(1);
      }
      in = next;
    }
    Eigen::VectorXcd outv = u * in;
    // entanglement across every bipartition
    StateVector tmp(k);
    tmp.amplitudes() = outv;
    for (size_t m = 1; m < (size_t(1) << k) - 1; ++m) {
      if (std::popcount(m) > int(k) / 2) continue;
      std::vector<size_t> region;
      for (size_t q = 0; q < k; ++q)
        if ((m >> q) & 1) region.push_back(q);
      best = std::max(best, entanglement_entropy(tmp, region));
    }
  }
  return best;
}

CoherentQecResult coherent_qec_sim(double theta_per_timestep, int qec_rounds, size_t shots,
                                   uint64_t seed) {
  if (qec_rounds < 0 || qec_rounds > 5) throw std::invalid_argument("0..5 round slots");
  auto gen = surface_code_memory(3, 1, 'X');
  const auto& code = gen.codes[0];
  LookupDecoder lookup(code);
  CounterRng rng(seed ^ 0x636f686572ULL);

  // Which of the five slots run checks, mirroring sparse schedules that
  // spread the active rounds over the fixed window.
  std::vector<std::vector<int>> active = {{}, {0}, {0, 3}, {0, 2, 4}, {0, 1, 3, 4}, {0, 1, 2, 3, 4}};
  const auto& slots = active[qec_rounds];

  CoherentQecResult res;
  std::vector<double> orth_samples;
  for (size_t shot = 0; shot < shots; ++shot) {
    StateVector psi(9);
    for (size_t q = 0; q < 9; ++q) psi.apply_h(q);  // |+L>
    for (int slot = 0; slot < 5; ++slot) {
      for (int layer = 0; layer < 4; ++layer)
        for (size_t q = 0; q < 9; ++q) psi.apply_rz(theta_per_timestep, q);
      if (std::find(slots.begin(), slots.end(), slot) != slots.end()) {
        for (size_t i = 0; i < code.stabilizers.size(); ++i)
          psi.measure_pauli(code.stabilizers[i], rng.uniform(shot, 10 + slot, i));
      }
    }
    // Ideal decode at the end.
    std::vector<uint8_t> syndrome(code.stabilizers.size());
    for (size_t i = 0; i < code.stabilizers.size(); ++i)
      syndrome[i] = uint8_t(psi.measure_pauli(code.stabilizers[i], rng.uniform(shot, 99, i)));
    auto corr = lookup.decode(syndrome);
    if (!corr.is_identity()) psi.apply_pauli(corr);
    PauliString ylog = code.logical_x[0] * code.logical_z[0];
    ylog.set_phase_exponent((ylog.phase_exponent() + 1) & 3);
    double x = psi.expectation(code.logical_x[0]).real();
    double y = psi.expectation(ylog).real();
    res.logical_error += 0.5 * (1 - x);
    res.same_basis += x;
    res.orthogonal_basis += y;
    orth_samples.push_back(y);
  }
  res.logical_error /= double(shots);
  res.same_basis /= double(shots);
  res.orthogonal_basis /= double(shots);
  double var = 0;
  for (double y : orth_samples) var += (y - res.orthogonal_basis) * (y - res.orthogonal_basis);
  res.orthogonal_sigma = std::sqrt(var / double(shots) / std::max<size_t>(1, shots - 1));
  return res;
}

}  // namespace qecw
