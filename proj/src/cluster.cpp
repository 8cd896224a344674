#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>

#include "qecw/generators.hpp"

namespace qecw {

namespace {

// Row/column swap pair on the 4x4 vertex grid: affine shears on the axis
// pairs (1,2) and (3,4). Acts as two in-block logical CNOTs on the
// complement-paired logical wires.
int permute_vertex(int v) {
  int b1 = v & 1, b2 = (v >> 1) & 1, b3 = (v >> 2) & 1, b4 = (v >> 3) & 1;
  int nb2 = b2 ^ b1 ^ 1;
  int nb4 = b4 ^ b3 ^ 1;
  return b1 | (nb2 << 1) | (b3 << 2) | (nb4 << 3);
}

// Pushes a product of stabilizers, each inserted just after its instruction
// position, forward to the measurements. Letters matching the measurement
// basis turn into records; a basis mismatch or a reset under support fails.
std::optional<std::vector<int64_t>> push_product(
    const Circuit& circuit, std::vector<std::pair<size_t, PauliString>> insertions) {
  std::sort(insertions.begin(), insertions.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto& instructions = circuit.instructions();
  PauliString acc(circuit.num_qubits());
  std::vector<int64_t> records;
  size_t rec = 0;
  size_t next_ins = 0;
  for (size_t idx = 0; idx < instructions.size(); ++idx) {
    while (next_ins < insertions.size() && insertions[next_ins].first + 1 == idx) {
      acc = acc * insertions[next_ins].second;
      ++next_ins;
    }
    const auto& ins = instructions[idx];
    switch (ins.op) {
      case Op::H:
      case Op::S:
      case Op::S_DAG:
      case Op::X:
      case Op::Y:
      case Op::Z:
      case Op::CNOT:
      case Op::CZ:
      case Op::PERMUTE:
        Circuit::conjugate_pauli(acc, ins);
        break;
      case Op::MEASURE:
        for (size_t t = 0; t < ins.targets.size(); ++t) {
          uint32_t q = ins.targets[t];
          bool x = acc.x_bit(q), z = acc.z_bit(q);
          if (!x && !z) {
            ++rec;
            continue;
          }
          if ((ins.basis == 'X' && z) || (ins.basis == 'Z' && x)) return std::nullopt;
          records.push_back(int64_t(rec));
          acc.set_x(q, false);
          acc.set_z(q, false);
          ++rec;
        }
        break;
      case Op::RESET:
        for (uint32_t q : ins.targets)
          if (acc.x_bit(q) || acc.z_bit(q)) return std::nullopt;
        break;
      default:
        break;
    }
  }
  while (next_ins < insertions.size() && insertions[next_ins].first + 1 == instructions.size()) {
    acc = acc * insertions[next_ins].second;
    ++next_ins;
  }
  if (!acc.is_identity() || acc.phase_exponent() != 0 || next_ins != insertions.size())
    return std::nullopt;
  std::sort(records.begin(), records.end());
  return records;
}

}  // namespace

GeneratedCircuit cluster_state_circuit(HypercubeFamily family, ClusterGeometry geometry, int layers,
                                       const ClusterOptions& options) {
  if (layers < 2) throw std::invalid_argument("cluster needs at least two layers");
  int width = geometry == ClusterGeometry::TWO_D ? options.width : 1;
  if (width < 1) throw std::invalid_argument("width must be >= 1");
  if (options.gate == ClusterGate::CNOT && geometry == ClusterGeometry::TWO_D)
    throw std::invalid_argument("CNOT entangling is supported for the 1D cluster only");

  auto spec = detail::build_hypercube(family, default_puncture(family), 'X');
  GeneratedCircuit enc = hypercube_encoder(family, default_puncture(family), 'X');
  const StabilizerCode& code = enc.codes[0];
  size_t bn = code.n;
  int k = int(code.k);
  if (options.permutation_layer >= 0 && k == 1)
    throw std::invalid_argument("permutation requires a family with in-block logicals");

  uint32_t n_phys = uint32_t(2 * width * bn);
  GeneratedCircuit out;
  out.circuit = Circuit(n_phys);
  Circuit& c = out.circuit;
  ClusterStructure cs;
  cs.layers = layers;
  cs.width = width;
  cs.k = k;
  cs.block_n = bn;
  cs.block_basis.resize(size_t(layers) * width);
  cs.block_records.assign(size_t(layers) * width, {});

  auto group_base = [&](int t, int x) { return uint32_t(((t % 2) * width + x) * bn); };
  auto basis_of = [&](int t, int x) { return ((t + x) % 2 == 0) ? 'X' : 'Z'; };

  for (const auto& s : code.stabilizers) {
    std::vector<uint32_t> xs, zs;
    bool pure_x = true, pure_z = true;
    for (uint32_t q = 0; q < bn; ++q) {
      if (s.x_bit(q)) {
        xs.push_back(q);
        if (s.z_bit(q)) pure_x = false;
      }
      if (s.z_bit(q)) {
        zs.push_back(q);
        if (s.x_bit(q)) pure_z = false;
      }
    }
    if (pure_x && !xs.empty() && zs.empty()) cs.stab_x_support.push_back(xs);
    if (pure_z && !zs.empty() && xs.empty()) cs.stab_z_support.push_back(zs);
  }
  for (const auto& lx : code.logical_x) {
    std::vector<uint32_t> sup;
    for (uint32_t q = 0; q < bn; ++q)
      if (lx.x_bit(q)) sup.push_back(q);
    cs.logical_x_support.push_back(sup);
  }

  std::vector<uint32_t> plus_local;
  for (int v : spec.plus_wires) plus_local.push_back(spec.index_of.at(v));
  std::sort(plus_local.begin(), plus_local.end());

  // Instruction index right after each block's encoder, for observable
  // push-forward insertions (before any in-block permutation).
  std::vector<size_t> encode_end(size_t(layers) * width, 0);

  auto encode_block = [&](int t, int x) {
    uint32_t base = group_base(t, x);
    std::vector<uint32_t> all(bn);
    for (uint32_t q = 0; q < bn; ++q) all[q] = base + q;
    c.reset(all);
    std::vector<uint32_t> plus;
    for (uint32_t q : plus_local) plus.push_back(base + q);
    if (!plus.empty()) c.gate(Op::H, plus);
    c.tick();
    for (const auto& ins : enc.circuit.instructions()) {
      if (ins.op != Op::CNOT) continue;
      Instruction shifted = ins;
      for (auto& tq : shifted.targets) tq += base;
      c.append(shifted);
      c.tick();
    }
    encode_end[cs.block_of(t, x)] = c.instructions().size() - 1;
    if (options.permutation_layer >= 0 && t >= options.permutation_layer) {
      std::vector<std::pair<uint32_t, uint32_t>> mapping;
      for (int v : spec.vertices) {
        int pv = permute_vertex(v);
        if (pv == v) continue;
        mapping.emplace_back(base + spec.index_of.at(v), base + spec.index_of.at(pv));
      }
      c.permute(mapping);
      c.tick();
    }
  };

  auto entangle = [&](int t_old, int x_old, int t_new, int x_new) {
    uint32_t bo = group_base(t_old, x_old), bnw = group_base(t_new, x_new);
    Instruction g;
    g.op = options.gate == ClusterGate::CZ ? Op::CZ : Op::CNOT;
    for (uint32_t q = 0; q < bn; ++q) {
      if (options.gate == ClusterGate::CZ) {
        g.targets.push_back(bo + q);
        g.targets.push_back(bnw + q);
      } else {
        g.targets.push_back(bnw + q);  // newer block controls
        g.targets.push_back(bo + q);
      }
    }
    c.append(g);
    c.tick();
  };

  auto measure_block = [&](int t, int x) {
    uint32_t base = group_base(t, x);
    char basis = basis_of(t, x);
    cs.block_basis[cs.block_of(t, x)] = basis;
    auto& recs = cs.block_records[cs.block_of(t, x)];
    recs.resize(bn);
    for (uint32_t q = 0; q < bn; ++q) {
      size_t rec = c.measure(basis, {base + q});
      recs[q] = rec;
      out.geometry.record_roles.push_back({RecordRole::DATA, -1, t, int(base + q)});
    }
    c.tick();
  };

  for (int t = 0; t < layers; ++t) {
    if (t >= 2)
      for (int x = 0; x < width; ++x) measure_block(t - 2, x);
    for (int x = 0; x < width; ++x) encode_block(t, x);
    for (int x = 1; x < width; ++x) entangle(t, x - 1, t, x);
    if (t >= 1)
      for (int x = 0; x < width; ++x) entangle(t - 1, x, t, x);
  }
  for (int t = std::max(0, layers - 2); t < layers; ++t)
    for (int x = 0; x < width; ++x) measure_block(t, x);

  // Observables: push the prepared logical X stabilizers forward. CZ gives
  // the cluster stabilizers X(site) Z(neighbors); the CNOT chain telescopes,
  // so the insertion list covers all earlier layers.
  for (int t = 0; t < layers; ++t) {
    for (int x = 0; x < width; ++x) {
      if (basis_of(t, x) != 'X') continue;
      for (int li = 0; li < k; ++li) {
        std::vector<std::pair<size_t, PauliString>> insertions;
        auto embedded = [&](int tt, int xx) {
          PauliString p(n_phys);
          uint32_t base = group_base(tt, xx);
          const PauliString& lx = code.logical_x[li];
          for (uint32_t q = 0; q < bn; ++q) {
            if (lx.x_bit(q)) p.set_x(base + q, true);
            if (lx.z_bit(q)) p.set_z(base + q, true);
          }
          p.set_phase_exponent(lx.phase_exponent());
          return p;
        };
        if (options.gate == ClusterGate::CZ) {
          insertions.emplace_back(encode_end[cs.block_of(t, x)], embedded(t, x));
        } else {
          for (int s = 0; s <= t; ++s)
            insertions.emplace_back(encode_end[cs.block_of(s, x)], embedded(s, x));
        }
        auto recs = push_product(c, std::move(insertions));
        if (!recs) throw std::logic_error("cluster observable failed to reach the readout");
        uint32_t idx = uint32_t(cs.observable_site.size());
        c.observable(idx, *recs);
        cs.observable_site.emplace_back(cs.block_of(t, x), li);
      }
    }
  }

  out.geometry.data_qubits.resize(n_phys);
  for (uint32_t q = 0; q < n_phys; ++q) out.geometry.data_qubits[q] = q;
  out.cluster = std::move(cs);
  out.codes = enc.codes;
  out.circuit.metadata["family"] = "cluster_" + enc.codes[0].label;
  out.circuit.metadata["gate"] = options.gate == ClusterGate::CZ ? "CZ" : "CNOT";
  out.circuit.metadata["layers"] = std::to_string(layers);
  return out;
}

}  // namespace qecw
