#include <bit>
#include <map>
#include <stdexcept>

#include "qecw/generators.hpp"

namespace qecw {

namespace detail {

HypercubeSpec build_hypercube(HypercubeFamily family, Puncture puncture, char prep_basis) {
  if (prep_basis != 'X' && prep_basis != 'Z') throw std::invalid_argument("prep basis must be X or Z");
  HypercubeSpec spec;
  spec.family = family;
  spec.prep_basis = prep_basis;
  spec.m = family == HypercubeFamily::STEANE_7_1_3 ? 3 : 4;
  int mask = (1 << spec.m) - 1;

  bool punctured = family != HypercubeFamily::CODE_16_6_4;
  if (punctured && puncture == Puncture::NONE)
    throw std::invalid_argument("this family requires removing the top or bottom vertex");
  if (!punctured && puncture != Puncture::NONE)
    throw std::invalid_argument("the full-cube family has no puncture");

  int source = (puncture == Puncture::TOP) ? mask : 0;
  spec.punctured_vertex = punctured ? source : -1;
  auto wt = [&](int v) { return std::popcount(unsigned(v ^ source)); };

  for (int v = 0; v <= mask; ++v) {
    if (v == spec.punctured_vertex) continue;
    spec.vertices.push_back(v);
  }
  for (size_t i = 0; i < spec.vertices.size(); ++i) spec.index_of[spec.vertices[i]] = uint32_t(i);

  if (punctured) {
    // k = 1 families: logical wire at the far corner. |0L> preparation
    // spreads X away from the source corner, |+L> toward it.
    spec.away_from_source = (prep_basis == 'Z');
    for (int v : spec.vertices) {
      int w = wt(v);
      if (prep_basis == 'Z') {
        if (w == 1)
          spec.plus_wires.push_back(v);
        else if (w == spec.m)
          spec.logical_wires.push_back(v);
        else
          spec.zero_wires.push_back(v);
      } else {
        if (w == spec.m) {
          spec.plus_wires.push_back(v);
          spec.logical_wires.push_back(v);
        } else if (w == spec.m - 1) {
          spec.plus_wires.push_back(v);
        } else {
          spec.zero_wires.push_back(v);
        }
      }
    }
  } else {
    spec.away_from_source = true;
    for (int v : spec.vertices) {
      int w = wt(v);
      if (w <= 1) {
        spec.plus_wires.push_back(v);
      } else if (w == 2) {
        spec.logical_wires.push_back(v);
        if (prep_basis == 'X')
          spec.plus_wires.push_back(v);
        else
          spec.zero_wires.push_back(v);
      } else {
        spec.zero_wires.push_back(v);
      }
    }
  }
  spec.source = source;
  return spec;
}

}  // namespace detail

Puncture default_puncture(HypercubeFamily family) {
  return family == HypercubeFamily::CODE_16_6_4 ? Puncture::NONE : Puncture::BOTTOM;
}

GeneratedCircuit hypercube_encoder(HypercubeFamily family, Puncture puncture, char prep_basis,
                                   const std::vector<uint32_t>& sign_flips) {
  detail::HypercubeSpec spec = detail::build_hypercube(family, puncture, prep_basis);
  size_t n = spec.vertices.size();

  GeneratedCircuit out;
  out.circuit = Circuit(uint32_t(n));
  Circuit& c = out.circuit;

  std::vector<uint32_t> all(n);
  for (uint32_t q = 0; q < n; ++q) all[q] = q;
  c.reset(all);
  std::vector<uint32_t> plus;
  for (int v : spec.plus_wires) plus.push_back(spec.index_of.at(v));
  std::sort(plus.begin(), plus.end());
  if (!plus.empty()) c.gate(Op::H, plus);
  c.tick();

  // One CNOT layer per axis; direction set by the preparation basis.
  for (int k = 0; k < spec.m; ++k) {
    if (family == HypercubeFamily::STEANE_7_1_3 && k == 3) break;  // fourth layer off
    Instruction layer;
    layer.op = Op::CNOT;
    for (int v : spec.vertices) {
      int lo = v & ~(1 << k), hi = v | (1 << k);
      if (v != lo) continue;  // enumerate each edge once from its low end
      if (!spec.index_of.count(lo) || !spec.index_of.count(hi)) continue;
      // "Low" relative to the source corner.
      int src_low = (spec.source >> k) & 1 ? hi : lo;
      int src_high = (spec.source >> k) & 1 ? lo : hi;
      int control = spec.away_from_source ? src_low : src_high;
      int target = control == lo ? hi : lo;
      layer.targets.push_back(spec.index_of.at(control));
      layer.targets.push_back(spec.index_of.at(target));
    }
    if (!layer.targets.empty()) c.append(layer);
    c.tick();
  }
  if (!sign_flips.empty()) {
    c.gate(Op::X, sign_flips);
    c.tick();
  }

  // Propagate every input wire's stabilizer through the entangling layers
  // with exact signs; the prepared state is stabilized by exactly this group.
  auto propagate = [&](PauliString p) {
    for (const auto& ins : c.instructions())
      if (ins.op == Op::CNOT || ins.op == Op::X) Circuit::conjugate_pauli(p, ins);
    return p;
  };
  std::vector<PauliString> state_gens;
  for (int v : spec.vertices) {
    bool is_plus = std::find(spec.plus_wires.begin(), spec.plus_wires.end(), v) != spec.plus_wires.end();
    state_gens.push_back(propagate(PauliString::single(n, spec.index_of.at(v), is_plus ? 'X' : 'Z')));
  }

  // The code itself in closed form: interval supports anchored to the source
  // corner. up(v) spreads away from the source, down(v) toward it.
  auto interval_mask = [&](int anchor, bool up) {
    std::vector<uint32_t> qs;
    for (int v : spec.vertices) {
      int rel_v = v ^ spec.source, rel_a = anchor ^ spec.source;
      bool inside = up ? (rel_v & rel_a) == rel_a : (rel_v & rel_a) == rel_v;
      if (inside) qs.push_back(spec.index_of.at(v));
    }
    return qs;
  };
  auto pauli_on = [&](const std::vector<uint32_t>& qs, char letter) {
    PauliString p(n);
    for (uint32_t q : qs) {
      if (letter == 'X') p.set_x(q, true);
      if (letter == 'Z') p.set_z(q, true);
    }
    return p;
  };

  StabilizerCode code;
  code.n = n;
  switch (family) {
    case HypercubeFamily::STEANE_7_1_3: {
      code.k = 1;
      code.d = 3;
      code.label = "steane_713";
      for (int k2 = 0; k2 < 3; ++k2) {
        int e = spec.source ^ (1 << k2);
        code.stabilizers.push_back(pauli_on(interval_mask(e, true), 'X'));
      }
      for (int k2 = 0; k2 < 3; ++k2) {
        int e = spec.source ^ (1 << k2);
        code.stabilizers.push_back(pauli_on(interval_mask(e, true), 'Z'));
      }
      code.logical_x = {pauli_on(interval_mask(spec.source, true), 'X')};
      code.logical_z = {pauli_on(interval_mask(spec.source, true), 'Z')};
      break;
    }
    case HypercubeFamily::REED_MULLER_15_1_3: {
      code.k = 1;
      code.d = 3;
      code.label = "reed_muller_1513";
      for (int k2 = 0; k2 < 4; ++k2) {
        int e = spec.source ^ (1 << k2);
        code.stabilizers.push_back(pauli_on(interval_mask(e, true), 'X'));
        code.stabilizers.push_back(pauli_on(interval_mask(e, true), 'Z'));
      }
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          int w = spec.source ^ (1 << a) ^ (1 << b);
          code.stabilizers.push_back(pauli_on(interval_mask(w, true), 'Z'));
        }
      code.logical_x = {pauli_on(interval_mask(spec.source, true), 'X')};
      code.logical_z = {pauli_on(interval_mask(spec.source, true), 'Z')};
      break;
    }
    case HypercubeFamily::CODE_16_6_4: {
      code.k = 6;
      code.d = 4;
      code.label = "hypercube_1664";
      code.stabilizers.push_back(pauli_on(interval_mask(0, true), 'X'));  // all qubits
      code.stabilizers.push_back(pauli_on(interval_mask(0, true), 'Z'));
      for (int k2 = 0; k2 < 4; ++k2) {
        code.stabilizers.push_back(pauli_on(interval_mask(1 << k2, true), 'X'));
        code.stabilizers.push_back(pauli_on(interval_mask(1 << k2, true), 'Z'));
      }
      for (int w : spec.logical_wires) {
        code.logical_x.push_back(pauli_on(interval_mask(w, true), 'X'));
        code.logical_z.push_back(pauli_on(interval_mask(w, false), 'Z'));
      }
      break;
    }
  }

  // Fix the generator signs from the prepared state: every stabilizer must
  // lie in the propagated group; its sign is the phase of that product.
  auto signed_in_group = [&](const PauliString& target) -> std::optional<PauliString> {
    // GF(2) expansion of target over state_gens, then recompute the product
    // with exact phases.
    size_t gn = state_gens.size();
    size_t words = 2 * ((n + 63) / 64);
    std::vector<std::vector<uint64_t>> rows(gn);
    std::vector<std::vector<uint64_t>> combo(gn);
    auto vec_of = [&](const PauliString& p) {
      std::vector<uint64_t> v = p.x_words();
      const auto& z = p.z_words();
      v.insert(v.end(), z.begin(), z.end());
      return v;
    };
    for (size_t i = 0; i < gn; ++i) {
      rows[i] = vec_of(state_gens[i]);
      combo[i].assign((gn + 63) / 64, 0);
      combo[i][i >> 6] |= uint64_t(1) << (i & 63);
    }
    std::vector<uint64_t> t = vec_of(target);
    std::vector<uint64_t> tcombo((gn + 63) / 64, 0);
    size_t rank = 0;
    for (size_t bit = 0; bit < words * 64 && rank < gn; ++bit) {
      size_t w = bit >> 6, b = bit & 63;
      if (w >= words) break;
      size_t pivot = SIZE_MAX;
      for (size_t r = rank; r < gn; ++r)
        if ((rows[r][w] >> b) & 1) {
          pivot = r;
          break;
        }
      if (pivot == SIZE_MAX) continue;
      std::swap(rows[pivot], rows[rank]);
      std::swap(combo[pivot], combo[rank]);
      for (size_t r = 0; r < gn; ++r) {
        if (r != rank && ((rows[r][w] >> b) & 1)) {
          for (size_t ww = 0; ww < words; ++ww) rows[r][ww] ^= rows[rank][ww];
          for (size_t ww = 0; ww < combo[r].size(); ++ww) combo[r][ww] ^= combo[rank][ww];
        }
      }
      if ((t[w] >> b) & 1) {
        for (size_t ww = 0; ww < words; ++ww) t[ww] ^= rows[rank][ww];
        for (size_t ww = 0; ww < tcombo.size(); ++ww) tcombo[ww] ^= combo[rank][ww];
      }
      ++rank;
    }
    for (uint64_t wv : t)
      if (wv) return std::nullopt;
    PauliString prod(n);
    for (size_t i = 0; i < gn; ++i)
      if ((tcombo[i >> 6] >> (i & 63)) & 1) prod = prod * state_gens[i];
    return prod;
  };

  for (auto& s : code.stabilizers) {
    auto sg = signed_in_group(s);
    if (!sg) throw std::logic_error("prepared state is not stabilized by the target code");
    s = *sg;
  }
  auto& prepared_logicals = prep_basis == 'Z' ? code.logical_z : code.logical_x;
  for (auto& l : prepared_logicals) {
    auto sg = signed_in_group(l);
    if (!sg) throw std::logic_error("prepared logical is not in the state group");
    l = *sg;
  }
  out.codes.push_back(std::move(code));

  out.geometry.data_qubits = all;
  for (size_t q = 0; q < n; ++q)
    out.geometry.coords[uint32_t(q)] = {double(spec.vertices[q] & 3),
                                        double(spec.vertices[q] >> 2)};
  out.circuit.metadata["family"] = out.codes[0].label;
  out.circuit.metadata["prep_basis"] = std::string(1, prep_basis);
  return out;
}

}  // namespace qecw
