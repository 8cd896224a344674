#include "qecw/dem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qecw/rng.hpp"

namespace qecw {

namespace {

constexpr double kMaxMechanismP = 0.5;

struct Mask {
  std::vector<uint64_t> x, z;
  explicit Mask(size_t n) : x((n + 63) / 64, 0), z((n + 63) / 64, 0) {}
  bool gx(size_t q) const { return (x[q >> 6] >> (q & 63)) & 1; }
  bool gz(size_t q) const { return (z[q >> 6] >> (q & 63)) & 1; }
  void fx(size_t q) { x[q >> 6] ^= uint64_t(1) << (q & 63); }
  void fz(size_t q) { z[q >> 6] ^= uint64_t(1) << (q & 63); }
  void sx(size_t q, bool v) {
    if (gx(q) != v) fx(q);
  }
  void sz(size_t q, bool v) {
    if (gz(q) != v) fz(q);
  }
  void clear(size_t q) {
    sx(q, false);
    sz(q, false);
  }
};

struct RecordIncidence {
  std::vector<std::vector<uint32_t>> detectors_of_record;
  std::vector<uint64_t> observables_of_record;
  std::vector<uint32_t> instruction_of_record;
  std::vector<std::vector<int64_t>> records_of_detector;
};

RecordIncidence record_incidence(const Circuit& circuit) {
  RecordIncidence inc;
  inc.detectors_of_record.resize(circuit.num_measurements());
  inc.observables_of_record.assign(circuit.num_measurements(), 0);
  inc.instruction_of_record.resize(circuit.num_measurements());
  size_t rec = 0;
  uint32_t det = 0;
  const auto& instructions = circuit.instructions();
  for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
    const auto& ins = instructions[idx];
    if (ins.op == Op::MEASURE) {
      for (size_t t = 0; t < ins.targets.size(); ++t) inc.instruction_of_record[rec++] = idx;
    } else if (ins.op == Op::DETECTOR) {
      inc.records_of_detector.push_back(ins.records);
      for (int64_t r : ins.records) inc.detectors_of_record[size_t(r)].push_back(det);
      ++det;
    } else if (ins.op == Op::OBSERVABLE) {
      if (ins.index >= 64) throw std::invalid_argument("at most 64 observables supported");
      for (int64_t r : ins.records) inc.observables_of_record[size_t(r)] ^= uint64_t(1) << ins.index;
    }
  }
  return inc;
}

// Propagates a Pauli inserted just after instruction `pos` to the end of the
// circuit, collecting the set of flipped records. When `disabled_qubit` is
// set, instructions touching it are skipped from `disabled_from` until its
// next RESET, mirroring gate cancellation after a loss.
std::vector<size_t> propagate_flips(const Circuit& circuit, size_t pos, Mask frame,
                                    int disabled_qubit = -1, size_t disabled_from = 0) {
  std::vector<size_t> flips;
  const auto& instructions = circuit.instructions();
  size_t rec = 0;
  for (size_t i = 0; i <= pos && i < instructions.size(); ++i)
    if (instructions[i].op == Op::MEASURE) rec += instructions[i].targets.size();
  bool disabled_active = disabled_qubit >= 0 && disabled_from <= pos;
  for (size_t idx = pos + 1; idx < instructions.size(); ++idx) {
    const auto& ins = instructions[idx];
    if (disabled_qubit >= 0 && idx == disabled_from) disabled_active = true;
    auto skip = [&](uint32_t q) { return disabled_active && int(q) == disabled_qubit; };
    switch (ins.op) {
      case Op::H:
        for (auto q : ins.targets) {
          if (skip(q)) continue;
          bool xb = frame.gx(q), zb = frame.gz(q);
          frame.sx(q, zb);
          frame.sz(q, xb);
        }
        break;
      case Op::S:
      case Op::S_DAG:
        for (auto q : ins.targets)
          if (!skip(q) && frame.gx(q)) frame.fz(q);
        break;
      case Op::CNOT:
        for (size_t i = 0; i < ins.targets.size(); i += 2) {
          uint32_t c = ins.targets[i], t = ins.targets[i + 1];
          if (skip(c) || skip(t)) continue;
          if (frame.gx(c)) frame.fx(t);
          if (frame.gz(t)) frame.fz(c);
        }
        break;
      case Op::CZ:
        for (size_t i = 0; i < ins.targets.size(); i += 2) {
          uint32_t a = ins.targets[i], b = ins.targets[i + 1];
          if (skip(a) || skip(b)) continue;
          bool xa = frame.gx(a), xb = frame.gx(b);
          if (xb) frame.fz(a);
          if (xa) frame.fz(b);
        }
        break;
      case Op::MEASURE:
        for (size_t t = 0; t < ins.targets.size(); ++t) {
          uint32_t q = ins.targets[t];
          if (!skip(q)) {
            bool flip = ins.basis == 'Z' ? frame.gx(q) : frame.gz(q);
            if (flip) flips.push_back(rec);
          }
          ++rec;
        }
        break;
      case Op::RESET:
        for (auto q : ins.targets) {
          frame.clear(q);
          if (int(q) == disabled_qubit) disabled_active = false;
        }
        break;
      case Op::PERMUTE: {
        Mask nf = frame;
        for (size_t i = 0; i < ins.targets.size(); i += 2) {
          uint32_t f = ins.targets[i], to = ins.targets[i + 1];
          nf.sx(to, frame.gx(f));
          nf.sz(to, frame.gz(f));
        }
        frame = nf;
        break;
      }
      case Op::RZ:
      case Op::T:
      case Op::T_DAG:
        throw std::invalid_argument("detector error models need Clifford circuits");
      default:
        break;
    }
  }
  return flips;
}

std::pair<std::vector<uint32_t>, uint64_t> flips_to_signature(const std::vector<size_t>& flips,
                                                              const RecordIncidence& inc) {
  std::map<uint32_t, int> det_count;
  uint64_t obs = 0;
  for (size_t r : flips) {
    for (uint32_t d : inc.detectors_of_record[r]) det_count[d] ^= 1;
    obs ^= inc.observables_of_record[r];
  }
  std::vector<uint32_t> dets;
  for (auto& [d, c] : det_count)
    if (c) dets.push_back(d);
  return {dets, obs};
}

}  // namespace

void DetectorErrorModel::canonicalize() {
  std::map<std::pair<std::vector<uint32_t>, uint64_t>, Mechanism> merged;
  for (auto& m : mechanisms) {
    if (m.p < 0 || m.p > kMaxMechanismP + 1e-12)
      throw std::invalid_argument("mechanism probability outside [0, 0.5]");
    if (m.p == 0) continue;
    std::sort(m.detectors.begin(), m.detectors.end());
    if (m.detectors.empty() && m.observables == 0) continue;
    auto key = std::make_pair(m.detectors, m.observables);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, m);
    } else {
      double p1 = it->second.p, p2 = m.p;
      it->second.p = p1 + p2 - 2 * p1 * p2;
      it->second.provenance.insert(it->second.provenance.end(), m.provenance.begin(),
                                   m.provenance.end());
    }
  }
  mechanisms.clear();
  for (auto& [key, m] : merged) mechanisms.push_back(std::move(m));
}

std::string DetectorErrorModel::to_text() const {
  std::ostringstream out;
  out << "dem detectors " << num_detectors << " observables " << num_observables << "\n";
  for (const auto& m : mechanisms) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", m.p);
    out << "error(" << buf << ")";
    for (uint32_t d : m.detectors) out << " D" << d;
    for (size_t o = 0; o < 64; ++o)
      if ((m.observables >> o) & 1) out << " L" << o;
    out << "\n";
  }
  return out.str();
}

DetectorErrorModel DetectorErrorModel::from_text(const std::string& text) {
  DetectorErrorModel dem;
  std::istringstream in(text);
  std::string line;
  size_t max_d = 0, max_o = 0;
  bool has_any = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "dem") {
      std::string key;
      size_t v;
      while (ls >> key >> v) {
        if (key == "detectors") dem.num_detectors = v;
        if (key == "observables") dem.num_observables = v;
      }
      continue;
    }
    if (tok.rfind("error(", 0) != 0 || tok.back() != ')')
      throw std::invalid_argument("bad dem line: " + line);
    Mechanism m;
    m.p = std::stod(tok.substr(6, tok.size() - 7));
    while (ls >> tok) {
      if (tok[0] == 'D') {
        m.detectors.push_back(uint32_t(std::stoul(tok.substr(1))));
      } else if (tok[0] == 'L') {
        m.observables ^= uint64_t(1) << std::stoul(tok.substr(1));
      } else {
        throw std::invalid_argument("bad dem token: " + tok);
      }
    }
    for (uint32_t d : m.detectors) max_d = std::max(max_d, size_t(d) + 1);
    for (size_t o = 0; o < 64; ++o)
      if ((m.observables >> o) & 1) max_o = std::max(max_o, o + 1);
    has_any = true;
    dem.mechanisms.push_back(std::move(m));
  }
  if (!has_any && dem.num_detectors == 0) throw std::invalid_argument("empty dem text");
  dem.num_detectors = std::max(dem.num_detectors, max_d);
  dem.num_observables = std::max(dem.num_observables, max_o);
  dem.canonicalize();
  return dem;
}

void DetectorErrorModel::sample(uint64_t seed, size_t shot, std::vector<uint8_t>& detectors,
                                std::vector<uint8_t>& observables) const {
  CounterRng rng(seed ^ 0x64656d73616d70ULL);
  detectors.assign(num_detectors, 0);
  observables.assign(num_observables, 0);
  for (size_t m = 0; m < mechanisms.size(); ++m) {
    if (rng.uniform(shot, m, 0) < mechanisms[m].p) {
      for (uint32_t d : mechanisms[m].detectors) detectors[d] ^= 1;
      for (size_t o = 0; o < num_observables; ++o)
        if ((mechanisms[m].observables >> o) & 1) observables[o] ^= 1;
    }
  }
}

DetectorErrorModel build_dem(const Circuit& circuit) {
  DetectorErrorModel dem;
  dem.num_detectors = circuit.num_detectors();
  dem.num_observables = circuit.num_observables();
  RecordIncidence inc = record_incidence(circuit);
  const auto& instructions = circuit.instructions();
  for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
    const auto& ins = instructions[idx];
    if (ins.op != Op::PAULI_ERROR) continue;
    for (uint16_t t = 0; t < ins.terms.size(); ++t) {
      const auto& term = ins.terms[t];
      if (term.probability <= 0) continue;
      Mask frame(circuit.num_qubits());
      for (size_t k = 0; k < ins.targets.size(); ++k) {
        char letter = term.letters[k];
        if (letter == 'X' || letter == 'Y') frame.fx(ins.targets[k]);
        if (letter == 'Z' || letter == 'Y') frame.fz(ins.targets[k]);
      }
      auto flips = propagate_flips(circuit, idx, std::move(frame));
      auto [dets, obs] = flips_to_signature(flips, inc);
      if (dets.empty() && obs == 0) continue;
      Mechanism m;
      m.p = term.probability;
      m.detectors = std::move(dets);
      m.observables = obs;
      m.provenance.emplace_back(idx, t);
      dem.mechanisms.push_back(std::move(m));
    }
  }
  dem.canonicalize();
  return dem;
}

void DetectorTransform::apply(const std::vector<uint8_t>& det_in,
                              std::vector<uint8_t>& det_out) const {
  det_out.assign(num_groups(), 0);
  for (size_t d = 0; d < det_in.size(); ++d) {
    int g = group_of[d];
    if (g >= 0) det_out[g] ^= det_in[d];
  }
}

DetectorTransform build_supercheck_transform(const Circuit& circuit, const Geometry& geometry,
                                             const std::vector<uint32_t>& lost_data_qubits,
                                             const std::vector<size_t>& lost_ancilla_records) {
  DetectorTransform tr;
  tr.num_detectors_in = circuit.num_detectors();
  tr.group_of.assign(tr.num_detectors_in, -1);
  if (geometry.detectors.size() != tr.num_detectors_in)
    throw std::invalid_argument("geometry does not describe this circuit's detectors");

  // Union-find over checks, per basis.
  std::vector<int> parent(geometry.checks.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (uint32_t q : lost_data_qubits) {
    for (char basis : {'X', 'Z'}) {
      auto cs = geometry.checks_containing(q, basis);
      for (size_t i = 1; i < cs.size(); ++i) unite(cs[0], cs[i]);
    }
  }

  // Product support and validity per check component.
  std::map<int, std::set<uint32_t>> support;  // symmetric difference of member supports
  std::map<int, double> base_weight;
  for (size_t c = 0; c < geometry.checks.size(); ++c) {
    int root = find(int(c));
    auto& sup = support[root];
    for (uint32_t q : geometry.checks[c].data) {
      if (sup.count(q))
        sup.erase(q);
      else
        sup.insert(q);
    }
    base_weight[root] = std::max(base_weight[root], double(geometry.checks[c].data.size()));
  }
  std::set<uint32_t> lost_set(lost_data_qubits.begin(), lost_data_qubits.end());
  std::map<int, bool> component_valid;
  std::map<int, double> component_scale;
  for (auto& [root, sup] : support) {
    size_t live = 0;
    bool contains_lost = false;
    for (uint32_t q : sup) {
      if (lost_set.count(q))
        contains_lost = true;
      else
        ++live;
    }
    // A product still touching a lost qubit pairs to the boundary; it is
    // non-erroneous by construction and excluded.
    component_valid[root] = !contains_lost && live > 0;
    component_scale[root] = live > 0 ? base_weight[root] / double(live) : 0.0;
  }

  std::set<size_t> lost_anc(lost_ancilla_records.begin(), lost_ancilla_records.end());
  RecordIncidence inc = record_incidence(circuit);

  std::map<int, int> comp_size;
  for (size_t c = 0; c < geometry.checks.size(); ++c) ++comp_size[find(int(c))];

  // Group detectors by (check component, round slot). Non-check detectors
  // and singleton components keep their own slots.
  std::map<std::tuple<int, int, int>, int> group_index;
  auto new_group = [&](uint32_t d, double scale) {
    int g = int(tr.representative.size());
    tr.representative.push_back(d);
    tr.group_weight_scale.push_back(scale);
    tr.group_of[d] = g;
    return g;
  };
  for (uint32_t d = 0; d < tr.num_detectors_in; ++d) {
    const auto& info = geometry.detectors[d];
    bool touches_lost_anc = false;
    for (int64_t r : inc.records_of_detector[d])
      if (lost_anc.count(size_t(r))) touches_lost_anc = true;
    if (touches_lost_anc) continue;  // dropped: its ancilla readout is gone
    if (info.check < 0) {
      new_group(d, 1.0);
      continue;
    }
    int root = find(info.check);
    if (comp_size[root] == 1) {
      bool touches_lost = false;
      for (uint32_t q : geometry.checks[info.check].data)
        if (lost_set.count(q)) touches_lost = true;
      if (touches_lost) continue;  // boundary-paired: no partner to merge with
      new_group(d, 1.0);
      continue;
    }
    if (!component_valid[root]) continue;
    auto key = std::make_tuple(root, info.round_a, info.round_b);
    auto it = group_index.find(key);
    if (it == group_index.end())
      group_index.emplace(key, new_group(d, component_scale[root]));
    else
      tr.group_of[d] = it->second;
  }
  tr.observable_patches.assign(circuit.num_observables(), {});
  return tr;
}

ConditionedDem condition_dem_on_loss(const DetectorErrorModel& dem, const Circuit& circuit,
                                     const Geometry& geometry, const ShotBatch& batch, size_t shot) {
  const auto& instructions = circuit.instructions();
  RecordIncidence inc = record_incidence(circuit);

  // Observed losses from the shot's records.
  std::vector<uint32_t> lost_data;
  std::vector<size_t> lost_other;
  std::vector<std::pair<size_t, uint32_t>> lost_records;  // (record, qubit)
  for (size_t r = 0; r < batch.n_records; ++r) {
    if (batch.record(shot, r) != kLost) continue;
    const auto& role = geometry.record_roles.at(r);
    uint32_t q;
    {
      // qubit measured by this record
      const auto& ins = instructions[inc.instruction_of_record[r]];
      size_t base = r;
      while (base > 0 && inc.instruction_of_record[base - 1] == inc.instruction_of_record[r]) --base;
      q = ins.targets[r - base];
    }
    lost_records.emplace_back(r, q);
    if (role.kind == RecordRole::DATA)
      lost_data.push_back(q);
    else
      lost_other.push_back(r);
  }

  ConditionedDem out;
  out.transform = build_supercheck_transform(circuit, geometry, lost_data, lost_other);

  // Route observables around lost records: XOR in a detector that contains
  // the lost record so the unknown readout cancels.
  std::vector<uint64_t> obs_patch_parity(64, 0);
  {
    std::vector<std::set<size_t>> obs_lost(circuit.num_observables());
    for (auto& [r, q] : lost_records)
      for (size_t o = 0; o < circuit.num_observables(); ++o)
        if ((inc.observables_of_record[r] >> o) & 1) obs_lost[o].insert(r);
    for (size_t o = 0; o < circuit.num_observables(); ++o) {
      std::set<size_t> pending = obs_lost[o];
      int guard = 0;
      while (!pending.empty() && guard++ < 64) {
        size_t r = *pending.begin();
        // Prefer the patch detector with the fewest additional lost records.
        int best = -1;
        size_t best_cost = SIZE_MAX;
        for (uint32_t d : inc.detectors_of_record[r]) {
          size_t cost = 0;
          for (int64_t r2 : inc.records_of_detector[d])
            if (batch.record(shot, size_t(r2)) == kLost && size_t(r2) != r) ++cost;
          if (cost < best_cost) {
            best_cost = cost;
            best = int(d);
          }
        }
        if (best < 0) break;  // unroutable; leave as-is
        out.transform.observable_patches[o].push_back(uint32_t(best));
        // Update the pending set: records of the patch toggle membership.
        for (int64_t r2 : inc.records_of_detector[best]) {
          if (batch.record(shot, size_t(r2)) != kLost) continue;
          if (pending.count(size_t(r2)))
            pending.erase(size_t(r2));
          else
            pending.insert(size_t(r2));
        }
      }
    }
  }

  // Transform the base mechanisms into the merged detector space.
  auto transform_mechanism = [&](const Mechanism& m) {
    Mechanism t;
    t.p = m.p;
    t.provenance = m.provenance;
    std::map<int, int> parity;
    for (uint32_t d : m.detectors) {
      int g = out.transform.group_of[d];
      if (g >= 0) parity[g] ^= 1;
    }
    for (auto& [g, c] : parity)
      if (c) t.detectors.push_back(uint32_t(g));
    t.observables = m.observables;
    for (size_t o = 0; o < circuit.num_observables(); ++o) {
      int flip = 0;
      for (uint32_t pd : out.transform.observable_patches[o])
        if (std::binary_search(m.detectors.begin(), m.detectors.end(), pd)) flip ^= 1;
      if (flip) t.observables ^= uint64_t(1) << o;
    }
    return t;
  };

  out.dem.num_detectors = out.transform.num_groups();
  out.dem.num_observables = dem.num_observables;
  for (const auto& m : dem.mechanisms) out.dem.mechanisms.push_back(transform_mechanism(m));

  // Loss-origin hypotheses.
  for (auto& [record, q] : lost_records) {
    uint32_t m_instr = inc.instruction_of_record[record];
    // window: after the last RESET of q before m_instr
    size_t window_begin = 0;
    for (size_t i = 0; i < m_instr; ++i) {
      const auto& ins = instructions[i];
      if (ins.op == Op::RESET)
        for (auto t : ins.targets)
          if (t == q) window_begin = i + 1;
    }
    std::vector<std::pair<size_t, double>> origins;  // (loss instruction, rate)
    double total_rate = 0;
    for (size_t i = window_begin; i < m_instr; ++i) {
      const auto& ins = instructions[i];
      if (ins.op == Op::LOSS && ins.targets[0] == q && ins.arg > 0) {
        origins.emplace_back(i, ins.arg);
        total_rate += ins.arg;
      }
    }
    if (origins.empty())
      throw std::invalid_argument("observed loss on qubit " + std::to_string(q) +
                                  " but the circuit has no loss location for it");
    for (auto& [t0, rate] : origins) {
      double prior = rate / total_rate;
      // Each cancelled two-qubit gate dephases or flips the surviving
      // partner with probability 1/2.
      for (size_t i = t0 + 1; i < instructions.size(); ++i) {
        const auto& ins = instructions[i];
        if (ins.op == Op::RESET) {
          bool resets_q = false;
          for (auto t : ins.targets)
            if (t == q) resets_q = true;
          if (resets_q) break;
        }
        if (!ins.is_two_qubit_gate()) continue;
        for (size_t p = 0; p < ins.targets.size(); p += 2) {
          uint32_t a = ins.targets[p], b = ins.targets[p + 1];
          if (a != q && b != q) continue;
          uint32_t partner = a == q ? b : a;
          char pauli;
          if (ins.op == Op::CZ)
            pauli = 'Z';
          else
            pauli = (a == q) ? 'X' : 'Z';  // lost control flips target; lost target dephases control
          Mask frame(circuit.num_qubits());
          if (pauli == 'X' || pauli == 'Y') frame.fx(partner);
          if (pauli == 'Z' || pauli == 'Y') frame.fz(partner);
          auto flips = propagate_flips(circuit, i, std::move(frame), int(q), t0);
          auto [dets, obs] = flips_to_signature(flips, inc);
          Mechanism hm;
          hm.p = prior * 0.5;
          hm.detectors = std::move(dets);
          hm.observables = obs;
          hm.provenance.emplace_back(uint32_t(i), uint16_t(0xffff));
          out.dem.mechanisms.push_back(transform_mechanism(hm));
        }
      }
    }
  }

  out.dem.canonicalize();
  return out;
}

}  // namespace qecw
