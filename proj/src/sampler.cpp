#include "qecw/sampler.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <thread>

#include "qecw/rng.hpp"
#include "qecw/tableau.hpp"

namespace qecw {

namespace {

struct Reference {
  std::vector<uint8_t> values;  // per record: 0/1/kLost
};

// Shared helper: decides whether a unitary acts given the lost set, per the
// gate-off semantics (any lost participant turns the gate off).
struct LostSet {
  std::vector<uint8_t> lost;
  explicit LostSet(size_t n) : lost(n, 0) {}
  bool any(const std::vector<uint32_t>& targets, size_t begin, size_t count) const {
    for (size_t i = begin; i < begin + count; ++i)
      if (lost[targets[i]]) return true;
    return false;
  }
};

Reference compute_reference(const Circuit& circuit, const std::vector<LossEvent>& pattern) {
  Tableau tab(circuit.num_qubits());
  LostSet lost(circuit.num_qubits());
  Reference ref;
  ref.values.reserve(circuit.num_measurements());
  size_t pat_pos = 0;
  const auto& instructions = circuit.instructions();
  for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
    const auto& ins = instructions[idx];
    switch (ins.op) {
      case Op::H:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.h(q);
        break;
      case Op::S:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.s(q);
        break;
      case Op::S_DAG:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.s_dag(q);
        break;
      case Op::X:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.x(q);
        break;
      case Op::Y:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.y(q);
        break;
      case Op::Z:
        for (auto q : ins.targets)
          if (!lost.lost[q]) tab.z(q);
        break;
      case Op::CNOT:
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          if (!lost.any(ins.targets, i, 2)) tab.cnot(ins.targets[i], ins.targets[i + 1]);
        break;
      case Op::CZ:
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          if (!lost.any(ins.targets, i, 2)) tab.cz(ins.targets[i], ins.targets[i + 1]);
        break;
      case Op::MEASURE:
        for (auto q : ins.targets) {
          if (lost.lost[q]) {
            ref.values.push_back(kLost);
          } else {
            auto res = ins.basis == 'Z' ? tab.measure_z(q, 0) : tab.measure_x(q, 0);
            ref.values.push_back(res.outcome ? 1 : 0);
          }
        }
        break;
      case Op::RESET:
        for (auto q : ins.targets) {
          tab.reset_z(q);
          lost.lost[q] = 0;
        }
        break;
      case Op::LOSS:
        while (pat_pos < pattern.size() && pattern[pat_pos].instruction == idx) {
          uint32_t q = pattern[pat_pos].qubit;
          // Detach: trace out by measuring and forgetting.
          tab.measure_z(q, 0);
          lost.lost[q] = 1;
          ++pat_pos;
        }
        break;
      case Op::PERMUTE: {
        std::vector<std::pair<size_t, size_t>> mapping;
        std::vector<uint8_t> new_lost = lost.lost;
        for (size_t i = 0; i < ins.targets.size(); i += 2) {
          mapping.emplace_back(ins.targets[i], ins.targets[i + 1]);
          new_lost[ins.targets[i + 1]] = lost.lost[ins.targets[i]];
        }
        tab.apply_permutation(mapping);
        lost.lost = new_lost;
        break;
      }
      case Op::RZ:
      case Op::T:
      case Op::T_DAG:
        throw std::invalid_argument("frame sampler cannot simulate non-Clifford gates");
      default:
        break;  // noise, detectors, ticks
    }
  }
  return ref;
}

struct FrameMask {
  std::vector<uint64_t> x, z;
  explicit FrameMask(size_t n) : x((n + 63) / 64, 0), z((n + 63) / 64, 0) {}
  bool get_x(size_t q) const { return (x[q >> 6] >> (q & 63)) & 1; }
  bool get_z(size_t q) const { return (z[q >> 6] >> (q & 63)) & 1; }
  void flip_x(size_t q) { x[q >> 6] ^= uint64_t(1) << (q & 63); }
  void flip_z(size_t q) { z[q >> 6] ^= uint64_t(1) << (q & 63); }
  void set_x(size_t q, bool v) {
    if (get_x(q) != v) flip_x(q);
  }
  void set_z(size_t q, bool v) {
    if (get_z(q) != v) flip_z(q);
  }
};

}  // namespace

std::vector<size_t> ShotBatch::lost_records(size_t shot) const {
  std::vector<size_t> out;
  for (size_t r = 0; r < n_records; ++r)
    if (record(shot, r) == kLost) out.push_back(r);
  return out;
}

ShotBatch sample_shots(const Circuit& circuit, size_t n_shots, uint64_t master_seed,
                       const SampleOptions& options) {
  for (const auto& ins : circuit.instructions())
    if (ins.op == Op::RZ || ins.op == Op::T || ins.op == Op::T_DAG)
      throw std::invalid_argument("frame sampler cannot simulate non-Clifford gates");

  ShotBatch batch;
  batch.n_shots = n_shots;
  batch.n_records = circuit.num_measurements();
  batch.master_seed = master_seed;
  batch.records.assign(n_shots * batch.n_records, 0);
  batch.losses.assign(n_shots, {});

  CounterRng rng(master_seed);
  const auto& instructions = circuit.instructions();
  const size_t n = circuit.num_qubits();
  const uint64_t init_site = instructions.size();  // reserved site for initial scramble

  auto run_range = [&](size_t shot_begin, size_t shot_end) {
    std::map<std::vector<LossEvent>, Reference> cache;
    for (size_t shot = shot_begin; shot < shot_end; ++shot) {
      // Pass 1: loss pattern.
      std::vector<LossEvent> pattern;
      {
        LostSet lost(n);
        for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
          const auto& ins = instructions[idx];
          if (ins.op == Op::LOSS) {
            uint32_t q = ins.targets[0];
            if (!lost.lost[q] && rng.uniform(shot, idx, 0) < ins.arg) {
              lost.lost[q] = 1;
              pattern.push_back({idx, q});
            }
          } else if (ins.op == Op::RESET) {
            for (auto q : ins.targets) lost.lost[q] = 0;
          } else if (ins.op == Op::PERMUTE) {
            std::vector<uint8_t> nl = lost.lost;
            for (size_t i = 0; i < ins.targets.size(); i += 2)
              nl[ins.targets[i + 1]] = lost.lost[ins.targets[i]];
            lost.lost = nl;
          }
        }
      }
      auto it = cache.find(pattern);
      if (it == cache.end()) it = cache.emplace(pattern, compute_reference(circuit, pattern)).first;
      const Reference& ref = it->second;

      // Pass 2: frame propagation.
      FrameMask frame(n);
      LostSet lost(n);
      for (size_t q = 0; q < n; ++q)
        if (rng.coin(shot, init_site, q)) frame.flip_z(q);
      size_t rec = 0;
      size_t pat_pos = 0;
      uint8_t* out = &batch.records[shot * batch.n_records];
      for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
        const auto& ins = instructions[idx];
        switch (ins.op) {
          case Op::H:
            for (auto q : ins.targets) {
              if (lost.lost[q]) continue;
              bool xb = frame.get_x(q), zb = frame.get_z(q);
              frame.set_x(q, zb);
              frame.set_z(q, xb);
            }
            break;
          case Op::S:
          case Op::S_DAG:
            for (auto q : ins.targets)
              if (!lost.lost[q] && frame.get_x(q)) frame.flip_z(q);
            break;
          case Op::X:
          case Op::Y:
          case Op::Z:
            break;  // Pauli gates commute with the frame up to phase
          case Op::CNOT:
            for (size_t i = 0; i < ins.targets.size(); i += 2) {
              if (lost.any(ins.targets, i, 2)) continue;
              uint32_t c = ins.targets[i], t = ins.targets[i + 1];
              if (frame.get_x(c)) frame.flip_x(t);
              if (frame.get_z(t)) frame.flip_z(c);
            }
            break;
          case Op::CZ:
            for (size_t i = 0; i < ins.targets.size(); i += 2) {
              if (lost.any(ins.targets, i, 2)) continue;
              uint32_t a = ins.targets[i], b = ins.targets[i + 1];
              bool xa = frame.get_x(a), xb = frame.get_x(b);
              if (xb) frame.flip_z(a);
              if (xa) frame.flip_z(b);
            }
            break;
          case Op::PAULI_ERROR: {
            bool any_lost = lost.any(ins.targets, 0, ins.targets.size());
            if (any_lost && options.loss_semantics == LossGateSemantics::STRICT_REMOVAL) break;
            double u = rng.uniform(shot, idx, 0);
            double acc = 0;
            for (const auto& term : ins.terms) {
              acc += term.probability;
              if (u < acc) {
                for (size_t t = 0; t < ins.targets.size(); ++t) {
                  uint32_t q = ins.targets[t];
                  if (lost.lost[q]) continue;
                  char letter = term.letters[t];
                  if (letter == 'X' || letter == 'Y') frame.flip_x(q);
                  if (letter == 'Z' || letter == 'Y') frame.flip_z(q);
                }
                break;
              }
            }
            break;
          }
          case Op::LOSS: {
            uint32_t q = ins.targets[0];
            if (pat_pos < pattern.size() && pattern[pat_pos].instruction == idx &&
                pattern[pat_pos].qubit == q) {
              lost.lost[q] = 1;
              ++pat_pos;
            }
            break;
          }
          case Op::MEASURE:
            for (size_t t = 0; t < ins.targets.size(); ++t) {
              uint32_t q = ins.targets[t];
              if (lost.lost[q]) {
                out[rec] = kLost;
              } else {
                bool flip = ins.basis == 'Z' ? frame.get_x(q) : frame.get_z(q);
                out[rec] = uint8_t(ref.values[rec] ^ (flip ? 1 : 0));
                if (ins.basis == 'Z') {
                  if (rng.coin(shot, idx, t)) frame.flip_z(q);
                } else {
                  if (rng.coin(shot, idx, t)) frame.flip_x(q);
                }
              }
              ++rec;
            }
            break;
          case Op::RESET:
            for (size_t t = 0; t < ins.targets.size(); ++t) {
              uint32_t q = ins.targets[t];
              frame.set_x(q, false);
              frame.set_z(q, rng.coin(shot, idx, t));
              lost.lost[q] = 0;
            }
            break;
          case Op::PERMUTE: {
            std::vector<uint8_t> nl = lost.lost;
            FrameMask nf = frame;
            for (size_t i = 0; i < ins.targets.size(); i += 2) {
              uint32_t f = ins.targets[i], to = ins.targets[i + 1];
              nl[to] = lost.lost[f];
              nf.set_x(to, frame.get_x(f));
              nf.set_z(to, frame.get_z(f));
            }
            lost.lost = nl;
            frame = nf;
            break;
          }
          default:
            break;
        }
      }
      batch.losses[shot] = std::move(pattern);
    }
  };

  int threads = std::max(1, options.threads);
  if (threads == 1 || n_shots < 2) {
    run_range(0, n_shots);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (n_shots + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t b = std::min(n_shots, size_t(t) * chunk);
      size_t e = std::min(n_shots, b + chunk);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return batch;
}

ShotBatch inject_measurement_error(const ShotBatch& batch, double p_m, uint64_t seed,
                                   const std::vector<uint8_t>& record_is_flippable) {
  if (p_m < 0 || p_m > 1) throw std::invalid_argument("p_m must lie in [0,1]");
  if (record_is_flippable.size() != batch.n_records)
    throw std::invalid_argument("flippable mask size mismatch");
  ShotBatch out = batch;
  if (p_m == 0) return out;
  CounterRng rng(seed ^ 0x6d65617375726572ULL);
  for (size_t shot = 0; shot < batch.n_shots; ++shot) {
    for (size_t r = 0; r < batch.n_records; ++r) {
      if (!record_is_flippable[r]) continue;
      uint8_t v = out.records[shot * batch.n_records + r];
      if (v == kLost) continue;
      if (rng.uniform(shot, r, 0) < p_m) out.records[shot * batch.n_records + r] = v ^ 1;
    }
  }
  return out;
}

void compute_detector_bits(const Circuit& circuit, const ShotBatch& batch, size_t shot,
                           std::vector<uint8_t>& detectors, std::vector<uint8_t>& observables) {
  detectors.assign(circuit.num_detectors(), 0);
  observables.assign(circuit.num_observables(), 0);
  size_t d = 0;
  for (const auto& ins : circuit.instructions()) {
    if (ins.op == Op::DETECTOR) {
      uint8_t bit = 0;
      for (int64_t r : ins.records) {
        uint8_t v = batch.record(shot, size_t(r));
        bit ^= (v == 1);
      }
      detectors[d++] = bit;
    } else if (ins.op == Op::OBSERVABLE) {
      uint8_t bit = observables[ins.index];
      for (int64_t r : ins.records) {
        uint8_t v = batch.record(shot, size_t(r));
        bit ^= (v == 1);
      }
      observables[ins.index] = bit;
    }
  }
}

}  // namespace qecw
