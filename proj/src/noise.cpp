#include "qecw/noise.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qecw {

void NoiseModel::validate() const {
  for (const Rates* r : {&single_qubit_gate, &two_qubit_gate, &idle_per_tick, &reset, &measure, &move}) {
    if (r->pauli < 0 || r->pauli > 1 || r->loss < 0 || r->loss > 1 || r->pauli + r->loss > 1)
      throw std::invalid_argument("noise rates must lie in [0,1] with pauli+loss <= 1");
  }
}

NoiseModel NoiseModel::named(const std::string& name) {
  NoiseModel m;
  m.name = name;
  if (name == "none") return m;
  if (name == "theory-p006") {
    // Uniform depolarizing at p = 0.6% on resets, measurements and
    // two-qubit gates, plus data idling while ancillas reset.
    m.reset.pauli = 0.006;
    m.measure.pauli = 0.006;
    m.two_qubit_gate.pauli = 0.006;
    m.idle_per_tick.pauli = 0.006;
    m.idle_scope = IdleScope::RESET_SEGMENTS;
    return m;
  }
  if (name == "exp-like") {
    // Illustrative circuit-level rates of the same order as a current
    // neutral-atom processor; not calibrated ground truth.
    m.single_qubit_gate.pauli = 0.001;
    m.two_qubit_gate.pauli = 0.004;
    m.two_qubit_gate.loss = 0.002;
    m.measure.pauli = 0.005;
    m.measure.loss = 0.003;
    m.reset.pauli = 0.002;
    m.idle_per_tick.pauli = 0.0005;
    return m;
  }
  if (name == "loss-heavy") {
    m.two_qubit_gate.pauli = 0.001;
    m.two_qubit_gate.loss = 0.01;
    m.measure.pauli = 0.001;
    return m;
  }
  throw std::invalid_argument("unknown noise model '" + name + "'");
}

NoiseModel NoiseModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise model file " + path);
  nlohmann::json j;
  in >> j;
  NoiseModel m;
  m.name = j.value("name", "custom");
  auto get = [&](const char* key, NoiseModel::Rates& r) {
    if (!j.contains(key)) return;
    r.pauli = j[key].value("pauli", 0.0);
    r.loss = j[key].value("loss", 0.0);
  };
  get("single_qubit_gate", m.single_qubit_gate);
  get("two_qubit_gate", m.two_qubit_gate);
  get("idle_per_tick", m.idle_per_tick);
  get("reset", m.reset);
  get("measure", m.measure);
  get("move", m.move);
  if (j.value("idle_scope", "all") == "reset") m.idle_scope = IdleScope::RESET_SEGMENTS;
  m.validate();
  return m;
}

std::string NoiseModel::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  auto put = [&](const char* key, const Rates& r) {
    j[key] = {{"pauli", r.pauli}, {"loss", r.loss}};
  };
  put("single_qubit_gate", single_qubit_gate);
  put("two_qubit_gate", two_qubit_gate);
  put("idle_per_tick", idle_per_tick);
  put("reset", reset);
  put("measure", measure);
  put("move", move);
  j["idle_scope"] = idle_scope == IdleScope::RESET_SEGMENTS ? "reset" : "all";
  return j.dump(2);
}

Circuit apply_noise(const Circuit& circuit, const NoiseModel& model) {
  model.validate();
  Circuit out(circuit.num_qubits());
  out.metadata = circuit.metadata;
  out.metadata["noise_model"] = model.name;

  // Qubits that appear anywhere are eligible for idle noise.
  std::set<uint32_t> active;
  for (const auto& ins : circuit.instructions())
    for (uint32_t t : ins.targets) active.insert(t);

  const auto& instructions = circuit.instructions();
  size_t i = 0;
  while (i < instructions.size()) {
    // Process one TICK segment [i, j).
    size_t j = i;
    while (j < instructions.size() && instructions[j].op != Op::TICK) ++j;
    std::set<uint32_t> touched;
    bool has_reset = false;
    for (size_t k = i; k < j; ++k) {
      const auto& ins = instructions[k];
      if (ins.op == Op::RESET) has_reset = true;
      switch (ins.op) {
        case Op::H:
        case Op::S:
        case Op::S_DAG:
        case Op::T:
        case Op::T_DAG:
        case Op::X:
        case Op::Y:
        case Op::Z:
        case Op::RZ: {
          out.append(ins);
          if (model.single_qubit_gate.pauli > 0) out.pauli_error1(model.single_qubit_gate.pauli, ins.targets);
          out.loss(model.single_qubit_gate.loss, ins.targets);
          for (auto t : ins.targets) touched.insert(t);
          break;
        }
        case Op::CZ:
        case Op::CNOT: {
          out.append(ins);
          for (size_t p = 0; p < ins.targets.size(); p += 2) {
            uint32_t a = ins.targets[p], b = ins.targets[p + 1];
            if (model.two_qubit_gate.pauli > 0) out.pauli_error2(model.two_qubit_gate.pauli, a, b);
            out.loss(model.two_qubit_gate.loss, {a, b});
            touched.insert(a);
            touched.insert(b);
          }
          break;
        }
        case Op::MEASURE: {
          // Flip error: the conjugate Pauli commutes with nothing measured.
          if (model.measure.pauli > 0)
            out.biased_error(ins.basis == 'Z' ? 'X' : 'Z', model.measure.pauli, ins.targets);
          out.loss(model.measure.loss, ins.targets);
          out.append(ins);
          for (auto t : ins.targets) touched.insert(t);
          break;
        }
        case Op::RESET: {
          out.append(ins);
          if (model.reset.pauli > 0) out.pauli_error1(model.reset.pauli, ins.targets);
          out.loss(model.reset.loss, ins.targets);
          for (auto t : ins.targets) touched.insert(t);
          break;
        }
        case Op::PERMUTE: {
          out.append(ins);
          if (model.move.pauli > 0) out.pauli_error1(model.move.pauli, ins.targets);
          out.loss(model.move.loss, ins.targets);
          for (auto t : ins.targets) touched.insert(t);
          break;
        }
        default:
          out.append(ins);
          break;
      }
    }
    bool idle_here = model.idle_scope == IdleScope::ALL_SEGMENTS || has_reset;
    if (idle_here && (model.idle_per_tick.pauli > 0 || model.idle_per_tick.loss > 0)) {
      std::vector<uint32_t> idle;
      for (uint32_t q : active)
        if (!touched.count(q)) idle.push_back(q);
      if (model.idle_per_tick.pauli > 0) out.pauli_error1(model.idle_per_tick.pauli, idle);
      out.loss(model.idle_per_tick.loss, idle);
    }
    if (j < instructions.size()) out.tick();
    i = j + 1;
  }
  return out;
}

}  // namespace qecw
