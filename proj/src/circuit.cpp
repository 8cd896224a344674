#include "qecw/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qecw {

bool Instruction::is_unitary() const {
  switch (op) {
    case Op::H:
    case Op::S:
    case Op::S_DAG:
    case Op::T:
    case Op::T_DAG:
    case Op::X:
    case Op::Y:
    case Op::Z:
    case Op::RZ:
    case Op::CZ:
    case Op::CNOT:
      return true;
    default:
      return false;
  }
}

void Circuit::validate_targets(const std::vector<uint32_t>& targets) const {
  for (uint32_t t : targets)
    if (t >= n_qubits_) throw std::invalid_argument("target out of range");
}

void Circuit::append(Instruction instr) {
  validate_targets(instr.targets);
  switch (instr.op) {
    case Op::CZ:
    case Op::CNOT:
      if (instr.targets.size() % 2) throw std::invalid_argument("two-qubit gate needs target pairs");
      for (size_t i = 0; i < instr.targets.size(); i += 2)
        if (instr.targets[i] == instr.targets[i + 1])
          throw std::invalid_argument("two-qubit gate on identical targets");
      break;
    case Op::MEASURE:
      num_measurements_ += instr.targets.size();
      break;
    case Op::DETECTOR:
    case Op::OBSERVABLE:
      for (int64_t r : instr.records)
        if (r < 0 || size_t(r) >= num_measurements_)
          throw std::invalid_argument("record reference does not resolve to an earlier measurement");
      if (instr.op == Op::DETECTOR)
        ++num_detectors_;
      else
        num_observables_ = std::max(num_observables_, size_t(instr.index) + 1);
      break;
    case Op::PERMUTE: {
      if (instr.targets.size() % 2) throw std::invalid_argument("PERMUTE needs from:to pairs");
      std::set<uint32_t> from, to;
      for (size_t i = 0; i < instr.targets.size(); i += 2) {
        from.insert(instr.targets[i]);
        to.insert(instr.targets[i + 1]);
      }
      if (from != to || from.size() != instr.targets.size() / 2)
        throw std::invalid_argument("PERMUTE is not a bijection on its domain");
      break;
    }
    default:
      break;
  }
  instructions_.push_back(std::move(instr));
}

void Circuit::gate(Op op, std::initializer_list<uint32_t> targets) {
  gate(op, std::vector<uint32_t>(targets));
}

void Circuit::gate(Op op, const std::vector<uint32_t>& targets) {
  Instruction i;
  i.op = op;
  i.targets = targets;
  append(std::move(i));
}

void Circuit::rz(double angle, const std::vector<uint32_t>& targets) {
  Instruction i;
  i.op = Op::RZ;
  i.arg = angle;
  i.targets = targets;
  append(std::move(i));
}

size_t Circuit::measure(char basis, const std::vector<uint32_t>& targets) {
  Instruction i;
  i.op = Op::MEASURE;
  i.basis = basis;
  i.targets = targets;
  size_t first = num_measurements_;
  append(std::move(i));
  return first;
}

void Circuit::reset(const std::vector<uint32_t>& targets) { gate(Op::RESET, targets); }

void Circuit::pauli_error1(double p, const std::vector<uint32_t>& targets) {
  if (p <= 0) return;
  static const char* letters1[3] = {"X", "Y", "Z"};
  for (uint32_t t : targets) {
    Instruction i;
    i.op = Op::PAULI_ERROR;
    i.targets = {t};
    for (auto* l : letters1) i.terms.push_back({l, p / 3});
    append(std::move(i));
  }
}

void Circuit::pauli_error2(double p, uint32_t a, uint32_t b) {
  if (p <= 0) return;
  Instruction i;
  i.op = Op::PAULI_ERROR;
  i.targets = {a, b};
  static const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v) {
      if (u == 0 && v == 0) continue;
      i.terms.push_back({std::string{letters[u], letters[v]}, p / 15});
    }
  append(std::move(i));
}

void Circuit::biased_error(char pauli, double p, const std::vector<uint32_t>& targets) {
  if (p <= 0) return;
  for (uint32_t t : targets) {
    Instruction i;
    i.op = Op::PAULI_ERROR;
    i.targets = {t};
    i.terms.push_back({std::string(1, pauli), p});
    append(std::move(i));
  }
}

void Circuit::loss(double p, const std::vector<uint32_t>& targets) {
  if (p <= 0) return;
  for (uint32_t t : targets) {
    Instruction i;
    i.op = Op::LOSS;
    i.arg = p;
    i.targets = {t};
    append(std::move(i));
  }
}

void Circuit::detector(const std::vector<int64_t>& records) {
  Instruction i;
  i.op = Op::DETECTOR;
  i.records = records;
  append(std::move(i));
}

void Circuit::observable(uint32_t idx, const std::vector<int64_t>& records) {
  Instruction i;
  i.op = Op::OBSERVABLE;
  i.index = idx;
  i.records = records;
  append(std::move(i));
}

void Circuit::tick() {
  Instruction i;
  i.op = Op::TICK;
  append(std::move(i));
}

void Circuit::permute(const std::vector<std::pair<uint32_t, uint32_t>>& mapping) {
  Instruction i;
  i.op = Op::PERMUTE;
  for (auto& [from, to] : mapping) {
    i.targets.push_back(from);
    i.targets.push_back(to);
  }
  append(std::move(i));
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::H: return "H";
    case Op::S: return "S";
    case Op::S_DAG: return "S_DAG";
    case Op::T: return "T";
    case Op::T_DAG: return "T_DAG";
    case Op::X: return "X";
    case Op::Y: return "Y";
    case Op::Z: return "Z";
    case Op::RZ: return "RZ";
    case Op::CZ: return "CZ";
    case Op::CNOT: return "CNOT";
    case Op::MEASURE: return "M";
    case Op::RESET: return "RESET";
    case Op::PAULI_ERROR: return "PAULI_ERROR";
    case Op::LOSS: return "LOSS";
    case Op::DETECTOR: return "DETECTOR";
    case Op::OBSERVABLE: return "OBSERVABLE";
    case Op::TICK: return "TICK";
    case Op::PERMUTE: return "PERMUTE";
  }
  return "?";
}

}  // namespace

std::string Circuit::to_text() const {
  std::ostringstream out;
  out << "QUBITS " << n_qubits_ << "\n";
  size_t measured = 0;
  for (const auto& ins : instructions_) {
    switch (ins.op) {
      case Op::RZ:
        out << "RZ " << fmt_double(ins.arg);
        for (auto t : ins.targets) out << ' ' << t;
        break;
      case Op::MEASURE:
        out << "M " << ins.basis;
        for (auto t : ins.targets) out << ' ' << t;
        measured += ins.targets.size();
        break;
      case Op::PAULI_ERROR: {
        // Uniform depolarizing channels round-trip through the compact
        // PAULI_ERROR1/2 forms; anything else is written term-by-term.
        bool uniform = true;
        size_t expect = ins.targets.size() == 1 ? 3 : 15;
        if (ins.terms.size() != expect) uniform = false;
        for (size_t k = 1; uniform && k < ins.terms.size(); ++k)
          if (ins.terms[k].probability != ins.terms[0].probability) uniform = false;
        if (uniform && ins.targets.size() <= 2) {
          out << "PAULI_ERROR" << ins.targets.size() << " p="
              << fmt_double(ins.terms[0].probability * expect);
          for (auto t : ins.targets) out << ' ' << t;
        } else {
          out << "PAULI_CHANNEL";
          for (const auto& term : ins.terms)
            out << ' ' << term.letters << ':' << fmt_double(term.probability);
          for (auto t : ins.targets) out << ' ' << t;
        }
        break;
      }
      case Op::LOSS:
        out << "LOSS p=" << fmt_double(ins.arg);
        for (auto t : ins.targets) out << ' ' << t;
        break;
      case Op::DETECTOR:
      case Op::OBSERVABLE:
        out << (ins.op == Op::DETECTOR ? "DETECTOR" : "OBSERVABLE");
        if (ins.op == Op::OBSERVABLE) out << ' ' << ins.index;
        for (int64_t r : ins.records) out << " rec[" << (r - int64_t(measured)) << "]";
        break;
      case Op::PERMUTE:
        out << "PERMUTE";
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          out << ' ' << ins.targets[i] << ':' << ins.targets[i + 1];
        break;
      default:
        out << op_name(ins.op);
        for (auto t : ins.targets) out << ' ' << t;
        break;
    }
    out << "\n";
  }
  return out.str();
}

namespace {

struct Tokenizer {
  std::vector<std::string> tokens;
  explicit Tokenizer(const std::string& line) {
    std::string cur;
    for (char c : line) {
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
  }
};

double parse_p(const std::string& tok, int line_no) {
  if (tok.rfind("p=", 0) != 0)
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected p=<value>");
  return std::stod(tok.substr(2));
}

int64_t parse_rec(const std::string& tok, size_t measured, int line_no) {
  if (tok.rfind("rec[", 0) != 0 || tok.back() != ']')
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected rec[-k]");
  int64_t rel = std::stoll(tok.substr(4, tok.size() - 5));
  int64_t abs = int64_t(measured) + rel;
  if (rel >= 0 || abs < 0)
    throw std::invalid_argument("line " + std::to_string(line_no) + ": record reference out of range");
  return abs;
}

}  // namespace

Circuit Circuit::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::optional<Circuit> circuit;
  while (std::getline(in, line)) {
    ++line_no;
    Tokenizer tz(line);
    auto& tok = tz.tokens;
    if (tok.empty()) continue;
    const std::string& name = tok[0];
    auto targets_from = [&](size_t start) {
      std::vector<uint32_t> ts;
      for (size_t i = start; i < tok.size(); ++i) ts.push_back(uint32_t(std::stoul(tok[i])));
      return ts;
    };
    if (name == "QUBITS") {
      if (circuit) throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate QUBITS");
      circuit = Circuit(uint32_t(std::stoul(tok.at(1))));
      continue;
    }
    if (!circuit) throw std::invalid_argument("circuit text must start with QUBITS");
    Circuit& c = *circuit;
    try {
      if (name == "H" || name == "S" || name == "S_DAG" || name == "T" || name == "T_DAG" ||
          name == "X" || name == "Y" || name == "Z" || name == "CZ" || name == "CNOT" ||
          name == "RESET" || name == "R") {
        Op op = name == "H"       ? Op::H
                : name == "S"     ? Op::S
                : name == "S_DAG" ? Op::S_DAG
                : name == "T"     ? Op::T
                : name == "T_DAG" ? Op::T_DAG
                : name == "X"     ? Op::X
                : name == "Y"     ? Op::Y
                : name == "Z"     ? Op::Z
                : name == "CZ"    ? Op::CZ
                : name == "CNOT"  ? Op::CNOT
                                  : Op::RESET;
        c.gate(op, targets_from(1));
      } else if (name == "RZ") {
        c.rz(std::stod(tok.at(1)), targets_from(2));
      } else if (name == "M") {
        if (tok.size() < 3 || (tok[1] != "X" && tok[1] != "Z"))
          throw std::invalid_argument("M needs a basis X or Z");
        c.measure(tok[1][0], targets_from(2));
      } else if (name == "PAULI_ERROR1") {
        double p = parse_p(tok.at(1), line_no);
        c.pauli_error1(p, targets_from(2));
      } else if (name == "PAULI_ERROR2") {
        double p = parse_p(tok.at(1), line_no);
        auto ts = targets_from(2);
        if (ts.size() != 2) throw std::invalid_argument("PAULI_ERROR2 needs two targets");
        c.pauli_error2(p, ts[0], ts[1]);
      } else if (name == "PAULI_CHANNEL") {
        Instruction ins;
        ins.op = Op::PAULI_ERROR;
        size_t i = 1;
        for (; i < tok.size() && tok[i].find(':') != std::string::npos; ++i) {
          auto pos = tok[i].find(':');
          ins.terms.push_back({tok[i].substr(0, pos), std::stod(tok[i].substr(pos + 1))});
        }
        ins.targets = targets_from(i);
        for (auto& t : ins.terms)
          if (t.letters.size() != ins.targets.size())
            throw std::invalid_argument("PAULI_CHANNEL term arity mismatch");
        c.append(std::move(ins));
      } else if (name == "X_ERROR" || name == "Y_ERROR" || name == "Z_ERROR") {
        double p = parse_p(tok.at(1), line_no);
        c.biased_error(name[0], p, targets_from(2));
      } else if (name == "LOSS") {
        double p = parse_p(tok.at(1), line_no);
        c.loss(p, targets_from(2));
      } else if (name == "DETECTOR") {
        std::vector<int64_t> recs;
        for (size_t i = 1; i < tok.size(); ++i)
          recs.push_back(parse_rec(tok[i], c.num_measurements(), line_no));
        c.detector(recs);
      } else if (name == "OBSERVABLE") {
        std::vector<int64_t> recs;
        for (size_t i = 2; i < tok.size(); ++i)
          recs.push_back(parse_rec(tok[i], c.num_measurements(), line_no));
        c.observable(uint32_t(std::stoul(tok.at(1))), recs);
      } else if (name == "TICK") {
        c.tick();
      } else if (name == "PERMUTE") {
        std::vector<std::pair<uint32_t, uint32_t>> mapping;
        for (size_t i = 1; i < tok.size(); ++i) {
          auto pos = tok[i].find(':');
          if (pos == std::string::npos) throw std::invalid_argument("PERMUTE needs from:to pairs");
          mapping.emplace_back(uint32_t(std::stoul(tok[i].substr(0, pos))),
                               uint32_t(std::stoul(tok[i].substr(pos + 1))));
        }
        c.permute(mapping);
      } else {
        throw std::invalid_argument("unknown instruction '" + name + "'");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("parse error at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!circuit) throw std::invalid_argument("empty circuit text");
  return *circuit;
}

void Circuit::conjugate_pauli(PauliString& p, const Instruction& ins) {
  auto x = [&](uint32_t q) { return p.x_bit(q); };
  auto z = [&](uint32_t q) { return p.z_bit(q); };
  auto add_phase = [&](int e) { p.set_phase_exponent((p.phase_exponent() + e) & 3); };
  switch (ins.op) {
    case Op::H:
      for (uint32_t q : ins.targets) {
        bool xb = x(q), zb = z(q);
        if (xb && zb) add_phase(2);
        p.set_x(q, zb);
        p.set_z(q, xb);
      }
      break;
    case Op::S:
      for (uint32_t q : ins.targets) {
        if (x(q)) {
          add_phase(1);
          p.set_z(q, !z(q));
        }
      }
      break;
    case Op::S_DAG:
      for (uint32_t q : ins.targets) {
        if (x(q)) {
          add_phase(3);
          p.set_z(q, !z(q));
        }
      }
      break;
    case Op::X:
      for (uint32_t q : ins.targets)
        if (z(q)) add_phase(2);
      break;
    case Op::Y:
      for (uint32_t q : ins.targets)
        if (x(q) != z(q)) add_phase(2);
      break;
    case Op::Z:
      for (uint32_t q : ins.targets)
        if (x(q)) add_phase(2);
      break;
    case Op::CNOT:
      for (size_t i = 0; i < ins.targets.size(); i += 2) {
        uint32_t c = ins.targets[i], t = ins.targets[i + 1];
        p.set_x(t, x(t) ^ x(c));
        p.set_z(c, z(c) ^ z(t));
      }
      break;
    case Op::CZ:
      for (size_t i = 0; i < ins.targets.size(); i += 2) {
        uint32_t a = ins.targets[i], b = ins.targets[i + 1];
        if (x(a) && x(b)) add_phase(2);
        p.set_z(a, z(a) ^ x(b));
        p.set_z(b, z(b) ^ x(a));
      }
      break;
    case Op::PERMUTE: {
      PauliString q(p.num_qubits());
      q.set_phase_exponent(p.phase_exponent());
      std::vector<bool> moved(p.num_qubits(), false);
      for (size_t i = 0; i < ins.targets.size(); i += 2) {
        uint32_t from = ins.targets[i], to = ins.targets[i + 1];
        q.set_x(to, p.x_bit(from));
        q.set_z(to, p.z_bit(from));
        moved[from] = true;
      }
      for (uint32_t u = 0; u < p.num_qubits(); ++u) {
        if (!moved[u]) {
          q.set_x(u, p.x_bit(u));
          q.set_z(u, p.z_bit(u));
        }
      }
      p = q;
      break;
    }
    default:
      throw std::invalid_argument("conjugation undefined for this instruction");
  }
}

bool Circuit::operator==(const Circuit& other) const {
  if (n_qubits_ != other.n_qubits_ || instructions_.size() != other.instructions_.size()) return false;
  for (size_t i = 0; i < instructions_.size(); ++i) {
    const auto& a = instructions_[i];
    const auto& b = other.instructions_[i];
    if (a.op != b.op || a.targets != b.targets || a.records != b.records || a.arg != b.arg ||
        a.basis != b.basis || a.index != b.index)
      return false;
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t k = 0; k < a.terms.size(); ++k)
      if (a.terms[k].letters != b.terms[k].letters ||
          a.terms[k].probability != b.terms[k].probability)
        return false;
  }
  return true;
}

}  // namespace qecw
