#include "qecw/statevector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qecw/rng.hpp"

namespace qecw {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

StateVector::StateVector(size_t n) : n_(n) {
  if (n > 20) throw std::invalid_argument("statevector limited to 20 qubits");
  amp_ = Eigen::VectorXcd::Zero(int64_t(1) << n);
  amp_(0) = 1.0;
}

void StateVector::apply_unitary1(const Eigen::Matrix2cd& u, size_t q) {
  const int64_t bit = int64_t(1) << q;
  const int64_t dim = amp_.size();
  for (int64_t base = 0; base < dim; ++base) {
    if (base & bit) continue;
    auto a0 = amp_(base);
    auto a1 = amp_(base | bit);
    amp_(base) = u(0, 0) * a0 + u(0, 1) * a1;
    amp_(base | bit) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void StateVector::apply_h(size_t q) {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  apply_unitary1(h / std::sqrt(2.0), q);
}

void StateVector::apply_s(size_t q, bool dagger) {
  const int64_t bit = int64_t(1) << q;
  std::complex<double> phase = dagger ? -kI : kI;
  for (int64_t i = 0; i < amp_.size(); ++i)
    if (i & bit) amp_(i) *= phase;
}

void StateVector::apply_t(size_t q, bool dagger) {
  apply_rz(dagger ? -M_PI / 4 : M_PI / 4, q);
}

void StateVector::apply_rz(double angle, size_t q) {
  // diag(1, e^{i angle}) up to global phase.
  const int64_t bit = int64_t(1) << q;
  std::complex<double> phase = std::exp(kI * angle);
  for (int64_t i = 0; i < amp_.size(); ++i)
    if (i & bit) amp_(i) *= phase;
}

void StateVector::apply_x(size_t q) {
  const int64_t bit = int64_t(1) << q;
  for (int64_t i = 0; i < amp_.size(); ++i)
    if (!(i & bit)) std::swap(amp_(i), amp_(i | bit));
}

void StateVector::apply_y(size_t q) {
  const int64_t bit = int64_t(1) << q;
  for (int64_t i = 0; i < amp_.size(); ++i) {
    if (i & bit) continue;
    auto a0 = amp_(i);
    amp_(i) = -kI * amp_(i | bit);
    amp_(i | bit) = kI * a0;
  }
}

void StateVector::apply_z(size_t q) {
  const int64_t bit = int64_t(1) << q;
  for (int64_t i = 0; i < amp_.size(); ++i)
    if (i & bit) amp_(i) = -amp_(i);
}

void StateVector::apply_cz(size_t a, size_t b) {
  const int64_t ba = int64_t(1) << a, bb = int64_t(1) << b;
  for (int64_t i = 0; i < amp_.size(); ++i)
    if ((i & ba) && (i & bb)) amp_(i) = -amp_(i);
}

void StateVector::apply_cnot(size_t c, size_t t) {
  const int64_t bc = int64_t(1) << c, bt = int64_t(1) << t;
  for (int64_t i = 0; i < amp_.size(); ++i)
    if ((i & bc) && !(i & bt)) std::swap(amp_(i), amp_(i | bt));
}

void StateVector::apply_pauli(const PauliString& p) {
  if (p.num_qubits() != n_) throw std::invalid_argument("size mismatch");
  uint64_t xm = p.x_words().empty() ? 0 : p.x_words()[0];
  uint64_t zm = p.z_words().empty() ? 0 : p.z_words()[0];
  Eigen::VectorXcd out(amp_.size());
  std::complex<double> ph = p.phase();
  for (int64_t j = 0; j < amp_.size(); ++j) {
    double sign = (std::popcount(uint64_t(j) & zm) & 1) ? -1.0 : 1.0;
    out(int64_t(uint64_t(j) ^ xm)) = ph * sign * amp_(j);
  }
  amp_ = std::move(out);
}

void StateVector::apply_permutation(const std::vector<std::pair<uint32_t, uint32_t>>& mapping) {
  // Relabel qubits: bit `from` of the old index becomes bit `to`.
  std::vector<int> dest(n_);
  for (size_t q = 0; q < n_; ++q) dest[q] = int(q);
  for (auto& [from, to] : mapping) dest[from] = int(to);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amp_.size());
  for (int64_t j = 0; j < amp_.size(); ++j) {
    int64_t nj = 0;
    for (size_t q = 0; q < n_; ++q)
      if (j & (int64_t(1) << q)) nj |= int64_t(1) << dest[q];
    out(nj) = amp_(j);
  }
  amp_ = std::move(out);
}

std::complex<double> StateVector::expectation(const PauliString& p) const {
  if (p.num_qubits() != n_) throw std::invalid_argument("size mismatch");
  uint64_t xm = p.x_words().empty() ? 0 : p.x_words()[0];
  uint64_t zm = p.z_words().empty() ? 0 : p.z_words()[0];
  std::complex<double> acc = 0;
  std::complex<double> ph = p.phase();
  for (int64_t j = 0; j < amp_.size(); ++j) {
    double sign = (std::popcount(uint64_t(j) & zm) & 1) ? -1.0 : 1.0;
    acc += std::conj(amp_(int64_t(uint64_t(j) ^ xm))) * ph * sign * amp_(j);
  }
  return acc;
}

int StateVector::measure_pauli(const PauliString& p, double u) {
  double exp_val = expectation(p).real();
  double p_plus = std::clamp(0.5 * (1 + exp_val), 0.0, 1.0);
  int outcome = (u < p_plus) ? 0 : 1;
  // Project: (I +- P)/2, renormalize.
  Eigen::VectorXcd pv = amp_;
  {
    StateVector tmp = *this;
    tmp.apply_pauli(p);
    pv = tmp.amp_;
  }
  double sign = outcome == 0 ? 1.0 : -1.0;
  amp_ = 0.5 * (amp_ + sign * pv);
  double nrm = amp_.norm();
  if (nrm < 1e-12) throw std::runtime_error("projection annihilated the state");
  amp_ /= nrm;
  return outcome;
}

int StateVector::measure_qubit(size_t q, char basis, double u) {
  PauliString p = PauliString::single(n_, q, basis == 'X' ? 'X' : 'Z');
  return measure_pauli(p, u);
}

void StateVector::reset_qubit(size_t q, double u) {
  int outcome = measure_qubit(q, 'Z', u);
  if (outcome == 1) apply_x(q);
}

int StateVector::measure_and_remove(size_t q, char basis, double u) {
  int outcome = measure_qubit(q, basis, u);
  if (basis == 'X') {
    apply_h(q);  // rotate |+->/|-> onto |0>/|1>
  }
  // After collapse the qubit is in |outcome>; drop it.
  const int64_t bit = int64_t(1) << q;
  const int64_t low_mask = bit - 1;
  Eigen::VectorXcd out(amp_.size() / 2);
  for (int64_t j = 0; j < out.size(); ++j) {
    int64_t src = ((j & ~low_mask) << 1) | (j & low_mask) | (outcome ? bit : 0);
    out(j) = amp_(src);
  }
  amp_ = std::move(out);
  --n_;
  double nrm = amp_.norm();
  amp_ /= nrm;
  return outcome;
}

void StateVector::append_qubit() {
  if (n_ + 1 > 20) throw std::invalid_argument("statevector limited to 20 qubits");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amp_.size() * 2);
  out.head(amp_.size()) = amp_;
  amp_ = std::move(out);
  ++n_;
}

Eigen::MatrixXcd StateVector::reduced_density(const std::vector<size_t>& region) const {
  size_t ra = region.size();
  size_t rb = n_ - ra;
  std::vector<size_t> rest;
  {
    std::vector<bool> in_region(n_, false);
    for (size_t q : region) in_region[q] = true;
    for (size_t q = 0; q < n_; ++q)
      if (!in_region[q]) rest.push_back(q);
  }
  Eigen::MatrixXcd m(int64_t(1) << ra, int64_t(1) << rb);
  for (int64_t j = 0; j < amp_.size(); ++j) {
    int64_t a = 0, b = 0;
    for (size_t i = 0; i < ra; ++i)
      if (j & (int64_t(1) << region[i])) a |= int64_t(1) << i;
    for (size_t i = 0; i < rb; ++i)
      if (j & (int64_t(1) << rest[i])) b |= int64_t(1) << i;
    m(a, b) = amp_(j);
  }
  return m * m.adjoint();
}

double entropy_of_density(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam > 1e-14) s -= lam * std::log2(lam);
  }
  return s;
}

double entanglement_entropy(const StateVector& state, const std::vector<size_t>& region) {
  return entropy_of_density(state.reduced_density(region));
}

SimResult simulate(const Circuit& circuit, uint64_t seed) {
  CounterRng rng(seed);
  StateVector psi(circuit.num_qubits());
  std::vector<uint8_t> record;
  const auto& instructions = circuit.instructions();
  for (uint32_t idx = 0; idx < instructions.size(); ++idx) {
    const auto& ins = instructions[idx];
    switch (ins.op) {
      case Op::H:
        for (auto q : ins.targets) psi.apply_h(q);
        break;
      case Op::S:
        for (auto q : ins.targets) psi.apply_s(q);
        break;
      case Op::S_DAG:
        for (auto q : ins.targets) psi.apply_s(q, true);
        break;
      case Op::T:
        for (auto q : ins.targets) psi.apply_t(q);
        break;
      case Op::T_DAG:
        for (auto q : ins.targets) psi.apply_t(q, true);
        break;
      case Op::RZ:
        for (auto q : ins.targets) psi.apply_rz(ins.arg, q);
        break;
      case Op::X:
        for (auto q : ins.targets) psi.apply_x(q);
        break;
      case Op::Y:
        for (auto q : ins.targets) psi.apply_y(q);
        break;
      case Op::Z:
        for (auto q : ins.targets) psi.apply_z(q);
        break;
      case Op::CZ:
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          psi.apply_cz(ins.targets[i], ins.targets[i + 1]);
        break;
      case Op::CNOT:
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          psi.apply_cnot(ins.targets[i], ins.targets[i + 1]);
        break;
      case Op::MEASURE:
        for (size_t t = 0; t < ins.targets.size(); ++t) {
          int out = psi.measure_qubit(ins.targets[t], ins.basis, rng.uniform(0, idx, t));
          record.push_back(uint8_t(out));
        }
        break;
      case Op::RESET:
        for (size_t t = 0; t < ins.targets.size(); ++t)
          psi.reset_qubit(ins.targets[t], rng.uniform(0, idx, t));
        break;
      case Op::PAULI_ERROR: {
        double u = rng.uniform(0, idx, 0);
        double acc = 0;
        for (const auto& term : ins.terms) {
          acc += term.probability;
          if (u < acc) {
            for (size_t t = 0; t < ins.targets.size(); ++t) {
              char letter = term.letters[t];
              if (letter == 'X') psi.apply_x(ins.targets[t]);
              if (letter == 'Y') psi.apply_y(ins.targets[t]);
              if (letter == 'Z') psi.apply_z(ins.targets[t]);
            }
            break;
          }
        }
        break;
      }
      case Op::PERMUTE: {
        std::vector<std::pair<uint32_t, uint32_t>> mapping;
        for (size_t i = 0; i < ins.targets.size(); i += 2)
          mapping.emplace_back(ins.targets[i], ins.targets[i + 1]);
        psi.apply_permutation(mapping);
        break;
      }
      case Op::LOSS:
        throw std::invalid_argument("loss is a frame-sampler concept; not simulable here");
      default:
        break;
    }
  }
  return {std::move(psi), std::move(record)};
}

}  // namespace qecw
