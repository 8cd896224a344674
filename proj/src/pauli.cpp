#include "qecw/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace qecw {

PauliString PauliString::from_string(const std::string& s) {
  size_t i = 0;
  uint8_t phase = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    if (s[i] == '-') phase = 2;
    ++i;
  }
  if (i < s.size() && s[i] == 'i') {
    phase = (phase + 1) & 3;
    ++i;
  }
  PauliString p(s.size() - i);
  p.phase_ = phase;
  for (size_t q = 0; i < s.size(); ++i, ++q) {
    switch (s[i]) {
      case 'I': break;
      case 'X': p.set_x(q, true); break;
      case 'Z': p.set_z(q, true); break;
      case 'Y':
        p.set_x(q, true);
        p.set_z(q, true);
        p.phase_ = (p.phase_ + 1) & 3;  // Y = i X Z
        break;
      default:
        throw std::invalid_argument("bad Pauli character: " + s.substr(i, 1));
    }
  }
  return p;
}

PauliString PauliString::single(size_t n, size_t qubit, char p) {
  PauliString out(n);
  if (qubit >= n) throw std::out_of_range("qubit out of range");
  switch (p) {
    case 'I': break;
    case 'X': out.set_x(qubit, true); break;
    case 'Z': out.set_z(qubit, true); break;
    case 'Y':
      out.set_x(qubit, true);
      out.set_z(qubit, true);
      out.phase_ = 1;
      break;
    default:
      throw std::invalid_argument("bad Pauli character");
  }
  return out;
}

std::complex<double> PauliString::phase() const {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[phase_];
}

void PauliString::set_x(size_t q, bool v) {
  if (v)
    x_[q >> 6] |= uint64_t(1) << (q & 63);
  else
    x_[q >> 6] &= ~(uint64_t(1) << (q & 63));
}

void PauliString::set_z(size_t q, bool v) {
  if (v)
    z_[q >> 6] |= uint64_t(1) << (q & 63);
  else
    z_[q >> 6] &= ~(uint64_t(1) << (q & 63));
}

size_t PauliString::weight() const {
  size_t w = 0;
  for (size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

bool PauliString::is_identity() const {
  for (size_t i = 0; i < x_.size(); ++i)
    if (x_[i] | z_[i]) return false;
  return true;
}

bool PauliString::commutes(const PauliString& other) const {
  if (n_ != other.n_) throw std::invalid_argument("size mismatch");
  size_t parity = 0;
  for (size_t i = 0; i < x_.size(); ++i) {
    parity ^= std::popcount(x_[i] & other.z_[i]);
    parity ^= std::popcount(z_[i] & other.x_[i]);
  }
  return (parity & 1) == 0;
}

PauliString PauliString::operator*(const PauliString& other) const {
  if (n_ != other.n_) throw std::invalid_argument("size mismatch");
  PauliString out(n_);
  // (i^a X^x1 Z^z1)(i^b X^x2 Z^z2) = i^(a+b) (-1)^{|z1 & x2|} X^(x1^x2) Z^(z1^z2)
  size_t swaps = 0;
  for (size_t i = 0; i < x_.size(); ++i) {
    swaps += std::popcount(z_[i] & other.x_[i]);
    out.x_[i] = x_[i] ^ other.x_[i];
    out.z_[i] = z_[i] ^ other.z_[i];
  }
  out.phase_ = (phase_ + other.phase_ + 2 * (swaps & 1)) & 3;
  return out;
}

bool PauliString::operator==(const PauliString& other) const {
  return n_ == other.n_ && phase_ == other.phase_ && x_ == other.x_ && z_ == other.z_;
}

std::vector<std::complex<double>> PauliString::to_dense() const {
  if (n_ > 12) throw std::invalid_argument("dense Pauli too large");
  size_t dim = size_t(1) << n_;
  std::vector<std::complex<double>> m(dim * dim, 0.0);
  // X^x Z^z: |j> -> (-1)^{z.j} |j ^ x>
  uint64_t xm = x_.empty() ? 0 : x_[0];
  uint64_t zm = z_.empty() ? 0 : z_[0];
  for (size_t j = 0; j < dim; ++j) {
    size_t k = j ^ xm;
    double sign = (std::popcount(j & zm) & 1) ? -1.0 : 1.0;
    m[k + dim * j] = phase() * sign;
  }
  return m;
}

std::string PauliString::str() const {
  // Displayed phase pulls one factor of -i per Y site out of the stored phase.
  size_t ys = 0;
  std::string body;
  body.reserve(n_);
  for (size_t q = 0; q < n_; ++q) {
    bool x = x_bit(q), z = z_bit(q);
    if (x && z) {
      body += 'Y';
      ++ys;
    } else if (x) {
      body += 'X';
    } else if (z) {
      body += 'Z';
    } else {
      body += 'I';
    }
  }
  static const char* pre[4] = {"+", "+i", "-", "-i"};
  return std::string(pre[(phase_ + 4 - (ys & 3)) & 3]) + body;
}

}  // namespace qecw
