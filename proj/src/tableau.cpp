#include "qecw/tableau.hpp"

#include <utility>

namespace qecw {

Tableau::Tableau(size_t n) : n_(n) {
  size_t rows = 2 * n + 1;
  rw_ = (rows + 63) / 64;
  x_.assign(n * rw_, 0);
  z_.assign(n * rw_, 0);
  r_.assign(rw_, 0);
  for (size_t i = 0; i < n; ++i) {
    x_[i * rw_ + (i >> 6)] |= uint64_t(1) << (i & 63);
    size_t s = n + i;
    z_[i * rw_ + (s >> 6)] |= uint64_t(1) << (s & 63);
  }
}

void Tableau::set_bitr(size_t row, bool v) {
  if (v)
    r_[row >> 6] |= uint64_t(1) << (row & 63);
  else
    r_[row >> 6] &= ~(uint64_t(1) << (row & 63));
}

void Tableau::h(size_t q) {
  uint64_t* xq = &x_[q * rw_];
  uint64_t* zq = &z_[q * rw_];
  for (size_t w = 0; w < rw_; ++w) {
    r_[w] ^= xq[w] & zq[w];
    uint64_t t = xq[w];
    xq[w] = zq[w];
    zq[w] = t;
  }
}

void Tableau::s(size_t q) {
  uint64_t* xq = &x_[q * rw_];
  uint64_t* zq = &z_[q * rw_];
  for (size_t w = 0; w < rw_; ++w) {
    r_[w] ^= xq[w] & zq[w];
    zq[w] ^= xq[w];
  }
}

void Tableau::s_dag(size_t q) {
  // S_dag = Z S
  s(q);
  z(q);
}

void Tableau::x(size_t q) {
  uint64_t* zq = &z_[q * rw_];
  for (size_t w = 0; w < rw_; ++w) r_[w] ^= zq[w];
}

void Tableau::z(size_t q) {
  uint64_t* xq = &x_[q * rw_];
  for (size_t w = 0; w < rw_; ++w) r_[w] ^= xq[w];
}

void Tableau::y(size_t q) {
  uint64_t* xq = &x_[q * rw_];
  uint64_t* zq = &z_[q * rw_];
  for (size_t w = 0; w < rw_; ++w) r_[w] ^= xq[w] ^ zq[w];
}

void Tableau::cnot(size_t c, size_t t) {
  uint64_t* xc = &x_[c * rw_];
  uint64_t* zc = &z_[c * rw_];
  uint64_t* xt = &x_[t * rw_];
  uint64_t* zt = &z_[t * rw_];
  for (size_t w = 0; w < rw_; ++w) {
    r_[w] ^= xc[w] & zt[w] & ~(xt[w] ^ zc[w]);
    xt[w] ^= xc[w];
    zc[w] ^= zt[w];
  }
}

void Tableau::cz(size_t a, size_t b) {
  h(b);
  cnot(a, b);
  h(b);
}

void Tableau::swap_labels(size_t a, size_t b) {
  for (size_t w = 0; w < rw_; ++w) {
    std::swap(x_[a * rw_ + w], x_[b * rw_ + w]);
    std::swap(z_[a * rw_ + w], z_[b * rw_ + w]);
  }
}

void Tableau::apply_permutation(const std::vector<std::pair<size_t, size_t>>& mapping) {
  std::vector<uint64_t> xs, zs;
  for (auto& [from, to] : mapping) {
    (void)to;
    xs.insert(xs.end(), &x_[from * rw_], &x_[from * rw_] + rw_);
    zs.insert(zs.end(), &z_[from * rw_], &z_[from * rw_] + rw_);
  }
  for (size_t i = 0; i < mapping.size(); ++i) {
    size_t to = mapping[i].second;
    std::copy(&xs[i * rw_], &xs[i * rw_] + rw_, &x_[to * rw_]);
    std::copy(&zs[i * rw_], &zs[i * rw_] + rw_, &z_[to * rw_]);
  }
}

void Tableau::clear_row(size_t row) {
  uint64_t mask = ~(uint64_t(1) << (row & 63));
  size_t w = row >> 6;
  for (size_t q = 0; q < n_; ++q) {
    x_[q * rw_ + w] &= mask;
    z_[q * rw_ + w] &= mask;
  }
  r_[w] &= mask;
}

void Tableau::copy_row(size_t dst, size_t src) {
  clear_row(dst);
  size_t dw = dst >> 6, sw = src >> 6;
  uint64_t dbit = uint64_t(1) << (dst & 63), sbit = uint64_t(1) << (src & 63);
  for (size_t q = 0; q < n_; ++q) {
    if (x_[q * rw_ + sw] & sbit) x_[q * rw_ + dw] |= dbit;
    if (z_[q * rw_ + sw] & sbit) z_[q * rw_ + dw] |= dbit;
  }
  if (r_[sw] & sbit) r_[dw] |= dbit;
}

void Tableau::mult_row(size_t dst, size_t src) {
  // Phase arithmetic per Aaronson-Gottesman rowsum, accumulated as a power
  // of i which must come out 0 or 2 (mod 4) for commuting row products.
  int exp = 2 * int(bitr(dst)) + 2 * int(bitr(src));
  size_t dw = dst >> 6, sw = src >> 6;
  uint64_t dbit = uint64_t(1) << (dst & 63), sbit = uint64_t(1) << (src & 63);
  for (size_t q = 0; q < n_; ++q) {
    int x1 = (x_[q * rw_ + sw] & sbit) ? 1 : 0;
    int z1 = (z_[q * rw_ + sw] & sbit) ? 1 : 0;
    int x2 = (x_[q * rw_ + dw] & dbit) ? 1 : 0;
    int z2 = (z_[q * rw_ + dw] & dbit) ? 1 : 0;
    if (x1 && z1)
      exp += z2 - x2;
    else if (x1)
      exp += z2 * (2 * x2 - 1);
    else if (z1)
      exp += x2 * (1 - 2 * z2);
    if (x1) x_[q * rw_ + dw] ^= dbit;
    if (z1) z_[q * rw_ + dw] ^= dbit;
  }
  // Commuting Hermitian rows always land on 0 or 2. Destabilizer rows can
  // hit odd exponents; their signs are never read, so the truncation is fine.
  exp = ((exp % 4) + 4) % 4;
  set_bitr(dst, exp >= 2);
}

Tableau::MeasureResult Tableau::measure_z(size_t q, int forced) {
  const uint64_t* xq = &x_[q * rw_];
  // Any stabilizer row with an X on q makes the outcome random.
  size_t p = 2 * n_ + 1;
  for (size_t row = n_; row < 2 * n_; ++row) {
    if ((xq[row >> 6] >> (row & 63)) & 1) {
      p = row;
      break;
    }
  }
  if (p < 2 * n_) {
    bool outcome = forced > 0;
    for (size_t row = 0; row < 2 * n_; ++row) {
      if (row != p && ((xq[row >> 6] >> (row & 63)) & 1)) mult_row(row, p);
    }
    copy_row(p - n_, p);
    clear_row(p);
    z_[q * rw_ + (p >> 6)] |= uint64_t(1) << (p & 63);
    set_bitr(p, outcome);
    return {outcome, true};
  }
  // Deterministic: accumulate product of stabilizers indicated by destabilizers.
  size_t scratch = 2 * n_;
  clear_row(scratch);
  for (size_t i = 0; i < n_; ++i) {
    if ((xq[i >> 6] >> (i & 63)) & 1) mult_row(scratch, n_ + i);
  }
  return {bitr(scratch), false};
}

Tableau::MeasureResult Tableau::measure_x(size_t q, int forced) {
  h(q);
  auto res = measure_z(q, forced);
  h(q);
  return res;
}

void Tableau::reset_z(size_t q) {
  auto res = measure_z(q, 0);
  if (res.outcome) x(q);
}

}  // namespace qecw
