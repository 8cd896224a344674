#include "qecw/code.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace qecw {

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << (valid ? "valid" : "invalid");
  for (auto& [i, j] : commutation_failures)
    out << "; stabilizers " << i << "," << j << " anticommute";
  for (auto& f : pairing_failures) out << "; " << f;
  if (!independent) out << "; generators dependent";
  if (distance_found) out << "; distance " << *distance_found;
  return out.str();
}

namespace {

// Symplectic vector over GF(2): x bits in even positions of words? Keep it
// simple: concatenated (x words | z words).
std::vector<uint64_t> sym_vector(const PauliString& p) {
  std::vector<uint64_t> v = p.x_words();
  const auto& z = p.z_words();
  v.insert(v.end(), z.begin(), z.end());
  return v;
}

struct F2Basis {
  std::vector<std::vector<uint64_t>> rows;  // echelonized
  std::vector<size_t> pivots;

  // Reduce v by the basis; returns true if v lies in the span.
  bool reduces_to_zero(std::vector<uint64_t> v) const {
    for (size_t r = 0; r < rows.size(); ++r) {
      size_t pw = pivots[r] >> 6, pb = pivots[r] & 63;
      if ((v[pw] >> pb) & 1)
        for (size_t w = 0; w < v.size(); ++w) v[w] ^= rows[r][w];
    }
    for (uint64_t w : v)
      if (w) return false;
    return true;
  }

  // Returns false if v was already in the span (not added).
  bool add(std::vector<uint64_t> v) {
    for (size_t r = 0; r < rows.size(); ++r) {
      size_t pw = pivots[r] >> 6, pb = pivots[r] & 63;
      if ((v[pw] >> pb) & 1)
        for (size_t w = 0; w < v.size(); ++w) v[w] ^= rows[r][w];
    }
    for (size_t bit = 0; bit < v.size() * 64; ++bit) {
      if ((v[bit >> 6] >> (bit & 63)) & 1) {
        rows.push_back(std::move(v));
        pivots.push_back(bit);
        // keep reduced form: eliminate this pivot from earlier rows
        for (size_t r = 0; r + 1 < rows.size(); ++r) {
          if ((rows[r][bit >> 6] >> (bit & 63)) & 1)
            for (size_t w = 0; w < rows.back().size(); ++w) rows[r][w] ^= rows.back()[w];
        }
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool in_pauli_span(const std::vector<PauliString>& generators, const PauliString& p) {
  F2Basis basis;
  for (const auto& g : generators) basis.add(sym_vector(g));
  return basis.reduces_to_zero(sym_vector(p));
}

std::optional<PauliString> solve_commutation(const std::vector<PauliString>& ops,
                                             const std::vector<bool>& anticommute, size_t n) {
  if (ops.size() != anticommute.size()) throw std::invalid_argument("size mismatch");
  // Unknown v = (x|z) of length 2n; constraint per op g: <v, g>_symp = b.
  // <v,g> = x_v.z_g + z_v.x_g, so the constraint row is (z_g | x_g).
  size_t cols = 2 * n;
  size_t m = ops.size();
  std::vector<std::vector<uint64_t>> rows(m);
  std::vector<uint8_t> rhs(m);
  size_t words = (n + 63) / 64;
  for (size_t i = 0; i < m; ++i) {
    rows[i] = ops[i].z_words();
    const auto& xw = ops[i].x_words();
    rows[i].insert(rows[i].end(), xw.begin(), xw.end());
    rhs[i] = anticommute[i];
  }
  // Gaussian elimination tracking pivot columns.
  std::vector<int64_t> pivot_of_col(cols, -1);
  size_t rank = 0;
  for (size_t col = 0; col < cols && rank < m; ++col) {
    size_t pw = col >> 6, pb = col & 63;
    size_t sel = rank;
    while (sel < m && !((rows[sel][pw] >> pb) & 1)) ++sel;
    if (sel == m) continue;
    std::swap(rows[sel], rows[rank]);
    std::swap(rhs[sel], rhs[rank]);
    for (size_t r = 0; r < m; ++r) {
      if (r != rank && ((rows[r][pw] >> pb) & 1)) {
        for (size_t w = 0; w < rows[r].size(); ++w) rows[r][w] ^= rows[rank][w];
        rhs[r] ^= rhs[rank];
      }
    }
    pivot_of_col[col] = int64_t(rank);
    ++rank;
  }
  for (size_t r = rank; r < m; ++r)
    if (rhs[r]) return std::nullopt;  // inconsistent
  PauliString out(n);
  for (size_t col = 0; col < cols; ++col) {
    if (pivot_of_col[col] >= 0 && rhs[pivot_of_col[col]]) {
      if (col < n)
        out.set_x(col, true);
      else
        out.set_z(col - n, true);
    }
  }
  return out;
}

std::optional<size_t> code_distance_bruteforce(const StabilizerCode& code, size_t max_weight,
                                               PauliSector sector) {
  if (code.n > 24) throw std::invalid_argument("brute-force distance limited to n <= 24");
  size_t n = code.n;
  // Single-word masks for speed.
  struct Sym {
    uint64_t x, z;
  };
  auto to_sym = [](const PauliString& p) {
    return Sym{p.x_words().empty() ? 0 : p.x_words()[0], p.z_words().empty() ? 0 : p.z_words()[0]};
  };
  std::vector<Sym> stabs;
  for (const auto& s : code.stabilizers) stabs.push_back(to_sym(s));

  // Echelon basis of the stabilizer group for membership tests, as 2n-bit words.
  std::vector<uint64_t> basis;
  auto pack = [n](Sym s) { return s.x | (s.z << n); };
  auto reduce = [&](uint64_t v) {
    for (uint64_t row : basis) {
      uint64_t high = uint64_t(1) << (63 - std::countl_zero(row));
      if (v & high) v ^= row;
    }
    return v;
  };
  for (auto& s : stabs) {
    uint64_t v = reduce(pack(s));
    if (v) {
      basis.push_back(v);
      std::sort(basis.begin(), basis.end(), std::greater<>());
    }
  }

  auto commutes_all = [&](Sym p) {
    for (const auto& s : stabs)
      if ((std::popcount(p.x & s.z) + std::popcount(p.z & s.x)) & 1) return false;
    return true;
  };

  int letters_begin = 0, letters_end = 3;  // 0=X,1=Y,2=Z
  if (sector == PauliSector::X_ONLY) letters_end = 1;
  if (sector == PauliSector::Z_ONLY) letters_begin = 2;

  size_t n_letters = size_t(letters_end - letters_begin);
  for (size_t w = 1; w <= max_weight && w <= n; ++w) {
    std::vector<size_t> idx(w);
    for (size_t i = 0; i < w; ++i) idx[i] = i;
    size_t combos = 1;
    for (size_t i = 0; i < w; ++i) combos *= n_letters;
    while (true) {
      for (size_t assignment = 0; assignment < combos; ++assignment) {
        Sym p{0, 0};
        size_t c = assignment;
        for (size_t i = 0; i < w; ++i) {
          int letter = letters_begin + int(c % n_letters);
          c /= n_letters;
          uint64_t bit = uint64_t(1) << idx[i];
          if (letter == 0 || letter == 1) p.x |= bit;
          if (letter == 1 || letter == 2) p.z |= bit;
        }
        if (!commutes_all(p)) continue;
        if (reduce(pack(p)) == 0) continue;  // in the stabilizer group
        return w;
      }
      size_t i = w;
      while (i > 0 && idx[i - 1] == n - w + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (size_t j = i; j < w; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

ValidationReport validate_code(const StabilizerCode& code) {
  ValidationReport report;
  const auto& S = code.stabilizers;
  for (size_t i = 0; i < S.size(); ++i)
    for (size_t j = i + 1; j < S.size(); ++j)
      if (!S[i].commutes(S[j])) {
        report.commutation_failures.emplace_back(i, j);
        report.valid = false;
      }

  if (S.size() != code.n - code.k) {
    report.pairing_failures.push_back("generator count != n-k");
    report.valid = false;
  }
  {
    F2Basis basis;
    size_t rank = 0;
    for (const auto& s : S) {
      std::vector<uint64_t> v = s.x_words();
      const auto& z = s.z_words();
      v.insert(v.end(), z.begin(), z.end());
      if (basis.add(std::move(v))) ++rank;
    }
    if (rank != S.size()) {
      report.independent = false;
      report.valid = false;
    }
  }

  auto check = [&](const char* what, bool ok) {
    if (!ok) {
      report.pairing_failures.push_back(what);
      report.valid = false;
    }
  };
  if (code.logical_x.size() != code.k || code.logical_z.size() != code.k) {
    check("logical operator count != k", false);
  } else {
    for (size_t i = 0; i < code.k; ++i) {
      std::ostringstream what;
      if (code.logical_x[i].commutes(code.logical_z[i])) {
        what << "logical_x[" << i << "] commutes with logical_z[" << i << "]";
        check(what.str().c_str(), false);
      }
      for (size_t j = 0; j < code.k; ++j) {
        if (i == j) continue;
        if (!code.logical_x[i].commutes(code.logical_z[j])) {
          what << "logical_x[" << i << "] anticommutes with logical_z[" << j << "]";
          check(what.str().c_str(), false);
        }
      }
      for (size_t j = 0; j < S.size(); ++j) {
        if (!code.logical_x[i].commutes(S[j]) || !code.logical_z[i].commutes(S[j])) {
          what << "logical pair " << i << " anticommutes with stabilizer " << j;
          check(what.str().c_str(), false);
        }
      }
    }
  }

  if (code.n <= 20 && report.valid) {
    auto d = code_distance_bruteforce(code, code.d);
    report.distance_found = d;
    if (!d || *d != code.d) report.valid = false;
  }
  return report;
}

}  // namespace qecw
