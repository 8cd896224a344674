#include <map>
#include <set>
#include <stdexcept>

#include "qecw/generators.hpp"
#include "rect_layout.hpp"

namespace qecw {

using detail::RectLayout;



GeneratedCircuit transversal_cnot_bell(int d, int cnots_per_round, char final_basis,
                                       int logic_rounds, CheckOrdering ordering) {
  if (cnots_per_round < 1) throw std::invalid_argument("need at least one CNOT per round");
  if (logic_rounds < 1) throw std::invalid_argument("need at least one logic round");
  if (final_basis != 'X' && final_basis != 'Z') throw std::invalid_argument("basis must be X or Z");

  RectLayout a = detail::build_rect(d, d, 0);
  uint32_t block_size = uint32_t(a.coord_of.size());
  RectLayout b = detail::build_rect(d, d, block_size);

  GeneratedCircuit out;
  out.circuit = Circuit(2 * block_size);
  Circuit& c = out.circuit;
  Geometry& g = out.geometry;
  for (auto* lay : {&a, &b}) {
    g.data_qubits.insert(g.data_qubits.end(), lay->data.begin(), lay->data.end());
    g.checks.insert(g.checks.end(), lay->checks.begin(), lay->checks.end());
    double xoff = (lay == &b) ? 2.0 * d + 2 : 0.0;
    for (size_t q = 0; q < lay->coord_of.size(); ++q) {
      uint32_t idx = (lay == &b ? block_size : 0) + uint32_t(q);
      g.coords[idx] = {double(lay->coord_of[q].first) + xoff, double(lay->coord_of[q].second)};
    }
  }
  g.rounds = logic_rounds - 1;
  size_t nc = a.checks.size();

  std::vector<uint32_t> all_q(2 * block_size);
  for (uint32_t q = 0; q < 2 * block_size; ++q) all_q[q] = q;
  c.reset(all_q);
  c.gate(Op::H, a.data);  // A in |+L>, B in |0L>
  c.tick();

  auto logic_block = [&]() {
    for (int k = 0; k < cnots_per_round; ++k) {
      Instruction cnot;
      cnot.op = Op::CNOT;
      for (size_t i = 0; i < a.data.size(); ++i) {
        cnot.targets.push_back(a.data[i]);
        cnot.targets.push_back(b.data[i]);
      }
      c.append(cnot);
      c.tick();
    }
  };

  const bool parity = (cnots_per_round % 2) == 1;  // net CNOT between rounds
  std::vector<std::vector<size_t>> check_records(2 * nc);
  auto rec_of = [&](int block, size_t ci, int round) {
    return int64_t(check_records[block * nc + ci][round]);
  };

  // Detectors compare a check with its preimage under the intervening
  // transversal CNOTs: X_A -> X_A X_B and Z_B -> Z_A Z_B when the count
  // between rounds is odd.
  int qec_rounds = logic_rounds - 1;
  for (int r = 0; r < qec_rounds; ++r) {
    logic_block();
    detail::emit_split_round(c, g, {&a, &b}, ordering, r, check_records);
    for (size_t ci = 0; ci < nc; ++ci) {
      char basis = a.checks[ci].basis;
      if (r == 0) {
        // Deterministic round-1 combinations transported back to the
        // preparation: with odd CNOT parity both bases pair across blocks
        // (X_A X_B <- X_A, Z_A Z_B <- Z_B).
        if (parity) {
          c.detector({rec_of(0, ci, 0), rec_of(1, ci, 0)});
          g.detectors.push_back({int(basis == 'X' ? ci : nc + ci), -1, 0});
        } else if (basis == 'X') {
          c.detector({rec_of(0, ci, 0)});
          g.detectors.push_back({int(ci), -1, 0});
        } else {
          c.detector({rec_of(1, ci, 0)});
          g.detectors.push_back({int(nc + ci), -1, 0});
        }
      } else if (!parity) {
        c.detector({rec_of(0, ci, r - 1), rec_of(0, ci, r)});
        g.detectors.push_back({int(ci), r - 1, r});
        c.detector({rec_of(1, ci, r - 1), rec_of(1, ci, r)});
        g.detectors.push_back({int(nc + ci), r - 1, r});
      } else if (basis == 'X') {
        c.detector({rec_of(0, ci, r), rec_of(0, ci, r - 1), rec_of(1, ci, r - 1)});
        g.detectors.push_back({int(ci), r - 1, r});
        c.detector({rec_of(1, ci, r), rec_of(1, ci, r - 1)});
        g.detectors.push_back({int(nc + ci), r - 1, r});
      } else {
        c.detector({rec_of(0, ci, r), rec_of(0, ci, r - 1)});
        g.detectors.push_back({int(ci), r - 1, r});
        c.detector({rec_of(1, ci, r), rec_of(0, ci, r - 1), rec_of(1, ci, r - 1)});
        g.detectors.push_back({int(nc + ci), r - 1, r});
      }
    }
    c.tick();
  }
  logic_block();

  if (final_basis == 'X') {
    std::vector<uint32_t> both(a.data);
    both.insert(both.end(), b.data.begin(), b.data.end());
    c.gate(Op::H, both);
  }
  std::map<uint32_t, size_t> data_record;
  for (auto* lay : {&a, &b}) {
    for (uint32_t q : lay->data) {
      size_t rec = c.measure('Z', {q});
      data_record[q] = rec;
      g.record_roles.push_back({RecordRole::DATA, -1, qec_rounds, int(q)});
    }
  }
  for (int blk = 0; blk < 2; ++blk) {
    const RectLayout& lay = blk == 0 ? a : b;
    for (size_t ci = 0; ci < nc; ++ci) {
      if (lay.checks[ci].basis != final_basis) continue;
      std::vector<int64_t> recs;
      for (uint32_t q : lay.checks[ci].data) recs.push_back(int64_t(data_record.at(q)));
      if (qec_rounds > 0) {
        recs.push_back(rec_of(blk, ci, qec_rounds - 1));
        if (parity && final_basis == 'X' && blk == 0) recs.push_back(rec_of(1, ci, qec_rounds - 1));
        if (parity && final_basis == 'Z' && blk == 1) recs.push_back(rec_of(0, ci, qec_rounds - 1));
      }
      c.detector(recs);
      g.detectors.push_back({int(blk * nc + ci), qec_rounds - 1, -2});
    }
  }

  const bool total_odd = ((logic_rounds * cnots_per_round) % 2) == 1;
  std::vector<int64_t> obs;
  auto add_logical = [&](const RectLayout& lay, char basis) {
    auto support = basis == 'X' ? lay.logical_x_row(0) : lay.logical_z_col(0);
    for (uint32_t q : support) obs.push_back(int64_t(data_record.at(q)));
  };
  if (final_basis == 'X') {
    add_logical(a, 'X');
    if (total_odd) add_logical(b, 'X');
  } else {
    add_logical(b, 'Z');
    if (total_odd) add_logical(a, 'Z');
  }
  c.observable(0, obs);

  out.circuit.metadata["family"] = "transversal_bell";
  out.circuit.metadata["d"] = std::to_string(d);
  out.circuit.metadata["n_per_round"] = std::to_string(cnots_per_round);
  out.circuit.metadata["basis"] = std::string(1, final_basis);
  return out;
}

GeneratedCircuit lattice_surgery_zz(int d, int rounds, char final_basis) {
  if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (final_basis != 'X' && final_basis != 'Z') throw std::invalid_argument("basis must be X or Z");

  // Merged 2d x d rotated patch. The halves are the two logical blocks; the
  // checks straddling the middle are the seam. Z logicals run vertically, so
  // the product of the seam Z checks telescopes to Z1 Z2.
  RectLayout lay = detail::build_rect(2 * d, d, 0);
  GeneratedCircuit out;
  out.circuit = Circuit(uint32_t(lay.coord_of.size()));
  Circuit& c = out.circuit;
  Geometry& g = out.geometry;
  g.data_qubits = lay.data;
  g.checks = lay.checks;
  g.rounds = rounds;
  for (size_t q = 0; q < lay.coord_of.size(); ++q)
    g.coords[uint32_t(q)] = {double(lay.coord_of[q].first), double(lay.coord_of[q].second)};

  std::vector<uint32_t> all_q(lay.coord_of.size());
  for (uint32_t q = 0; q < all_q.size(); ++q) all_q[q] = q;
  c.reset(all_q);
  c.gate(Op::H, lay.data);
  c.tick();

  std::vector<std::vector<size_t>> check_records(lay.checks.size());
  for (int r = 0; r < rounds; ++r) {
    detail::emit_split_round(c, g, {&lay}, CheckOrdering::N_Z_ZR_NR, r, check_records);
    for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
      if (r == 0) {
        if (lay.checks[ci].basis == 'X') {
          c.detector({int64_t(check_records[ci][0])});
          g.detectors.push_back({int(ci), -1, 0});
        }
      } else {
        c.detector({int64_t(check_records[ci][r - 1]), int64_t(check_records[ci][r])});
        g.detectors.push_back({int(ci), r - 1, r});
      }
    }
    c.tick();
  }

  // Solve for the Z-check subset whose operator product equals the vertical
  // ZZ string pair (Z1 Z2) over GF(2).
  std::vector<size_t> seam_set;
  {
    std::vector<size_t> zidx;
    std::vector<PauliString> zops;
    for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
      if (lay.checks[ci].basis != 'Z') continue;
      PauliString p(lay.data.size());
      for (uint32_t q : lay.checks[ci].data) p.set_z(q, true);
      zops.push_back(p);
      zidx.push_back(ci);
    }
    PauliString target(lay.data.size());
    for (uint32_t q : lay.logical_z_col(d - 1)) target.set_z(q, true);
    for (uint32_t q : lay.logical_z_col(d)) target.set_z(q, true);

    // GF(2) elimination tracking member sets.
    size_t n_data = lay.data.size();
    std::vector<std::vector<uint64_t>> rows;
    std::vector<std::set<size_t>> member;
    for (size_t i = 0; i < zops.size(); ++i) {
      rows.push_back(zops[i].z_words());
      member.push_back({i});
    }
    std::vector<uint64_t> t = target.z_words();
    size_t rank_row = 0;
    for (size_t bit = 0; bit < n_data && rank_row < rows.size(); ++bit) {
      size_t w = bit >> 6, bshift = bit & 63;
      size_t pivot = SIZE_MAX;
      for (size_t r2 = rank_row; r2 < rows.size(); ++r2)
        if ((rows[r2][w] >> bshift) & 1) {
          pivot = r2;
          break;
        }
      if (pivot == SIZE_MAX) continue;
      std::swap(rows[pivot], rows[rank_row]);
      std::swap(member[pivot], member[rank_row]);
      for (size_t r2 = 0; r2 < rows.size(); ++r2) {
        if (r2 == rank_row) continue;
        if ((rows[r2][w] >> bshift) & 1) {
          for (size_t ww = 0; ww < rows[r2].size(); ++ww) rows[r2][ww] ^= rows[rank_row][ww];
          for (size_t mval : member[rank_row]) {
            if (member[r2].count(mval))
              member[r2].erase(mval);
            else
              member[r2].insert(mval);
          }
        }
      }
      if ((t[w] >> bshift) & 1) {
        for (size_t ww = 0; ww < t.size(); ++ww) t[ww] ^= rows[rank_row][ww];
        for (size_t mval : member[rank_row]) {
          if (std::find(seam_set.begin(), seam_set.end(), zidx[mval]) != seam_set.end())
            seam_set.erase(std::find(seam_set.begin(), seam_set.end(), zidx[mval]));
          else
            seam_set.push_back(zidx[mval]);
        }
      }
      ++rank_row;
    }
    for (uint64_t wv : t)
      if (wv) throw std::logic_error("seam product does not span the ZZ string");
    std::sort(seam_set.begin(), seam_set.end());
  }

  if (final_basis == 'Z') {
    std::vector<int64_t> obs0;
    for (size_t ci : seam_set) obs0.push_back(int64_t(check_records[ci][0]));
    c.observable(0, obs0);
    std::map<uint32_t, size_t> data_record;
    for (uint32_t q : lay.data) {
      size_t rec = c.measure('Z', {q});
      data_record[q] = rec;
      g.record_roles.push_back({RecordRole::DATA, -1, rounds, int(q)});
    }
    for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
      if (lay.checks[ci].basis != 'Z') continue;
      std::vector<int64_t> recs;
      for (uint32_t q : lay.checks[ci].data) recs.push_back(int64_t(data_record.at(q)));
      recs.push_back(int64_t(check_records[ci].back()));
      c.detector(recs);
      g.detectors.push_back({int(ci), rounds - 1, -2});
    }
    std::vector<int64_t> obs1;
    for (uint32_t q : lay.logical_z_col(d - 1)) obs1.push_back(int64_t(data_record.at(q)));
    for (uint32_t q : lay.logical_z_col(d)) obs1.push_back(int64_t(data_record.at(q)));
    c.observable(1, obs1);
    std::vector<int64_t> obs2;
    for (size_t ci : seam_set) obs2.push_back(int64_t(check_records[ci][0]));
    obs2.insert(obs2.end(), obs1.begin(), obs1.end());
    c.observable(2, obs2);
  } else {
    c.gate(Op::H, lay.data);
    std::map<uint32_t, size_t> data_record;
    for (uint32_t q : lay.data) {
      size_t rec = c.measure('Z', {q});
      data_record[q] = rec;
      g.record_roles.push_back({RecordRole::DATA, -1, rounds, int(q)});
    }
    for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
      if (lay.checks[ci].basis != 'X') continue;
      std::vector<int64_t> recs;
      for (uint32_t q : lay.checks[ci].data) recs.push_back(int64_t(data_record.at(q)));
      recs.push_back(int64_t(check_records[ci].back()));
      c.detector(recs);
      g.detectors.push_back({int(ci), rounds - 1, -2});
    }
    // Joint X1 X2: one horizontal X string through both halves.
    std::vector<int64_t> obs0;
    for (uint32_t q : lay.logical_x_row(0)) obs0.push_back(int64_t(data_record.at(q)));
    c.observable(0, obs0);
  }

  std::string seam_meta;
  for (size_t ci : seam_set) seam_meta += (seam_meta.empty() ? "" : ",") + std::to_string(ci);
  out.circuit.metadata["seam_checks"] = seam_meta;
  out.circuit.metadata["family"] = "lattice_surgery";
  out.circuit.metadata["d"] = std::to_string(d);
  out.circuit.metadata["basis"] = std::string(1, final_basis);
  return out;
}

std::vector<size_t> surgery_seam_records(const GeneratedCircuit& g) {
  std::vector<size_t> out;
  auto it = g.circuit.metadata.find("seam_checks");
  if (it == g.circuit.metadata.end()) return out;
  std::vector<int> seam;
  std::string cur;
  for (char ch : it->second + ",") {
    if (ch == ',') {
      if (!cur.empty()) seam.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  for (size_t r = 0; r < g.geometry.record_roles.size(); ++r) {
    const auto& role = g.geometry.record_roles[r];
    if (role.kind == RecordRole::ANCILLA &&
        std::find(seam.begin(), seam.end(), role.check) != seam.end())
      out.push_back(r);
  }
  return out;
}

}  // namespace qecw
