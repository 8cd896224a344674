#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "qecw/generators.hpp"

namespace qecw::detail {

// Rotated-code layout on a cols x rows data grid. X semicircles sit on the
// left/right boundaries and Z semicircles on top/bottom, so X logicals run
// horizontally and Z logicals vertically.
struct RectLayout {
  int cols = 0, rows = 0;
  std::map<std::pair<int, int>, uint32_t> qubit_at;
  std::vector<std::pair<int, int>> coord_of;
  std::vector<uint32_t> data;
  std::vector<CheckInfo> checks;
  std::vector<std::pair<int, int>> check_center;

  std::vector<uint32_t> logical_x_row(int j = 0) const {  // row y = 2j+1
    std::vector<uint32_t> out;
    for (int i = 0; i < cols; ++i) out.push_back(qubit_at.at({2 * i + 1, 2 * j + 1}));
    return out;
  }
  std::vector<uint32_t> logical_z_col(int i = 0) const {  // column x = 2i+1
    std::vector<uint32_t> out;
    for (int j = 0; j < rows; ++j) out.push_back(qubit_at.at({2 * i + 1, 2 * j + 1}));
    return out;
  }
};

inline RectLayout build_rect(int cols, int rows, uint32_t index_offset = 0) {
  RectLayout lay;
  lay.cols = cols;
  lay.rows = rows;
  auto add_qubit = [&](int x, int y) {
    uint32_t idx = index_offset + uint32_t(lay.coord_of.size());
    lay.qubit_at[{x, y}] = idx;
    lay.coord_of.emplace_back(x, y);
    return idx;
  };
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i) lay.data.push_back(add_qubit(2 * i + 1, 2 * j + 1));
  for (int j = 0; j <= rows; ++j) {
    for (int i = 0; i <= cols; ++i) {
      int x = 2 * i, y = 2 * j;
      std::vector<uint32_t> nbrs;
      for (int dx : {-1, 1})
        for (int dy : {-1, 1}) {
          auto it = lay.qubit_at.find({x + dx, y + dy});
          if (it != lay.qubit_at.end()) nbrs.push_back(it->second);
        }
      char type = ((i + j) % 2 == 0) ? 'X' : 'Z';
      bool keep = false;
      if (nbrs.size() == 4) keep = true;
      if (nbrs.size() == 2) {
        if (type == 'X' && (i == 0 || i == cols)) keep = true;
        if (type == 'Z' && (j == 0 || j == rows)) keep = true;
      }
      if (!keep) continue;
      CheckInfo c;
      c.basis = type;
      c.data = nbrs;
      std::sort(c.data.begin(), c.data.end());
      c.ancilla = add_qubit(x, y);
      lay.checks.push_back(std::move(c));
      lay.check_center.emplace_back(x, y);
    }
  }
  return lay;
}

using Stroke = std::array<std::pair<int, int>, 4>;
inline constexpr Stroke kStrokeN{{{-1, 1}, {-1, -1}, {1, 1}, {1, -1}}};   // SW NW SE NE
inline constexpr Stroke kStrokeZ{{{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}};   // NW NE SW SE

inline Stroke stroke_for_round(CheckOrdering ordering, int round) {
  auto rev = [](const Stroke& s) { return Stroke{s[3], s[2], s[1], s[0]}; };
  if (ordering == CheckOrdering::SAME) return kStrokeZ;
  switch (round % 4) {
    case 0: return kStrokeN;
    case 1: return kStrokeZ;
    case 2: return rev(kStrokeZ);
    default: return rev(kStrokeN);
  }
}

// One stabilizer round over the given layouts, Z checks first, then X
// checks. Keeping the halves separate means products of same-type checks
// are read in clean slices, which is what makes superchecks around a lost
// qubit exactly conserved. Checks are measured controlled-Pauli style
// (ancilla in |+>, CNOT for X letters, CZ for Z letters); `dressed` data
// qubits have their letters flipped.
inline void emit_split_round(Circuit& c, Geometry& g, const std::vector<const RectLayout*>& lays,
                             CheckOrdering ordering, int round,
                             std::vector<std::vector<size_t>>& check_records,
                             const std::vector<uint8_t>* dressed = nullptr) {
  std::vector<uint32_t> all_anc;
  for (auto* lay : lays)
    for (const auto& ch : lay->checks) all_anc.push_back(ch.ancilla);
  c.reset(all_anc);
  c.tick();
  Stroke stroke = stroke_for_round(ordering, round);
  for (char half : {'Z', 'X'}) {
    std::vector<uint32_t> anc;
    for (auto* lay : lays)
      for (const auto& ch : lay->checks)
        if (ch.basis == half) anc.push_back(ch.ancilla);
    if (anc.empty()) continue;
    c.gate(Op::H, anc);
    c.tick();
    for (int layer = 0; layer < 4; ++layer) {
      Instruction cnots;
      cnots.op = Op::CNOT;
      Instruction czs;
      czs.op = Op::CZ;
      for (auto* lay : lays) {
        for (size_t ci = 0; ci < lay->checks.size(); ++ci) {
          if (lay->checks[ci].basis != half) continue;
          auto [cx, cy] = lay->check_center[ci];
          auto it = lay->qubit_at.find({cx + stroke[layer].first, cy + stroke[layer].second});
          if (it == lay->qubit_at.end()) continue;
          uint32_t dq = it->second;
          bool x_letter = half == 'X';
          if (dressed && (*dressed)[dq]) x_letter = !x_letter;
          auto& ins = x_letter ? cnots : czs;
          ins.targets.push_back(lay->checks[ci].ancilla);
          ins.targets.push_back(dq);
        }
      }
      if (!cnots.targets.empty()) c.append(cnots);
      if (!czs.targets.empty()) c.append(czs);
      c.tick();
    }
    c.gate(Op::H, anc);
    c.tick();
    int gi = 0;
    for (auto* lay : lays) {
      for (size_t ci = 0; ci < lay->checks.size(); ++ci, ++gi) {
        if (lay->checks[ci].basis != half) continue;
        size_t rec = c.measure('Z', {lay->checks[ci].ancilla});
        check_records[gi].push_back(rec);
        g.record_roles.push_back({RecordRole::ANCILLA, gi, round, int(lay->checks[ci].ancilla)});
      }
    }
    c.tick();
  }
}

}  // namespace qecw::detail
