#include <cmath>
#include <map>
#include <stdexcept>

#include "qecw/generators.hpp"
#include "rect_layout.hpp"

namespace qecw {

using detail::RectLayout;

GeneratedCircuit surface_code_memory(int d, int rounds, char basis, CheckOrdering ordering,
                                     SurfaceVariant variant) {
  if (d < 3 || d % 2 == 0) throw std::invalid_argument("surface code distance must be odd and >= 3");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (basis != 'X' && basis != 'Z') throw std::invalid_argument("basis must be X or Z");

  RectLayout lay = detail::build_rect(d, d);
  if (lay.checks.size() != size_t(d * d - 1)) throw std::logic_error("check count mismatch");
  const size_t n = lay.coord_of.size();
  GeneratedCircuit out;
  out.circuit = Circuit(uint32_t(n));
  Circuit& c = out.circuit;
  Geometry& g = out.geometry;
  g.data_qubits = lay.data;
  g.checks = lay.checks;
  g.rounds = rounds;
  for (size_t q = 0; q < n; ++q)
    g.coords[uint32_t(q)] = {double(lay.coord_of[q].first), double(lay.coord_of[q].second)};

  // XZZX dressing: one data sublattice is H-conjugated at preparation and
  // readout; its check letters flip. The detector structure is unchanged.
  std::vector<uint8_t> dressed(n, 0);
  if (variant == SurfaceVariant::XZZX) {
    for (uint32_t q : lay.data) {
      auto [x, y] = lay.coord_of[q];
      if ((((x - 1) / 2) + ((y - 1) / 2)) % 2 == 1) dressed[q] = 1;
    }
  }

  std::vector<uint32_t> ancillas;
  for (const auto& ch : lay.checks) ancillas.push_back(ch.ancilla);

  std::vector<uint32_t> all(lay.data);
  all.insert(all.end(), ancillas.begin(), ancillas.end());
  std::sort(all.begin(), all.end());
  c.reset(all);
  std::vector<uint32_t> h_prep;
  for (uint32_t q : lay.data) {
    bool x_basis = (basis == 'X');
    if (dressed[q]) x_basis = !x_basis;
    if (x_basis) h_prep.push_back(q);
  }
  if (!h_prep.empty()) c.gate(Op::H, h_prep);
  c.tick();

  std::vector<std::vector<size_t>> check_records(lay.checks.size());
  auto stabilizer_round = [&](int round) {
    detail::emit_split_round(c, g, {&lay}, ordering, round, check_records, &dressed);
    for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
      if (round == 0) {
        if (lay.checks[ci].basis == basis) {
          c.detector({int64_t(check_records[ci][0])});
          g.detectors.push_back({int(ci), -1, 0});
        }
      } else {
        c.detector({int64_t(check_records[ci][round - 1]), int64_t(check_records[ci][round])});
        g.detectors.push_back({int(ci), round - 1, round});
      }
    }
    c.tick();
  };

  for (int r = 0; r < rounds; ++r) stabilizer_round(r);

  if (!h_prep.empty()) c.gate(Op::H, h_prep);
  c.tick();
  std::map<uint32_t, size_t> data_record;
  for (uint32_t q : lay.data) {
    size_t rec = c.measure('Z', {q});
    data_record[q] = rec;
    g.record_roles.push_back({RecordRole::DATA, -1, rounds, int(q)});
  }
  for (size_t ci = 0; ci < lay.checks.size(); ++ci) {
    if (lay.checks[ci].basis != basis) continue;
    std::vector<int64_t> recs;
    for (uint32_t q : lay.checks[ci].data) recs.push_back(int64_t(data_record.at(q)));
    recs.push_back(int64_t(check_records[ci].back()));
    c.detector(recs);
    g.detectors.push_back({int(ci), rounds - 1, -2});
  }
  const auto logical = basis == 'Z' ? lay.logical_z_col(0) : lay.logical_x_row(0);
  std::vector<int64_t> obs;
  for (uint32_t q : logical) obs.push_back(int64_t(data_record.at(q)));
  c.observable(0, obs);

  StabilizerCode code;
  code.n = lay.data.size();
  code.k = 1;
  code.d = size_t(d);
  code.label = "surface_d" + std::to_string(d) + (variant == SurfaceVariant::XZZX ? "_xzzx" : "");
  for (const auto& ch : lay.checks) {
    PauliString s(code.n);
    for (uint32_t q : ch.data) {
      bool x_letter = ch.basis == 'X';
      if (dressed[q]) x_letter = !x_letter;
      if (x_letter)
        s.set_x(q, true);
      else
        s.set_z(q, true);
    }
    code.stabilizers.push_back(s);
  }
  PauliString lx(code.n), lz(code.n);
  for (uint32_t q : lay.logical_x_row(0)) {
    if (dressed[q])
      lx.set_z(q, true);
    else
      lx.set_x(q, true);
  }
  for (uint32_t q : lay.logical_z_col(0)) {
    if (dressed[q])
      lz.set_x(q, true);
    else
      lz.set_z(q, true);
  }
  code.logical_x = {lx};
  code.logical_z = {lz};
  out.codes.push_back(std::move(code));

  out.circuit.metadata["family"] = "surface_memory";
  out.circuit.metadata["d"] = std::to_string(d);
  out.circuit.metadata["basis"] = std::string(1, basis);
  return out;
}

Circuit inject_global_rotation(const Circuit& circuit, const std::vector<uint32_t>& data_qubits,
                               double theta_per_timestep, bool twirl) {
  Circuit out(circuit.num_qubits());
  out.metadata = circuit.metadata;
  double s = std::sin(theta_per_timestep / 2);
  double p_twirl = s * s;
  for (const auto& ins : circuit.instructions()) {
    out.append(ins);
    if (ins.op == Op::CZ || ins.op == Op::CNOT) {
      if (theta_per_timestep == 0) continue;
      if (twirl) {
        out.biased_error('Z', p_twirl, data_qubits);
      } else {
        out.rz(theta_per_timestep, data_qubits);
      }
    }
  }
  return out;
}

}  // namespace qecw
