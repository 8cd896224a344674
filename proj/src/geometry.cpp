#include "qecw/geometry.hpp"

#include <algorithm>

#include <json.hpp>

namespace qecw {

using nlohmann::json;

std::string Geometry::to_json() const {
  json j;
  j["data_qubits"] = data_qubits;
  j["rounds"] = rounds;
  json jc = json::array();
  for (const auto& c : checks)
    jc.push_back({{"ancilla", c.ancilla}, {"basis", std::string(1, c.basis)}, {"data", c.data}});
  j["checks"] = jc;
  json jd = json::array();
  for (const auto& d : detectors)
    jd.push_back({{"check", d.check}, {"round_a", d.round_a}, {"round_b", d.round_b}});
  j["detectors"] = jd;
  json jr = json::array();
  for (const auto& r : record_roles)
    jr.push_back({{"kind", int(r.kind)}, {"check", r.check}, {"round", r.round}, {"qubit", r.qubit}});
  j["record_roles"] = jr;
  json jq = json::object();
  for (const auto& [q, xy] : coords) jq[std::to_string(q)] = {xy.first, xy.second};
  j["coords"] = jq;
  return j.dump(2);
}

Geometry Geometry::from_json(const std::string& text) {
  json j = json::parse(text);
  Geometry g;
  g.data_qubits = j.value("data_qubits", std::vector<uint32_t>{});
  g.rounds = j.value("rounds", 0);
  for (const auto& jc : j.value("checks", json::array())) {
    CheckInfo c;
    c.ancilla = jc.value("ancilla", 0u);
    c.basis = jc.value("basis", std::string("Z"))[0];
    c.data = jc.value("data", std::vector<uint32_t>{});
    g.checks.push_back(std::move(c));
  }
  for (const auto& jd : j.value("detectors", json::array())) {
    DetectorInfo d;
    d.check = jd.value("check", -1);
    d.round_a = jd.value("round_a", -1);
    d.round_b = jd.value("round_b", -1);
    g.detectors.push_back(d);
  }
  for (const auto& jr : j.value("record_roles", json::array())) {
    RecordRole r;
    r.kind = RecordRole::Kind(jr.value("kind", 2));
    r.check = jr.value("check", -1);
    r.round = jr.value("round", -1);
    r.qubit = jr.value("qubit", -1);
    g.record_roles.push_back(r);
  }
  if (j.contains("coords"))
    for (auto& [k, v] : j["coords"].items())
      g.coords[uint32_t(std::stoul(k))] = {v[0].get<double>(), v[1].get<double>()};
  return g;
}

std::vector<int> Geometry::checks_containing(uint32_t data_qubit, char basis) const {
  std::vector<int> out;
  for (size_t i = 0; i < checks.size(); ++i) {
    if (checks[i].basis != basis) continue;
    if (std::find(checks[i].data.begin(), checks[i].data.end(), data_qubit) != checks[i].data.end())
      out.push_back(int(i));
  }
  return out;
}

}  // namespace qecw
