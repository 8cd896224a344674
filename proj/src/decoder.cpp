#include "qecw/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qecw {

namespace {

constexpr double kWeightTol = 1e-12;

// Lexicographic order on ascending index sequences; a proper prefix sorts
// first. mle_decode and brute_force_decode share this tie-break.
bool lex_smaller(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  size_t i = 0;
  while (i < a.size() && i < b.size()) {
    if (a[i] != b[i]) return a[i] < b[i];
    ++i;
  }
  return a.size() < b.size();
}

struct Component {
  std::vector<uint32_t> mechanisms;  // DEM mechanism indices, ascending
  std::vector<uint32_t> detectors;   // DEM detector indices, ascending
};

std::vector<Component> split_components(const DetectorErrorModel& dem) {
  size_t m = dem.mechanisms.size();
  std::vector<int> parent(m + dem.num_detectors);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (size_t e = 0; e < m; ++e)
    for (uint32_t d : dem.mechanisms[e].detectors) parent[find(int(e))] = find(int(m + d));
  std::map<int, Component> comps;
  for (size_t e = 0; e < m; ++e) comps[find(int(e))].mechanisms.push_back(uint32_t(e));
  for (size_t d = 0; d < dem.num_detectors; ++d) {
    int root = find(int(m + d));
    auto it = comps.find(root);
    if (it != comps.end()) it->second.detectors.push_back(uint32_t(d));
  }
  std::vector<Component> out;
  out.reserve(comps.size());
  for (auto& [root, c] : comps) out.push_back(std::move(c));
  return out;
}

struct Outcome {
  bool feasible = false;
  double weight = 0;
  std::vector<uint32_t> set;  // local mechanism ids, ascending
  uint64_t obs = 0;
  bool timeout = false;
};

// Branch and bound inside one component. Solutions are enumerated by
// repeatedly branching on which mechanism is the lowest-index one covering
// the lowest fired detector; mechanisms skipped at a branch stay excluded
// in the subtree, so every subset is visited at most once.
struct ComponentSolver {
  std::vector<double> weight_of;
  std::vector<std::vector<uint32_t>> dets_of;  // local detector ids
  std::vector<uint64_t> obs_of;
  std::vector<std::vector<uint32_t>> cover;  // per local detector
  std::vector<double> unit_cost;             // admissible per-fired-detector bound
  std::vector<uint32_t> obs_touchers;

  // Cheapest observable-affecting syndrome-free subset, as a seed for
  // competitor searches. Computed once.
  Outcome min_logical;
  bool min_logical_ready = false;

  explicit ComponentSolver(const DetectorErrorModel& dem, const Component& comp) {
    size_t M = comp.mechanisms.size();
    std::map<uint32_t, uint32_t> det_local;
    for (uint32_t i = 0; i < comp.detectors.size(); ++i) det_local[comp.detectors[i]] = i;
    weight_of.resize(M);
    dets_of.resize(M);
    obs_of.resize(M);
    cover.resize(comp.detectors.size());
    for (size_t e = 0; e < M; ++e) {
      const auto& mech = dem.mechanisms[comp.mechanisms[e]];
      weight_of[e] = std::log((1 - mech.p) / mech.p);
      for (uint32_t d : mech.detectors) dets_of[e].push_back(det_local.at(d));
      obs_of[e] = mech.observables;
      if (mech.observables) obs_touchers.push_back(uint32_t(e));
      for (uint32_t ld : dets_of[e]) cover[ld].push_back(uint32_t(e));
    }
    unit_cost.assign(cover.size(), 0);
    for (size_t d = 0; d < cover.size(); ++d) {
      double c = std::numeric_limits<double>::infinity();
      for (uint32_t e : cover[d]) c = std::min(c, weight_of[e] / double(dets_of[e].size()));
      unit_cost[d] = c;
    }
  }

  struct Search {
    const ComponentSolver& cs;
    const DecodeBudget& budget;
    std::vector<uint8_t> fired;
    std::vector<uint8_t> banned;
    std::vector<uint32_t> chosen;
    double cur_weight = 0;
    double cur_bound = 0;
    uint64_t cur_obs = 0;
    bool constrained = false;
    uint64_t forbidden_obs = 0;
    uint64_t nodes = 0;
    bool exhausted = false;
    bool best_found = false;
    double best_weight = 0;
    std::vector<uint32_t> best_set;
    uint64_t best_obs = 0;

    Search(const ComponentSolver& solver, const DecodeBudget& b) : cs(solver), budget(b) {}

    void flip(uint32_t e) {
      for (uint32_t d : cs.dets_of[e]) {
        cur_bound += fired[d] ? -cs.unit_cost[d] : cs.unit_cost[d];
        fired[d] ^= 1;
      }
      cur_obs ^= cs.obs_of[e];
    }

    void offer(double w, std::vector<uint32_t> set, uint64_t obs) {
      if (!best_found || w < best_weight - kWeightTol ||
          (w < best_weight + kWeightTol && lex_smaller(set, best_set))) {
        best_found = true;
        best_weight = w;
        best_set = std::move(set);
        best_obs = obs;
      }
    }

    void leaf() {
      if (constrained && cur_obs == forbidden_obs) {
        branch(cs.obs_touchers);
        return;
      }
      auto sorted = chosen;
      std::sort(sorted.begin(), sorted.end());
      offer(cur_weight, std::move(sorted), cur_obs);
    }

    void recurse() {
      if (exhausted) return;
      if (best_found && cur_weight + std::max(0.0, cur_bound) > best_weight + kWeightTol) return;
      int pivot = -1;
      for (size_t d = 0; d < fired.size(); ++d)
        if (fired[d]) {
          pivot = int(d);
          break;
        }
      if (pivot < 0) {
        leaf();
        return;
      }
      branch(cs.cover[pivot]);
    }

    void branch(const std::vector<uint32_t>& candidates) {
      if (++nodes > budget.max_nodes) {
        exhausted = true;
        return;
      }
      std::vector<uint32_t> bans;
      size_t considered = 0;
      for (uint32_t e : candidates) {
        if (banned[e]) continue;
        if (budget.beam && considered >= budget.beam) break;
        ++considered;
        banned[e] = 1;
        bans.push_back(e);
        chosen.push_back(e);
        cur_weight += cs.weight_of[e];
        flip(e);
        recurse();
        flip(e);
        cur_weight -= cs.weight_of[e];
        chosen.pop_back();
        if (exhausted) break;
      }
      for (uint32_t e : bans) banned[e] = 0;
    }

    Outcome run(const std::vector<uint8_t>& events, bool constrain, uint64_t forbid,
                const Outcome* seed) {
      fired = events;
      banned.assign(cs.weight_of.size(), 0);
      chosen.clear();
      cur_weight = 0;
      cur_obs = 0;
      cur_bound = 0;
      for (size_t d = 0; d < fired.size(); ++d)
        if (fired[d]) cur_bound += cs.unit_cost[d];
      constrained = constrain;
      forbidden_obs = forbid;
      if (seed && seed->feasible) {
        best_found = true;
        best_weight = seed->weight;
        best_set = seed->set;
        best_obs = seed->obs;
      }
      recurse();
      Outcome out;
      out.feasible = best_found;
      out.weight = best_weight;
      out.set = best_set;
      out.obs = best_obs;
      out.timeout = exhausted;
      return out;
    }
  };

  Outcome solve(const std::vector<uint8_t>& events, bool constrain, uint64_t forbid,
                const DecodeBudget& budget, const Outcome* seed = nullptr) const {
    Search s(*this, budget);
    return s.run(events, constrain, forbid, seed);
  }

  void compute_min_logical(const DecodeBudget& budget) {
    min_logical_ready = true;
    if (obs_touchers.empty()) {
      min_logical.feasible = false;
      return;
    }
    std::vector<uint8_t> empty(cover.size(), 0);
    min_logical = solve(empty, true, 0, budget);
  }
};

}  // namespace

struct DemDecoder::Impl {
  DetectorErrorModel dem;
  DecodeBudget budget;
  std::vector<Component> comps;
  std::vector<ComponentSolver> solvers;
  double log_c = 0;
  std::vector<uint8_t> covered;

  Impl(const DetectorErrorModel& d, const DecodeBudget& b) : dem(d), budget(b) {
    for (const auto& m : dem.mechanisms) {
      if (m.p <= 0 || m.p > 0.5 + 1e-12)
        throw std::invalid_argument("mechanism probabilities must lie in (0, 0.5]");
      log_c += std::log1p(-m.p);
    }
    comps = split_components(dem);
    solvers.reserve(comps.size());
    for (const auto& c : comps) solvers.emplace_back(dem, c);
    for (auto& s : solvers) s.compute_min_logical(budget);
    covered.assign(dem.num_detectors, 0);
    for (const auto& m : dem.mechanisms)
      for (uint32_t d : m.detectors) covered[d] = 1;
  }

  DecodeResult decode(const std::vector<uint8_t>& events) const {
    if (events.size() != dem.num_detectors)
      throw std::invalid_argument("event vector length does not match the model");
    for (size_t d = 0; d < events.size(); ++d)
      if (events[d] && !covered[d])
        throw std::runtime_error("infeasible syndrome: detector " + std::to_string(d) +
                                 " fired but no mechanism covers it");
    DecodeResult res;
    double w0 = 0;
    double best_delta = std::numeric_limits<double>::infinity();
    std::vector<uint32_t> full_set;
    bool timeout = false;

    for (size_t ci = 0; ci < comps.size(); ++ci) {
      const auto& comp = comps[ci];
      const auto& solver = solvers[ci];
      std::vector<uint8_t> local(comp.detectors.size(), 0);
      for (size_t i = 0; i < comp.detectors.size(); ++i) local[i] = events[comp.detectors[i]];
      auto base = solver.solve(local, false, 0, budget);
      timeout |= base.timeout;
      if (!base.feasible) {
        if (base.timeout) continue;
        throw std::runtime_error("infeasible syndrome within a component");
      }
      w0 += base.weight;
      res.observable_flips ^= base.obs;
      for (uint32_t e : base.set) full_set.push_back(comp.mechanisms[e]);

      const Outcome* seed = nullptr;
      Outcome seeded;
      if (solver.min_logical.feasible) {
        // XOR of the base solution and the cheapest logical gives a valid
        // competitor; start the search from there.
        std::vector<uint32_t> sym;
        std::set_symmetric_difference(base.set.begin(), base.set.end(),
                                      solver.min_logical.set.begin(),
                                      solver.min_logical.set.end(), std::back_inserter(sym));
        seeded.feasible = true;
        seeded.weight = 0;
        seeded.obs = 0;
        for (uint32_t e : sym) {
          seeded.weight += solver.weight_of[e];
          seeded.obs ^= solver.obs_of[e];
        }
        seeded.set = std::move(sym);
        if (seeded.obs != base.obs) seed = &seeded;
      }
      auto alt = solver.solve(local, true, base.obs, budget, seed);
      timeout |= alt.timeout;
      if (alt.feasible) best_delta = std::min(best_delta, alt.weight - base.weight);
    }
    std::sort(full_set.begin(), full_set.end());
    res.error_set = std::move(full_set);
    res.p0 = std::exp(log_c - w0);
    if (std::isfinite(best_delta)) {
      res.p1 = std::exp(log_c - (w0 + best_delta));
      res.confidence = res.p0 / (res.p0 + res.p1);
    } else {
      res.p1 = 0;
      res.confidence = 1.0;
    }
    if (timeout) res.status = DecodeStatus::TIMEOUT;
    return res;
  }
};

DemDecoder::DemDecoder(const DetectorErrorModel& dem, const DecodeBudget& budget)
    : impl_(std::make_unique<Impl>(dem, budget)) {}
DemDecoder::~DemDecoder() = default;
DemDecoder::DemDecoder(DemDecoder&&) noexcept = default;
DemDecoder& DemDecoder::operator=(DemDecoder&&) noexcept = default;

DecodeResult DemDecoder::decode(const std::vector<uint8_t>& events) const {
  return impl_->decode(events);
}

DecodeResult mle_decode(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                        const DecodeBudget& budget) {
  return DemDecoder(dem, budget).decode(events);
}

DecodeResult brute_force_decode(const DetectorErrorModel& dem, const std::vector<uint8_t>& events,
                                size_t max_weight) {
  size_t m = dem.mechanisms.size();
  if (events.size() != dem.num_detectors)
    throw std::invalid_argument("event vector length does not match the model");
  if (m > 30 && max_weight == 0)
    throw std::invalid_argument("brute force needs <= 30 mechanisms or a weight cap");
  if (dem.num_detectors > 512) throw std::invalid_argument("brute force detector limit exceeded");

  std::vector<double> weight_of(m);
  double log_c = 0;
  for (size_t e = 0; e < m; ++e) {
    double p = dem.mechanisms[e].p;
    if (p <= 0 || p > 0.5 + 1e-12)
      throw std::invalid_argument("mechanism probabilities must lie in (0, 0.5]");
    weight_of[e] = std::log((1 - p) / p);
    log_c += std::log1p(-p);
  }

  size_t words = (dem.num_detectors + 63) / 64;
  std::vector<uint64_t> target(words, 0);
  for (size_t d = 0; d < events.size(); ++d)
    if (events[d]) target[d >> 6] |= uint64_t(1) << (d & 63);
  std::vector<std::vector<uint64_t>> sig(m, std::vector<uint64_t>(words, 0));
  for (size_t e = 0; e < m; ++e)
    for (uint32_t d : dem.mechanisms[e].detectors) sig[e][d >> 6] |= uint64_t(1) << (d & 63);

  bool found0 = false, found1 = false;
  double w0 = 0, w1 = 0;
  std::vector<uint32_t> set0, set1;
  uint64_t obs0 = 0;

  std::vector<uint64_t> cur(words, 0);
  uint64_t cur_obs = 0;
  double cur_w = 0;
  std::vector<uint32_t> members;
  auto match = [&]() {
    for (size_t w = 0; w < words; ++w)
      if (cur[w] != target[w]) return false;
    return true;
  };
  size_t cap = max_weight == 0 ? m : std::min(max_weight, m);

  // Pass 1: most likely subset.
  std::function<void(size_t, size_t)> enumerate = [&](size_t start, size_t remaining) {
    if (match()) {
      if (!found0 || cur_w < w0 - kWeightTol ||
          (cur_w < w0 + kWeightTol && lex_smaller(members, set0))) {
        found0 = true;
        w0 = cur_w;
        set0 = members;
        obs0 = cur_obs;
      }
    }
    if (remaining == 0) return;
    for (size_t e = start; e < m; ++e) {
      members.push_back(uint32_t(e));
      for (size_t w = 0; w < words; ++w) cur[w] ^= sig[e][w];
      cur_obs ^= dem.mechanisms[e].observables;
      cur_w += weight_of[e];
      enumerate(e + 1, remaining - 1);
      cur_w -= weight_of[e];
      cur_obs ^= dem.mechanisms[e].observables;
      for (size_t w = 0; w < words; ++w) cur[w] ^= sig[e][w];
      members.pop_back();
    }
  };
  enumerate(0, cap);
  if (!found0) throw std::runtime_error("infeasible syndrome: no subset reproduces the events");

  // Pass 2: best competitor with different observable flips.
  std::function<void(size_t, size_t)> enumerate_alt = [&](size_t start, size_t remaining) {
    if (match() && cur_obs != obs0) {
      if (!found1 || cur_w < w1 - kWeightTol ||
          (cur_w < w1 + kWeightTol && lex_smaller(members, set1))) {
        found1 = true;
        w1 = cur_w;
        set1 = members;
      }
    }
    if (remaining == 0) return;
    for (size_t e = start; e < m; ++e) {
      members.push_back(uint32_t(e));
      for (size_t w = 0; w < words; ++w) cur[w] ^= sig[e][w];
      cur_obs ^= dem.mechanisms[e].observables;
      cur_w += weight_of[e];
      enumerate_alt(e + 1, remaining - 1);
      cur_w -= weight_of[e];
      cur_obs ^= dem.mechanisms[e].observables;
      for (size_t w = 0; w < words; ++w) cur[w] ^= sig[e][w];
      members.pop_back();
    }
  };
  enumerate_alt(0, cap);

  DecodeResult res;
  res.observable_flips = obs0;
  res.error_set = set0;
  res.p0 = std::exp(log_c - w0);
  if (found1) {
    res.p1 = std::exp(log_c - w1);
    res.confidence = res.p0 / (res.p0 + res.p1);
  } else {
    res.p1 = 0;
    res.confidence = 1.0;
  }
  return res;
}

LookupDecoder::LookupDecoder(const StabilizerCode& code) : code_(code) {
  if (code.n > 20 || code.d > 5) throw std::invalid_argument("lookup decoder limited to n<=20, d<=5");
  size_t ns = code.stabilizers.size();
  if (ns > 24) throw std::invalid_argument("too many stabilizers for a lookup table");
  size_t table = size_t(1) << ns;
  corr_x_.assign(table, 0);
  corr_z_.assign(table, 0);
  filled_.assign(table, 0);

  std::vector<uint64_t> sx(ns), sz(ns);
  for (size_t i = 0; i < ns; ++i) {
    sx[i] = code_.stabilizers[i].x_words().empty() ? 0 : code_.stabilizers[i].x_words()[0];
    sz[i] = code_.stabilizers[i].z_words().empty() ? 0 : code_.stabilizers[i].z_words()[0];
  }
  auto syndrome_of = [&](uint64_t ex, uint64_t ez) {
    uint64_t s = 0;
    for (size_t i = 0; i < ns; ++i) {
      int par = (std::popcount(ex & sz[i]) + std::popcount(ez & sx[i])) & 1;
      s |= uint64_t(par) << i;
    }
    return s;
  };

  // Weight-ordered flood fill: each frontier step appends one single-qubit
  // Pauli, so the first error reaching a syndrome is minimum weight.
  filled_[0] = 1;
  std::vector<uint64_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<uint64_t> next;
    for (uint64_t s : frontier) {
      uint64_t ex = corr_x_[s], ez = corr_z_[s];
      for (size_t q = 0; q < code_.n; ++q) {
        if (((ex >> q) & 1) || ((ez >> q) & 1)) continue;  // keep weight ordering
        for (int letter = 0; letter < 3; ++letter) {
          uint64_t nx = ex, nz = ez;
          if (letter == 0 || letter == 1) nx |= uint64_t(1) << q;
          if (letter == 1 || letter == 2) nz |= uint64_t(1) << q;
          uint64_t s2 = syndrome_of(nx, nz);
          if (!filled_[s2]) {
            filled_[s2] = 1;
            corr_x_[s2] = nx;
            corr_z_[s2] = nz;
            next.push_back(s2);
          }
        }
      }
    }
    frontier = std::move(next);
  }
}

PauliString LookupDecoder::decode(const std::vector<uint8_t>& syndrome) const {
  if (syndrome.size() != code_.stabilizers.size())
    throw std::invalid_argument("syndrome length mismatch");
  uint64_t s = 0;
  for (size_t i = 0; i < syndrome.size(); ++i)
    if (syndrome[i]) s |= uint64_t(1) << i;
  PauliString corr(code_.n);
  if (!filled_[s]) return corr;  // unreachable syndrome: identity fallback
  for (size_t q = 0; q < code_.n; ++q) {
    if ((corr_x_[s] >> q) & 1) corr.set_x(q, true);
    if ((corr_z_[s] >> q) & 1) corr.set_z(q, true);
  }
  return corr;
}

PostselectResult postselect_error_detect(const std::vector<std::vector<uint8_t>>& detector_events) {
  if (detector_events.empty()) throw std::invalid_argument("empty input");
  PostselectResult out;
  for (size_t s = 0; s < detector_events.size(); ++s) {
    bool fired = false;
    for (uint8_t b : detector_events[s]) fired |= b != 0;
    if (!fired) out.accepted.push_back(s);
  }
  out.achieved_fraction = double(out.accepted.size()) / double(detector_events.size());
  return out;
}

PostselectResult postselect_confidence(const std::vector<DecodeResult>& results,
                                       double acceptance_fraction) {
  if (results.empty()) throw std::invalid_argument("empty input");
  if (acceptance_fraction <= 0 || acceptance_fraction > 1)
    throw std::invalid_argument("acceptance_fraction must lie in (0, 1]");
  std::vector<size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return results[a].confidence > results[b].confidence;
  });
  size_t keep = size_t(std::ceil(acceptance_fraction * double(results.size())));
  keep = std::max<size_t>(1, std::min(keep, results.size()));
  PostselectResult out;
  out.accepted.assign(order.begin(), order.begin() + keep);
  std::sort(out.accepted.begin(), out.accepted.end());
  out.achieved_fraction = double(keep) / double(results.size());
  return out;
}

std::vector<DecodeResult> decode_batch(const DetectorErrorModel& dem,
                                       const std::vector<std::vector<uint8_t>>& events,
                                       const DecodeBudget& budget, int threads) {
  DemDecoder decoder(dem, budget);
  std::map<std::vector<uint8_t>, size_t> unique_index;
  std::vector<const std::vector<uint8_t>*> keys;
  for (const auto& ev : events) {
    auto [it, inserted] = unique_index.emplace(ev, keys.size());
    if (inserted) keys.push_back(&it->first);
  }
  std::vector<DecodeResult> unique_results(keys.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= keys.size()) break;
      unique_results[i] = decoder.decode(*keys[i]);
    }
  };
  int nt = std::max(1, threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<DecodeResult> out(events.size());
  for (size_t s = 0; s < events.size(); ++s) out[s] = unique_results[unique_index.at(events[s])];
  return out;
}

}  // namespace qecw
