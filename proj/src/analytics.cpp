#include "qecw/analytics.hpp"

#include <algorithm>
#include <functional>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "qecw/dem.hpp"
#include "qecw/sampler.hpp"

namespace qecw {

DetectorStats detector_stats(const DetectorArrays& arrays) {
  DetectorStats out;
  size_t nd = arrays.n_detectors;
  out.per_detector_rate.assign(nd, 0);
  out.per_detector_valid.assign(nd, 0);
  std::vector<double> weighted(nd, 0), valid(nd, 0);
  size_t max_fired = 0;
  std::vector<size_t> fired_counts(arrays.n_shots, 0);
  for (size_t s = 0; s < arrays.n_shots; ++s) {
    size_t fired = 0;
    for (size_t d = 0; d < nd; ++d) {
      if (!arrays.valid(s, d)) continue;
      valid[d] += 1;
      double w = arrays.detector_weight[s * nd + d];
      if (arrays.det(s, d)) {
        weighted[d] += w;
        ++fired;
      }
    }
    fired_counts[s] = fired;
    max_fired = std::max(max_fired, fired);
  }
  out.fired_histogram.assign(max_fired + 1, 0);
  for (size_t c : fired_counts) out.fired_histogram[c]++;
  double total = 0;
  size_t contributing = 0;
  for (size_t d = 0; d < nd; ++d) {
    out.per_detector_valid[d] = arrays.n_shots ? valid[d] / double(arrays.n_shots) : 0;
    if (valid[d] > 0) {
      out.per_detector_rate[d] = weighted[d] / valid[d];
      total += out.per_detector_rate[d];
      ++contributing;
    }
  }
  out.mean_rate = contributing ? total / double(contributing) : 0;
  return out;
}

Eigen::MatrixXd pij_matrix(const DetectorArrays& arrays) {
  size_t nd = arrays.n_detectors;
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(nd, 1);
  Eigen::MatrixXd xij = Eigen::MatrixXd::Zero(nd, nd);
  size_t n = arrays.n_shots;
  for (size_t s = 0; s < n; ++s) {
    for (size_t i = 0; i < nd; ++i) {
      if (!arrays.det(s, i)) continue;
      xi(i, 0) += 1;
      for (size_t j = 0; j < nd; ++j)
        if (arrays.det(s, j)) xij(i, j) += 1;
    }
  }
  xi /= double(n);
  xij /= double(n);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nd, nd);
  for (size_t i = 0; i < nd; ++i) {
    for (size_t j = 0; j < nd; ++j) {
      if (i == j) {
        out(i, j) = xi(i, 0);
        continue;
      }
      double num = xij(i, j) - xi(i, 0) * xi(j, 0);
      double den = 1 - 2 * xi(i, 0) - 2 * xi(j, 0) + 4 * xij(i, j);
      if (std::abs(den) < 1e-12) {
        out(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double radicand = 1 - 4 * num / den;
      if (radicand > 1) {
        out(i, j) = 0;  // clipped
      } else if (radicand < 0) {
        out(i, j) = 0.5;
      } else {
        out(i, j) = 0.5 - 0.5 * std::sqrt(radicand);
      }
    }
  }
  return out;
}

double lepr(double p_l, double rounds) {
  if (p_l < 0 || p_l > 0.5) throw std::invalid_argument("p_l must lie in [0, 0.5]");
  if (rounds <= 0) throw std::invalid_argument("rounds must be positive");
  return 0.5 * (1 - std::pow(1 - 2 * p_l, 1.0 / rounds));
}

double lepr_multi(double p_l, double rounds, int n_logical) {
  double p_max = 1 - std::pow(2.0, -double(n_logical));
  if (p_l < 0 || p_l > p_max) throw std::invalid_argument("p_l must lie in [0, P_max]");
  if (rounds <= 0) throw std::invalid_argument("rounds must be positive");
  return p_max * (1 - std::pow(1 - p_l / p_max, 1.0 / rounds));
}

double epsilon_per_logical_op(double p_l, int n_gates_per_round) {
  if (n_gates_per_round < 1) throw std::invalid_argument("need at least one gate per round");
  return lepr(p_l, 3.0 * n_gates_per_round);
}

double lambda_ratio(double lepr_small_d, double lepr_large_d) {
  if (lepr_large_d <= 0) throw std::invalid_argument("zero denominator");
  return lepr_small_d / lepr_large_d;
}

GateModelFit fit_gate_model(const std::vector<std::pair<double, double>>& data, int d) {
  if (data.size() < 4) throw std::invalid_argument("need at least 4 points");
  double expo = (d + 1) / 2.0;
  // The model A (p + N dp)^e has a scale gauge: (A, p, dp) and
  // (A s^-e, s p, s dp) give identical curves, so the fit is done in the
  // canonical gauge A = 1 and the reported rates absorb the amplitude.
  auto model = [&](double p, double dp, double N) {
    return std::pow(std::max(p + N * dp, 1e-15), expo);
  };
  // Linearizing start: y^(1/e) = p + N dp.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [N, y] : data) {
    double t = std::pow(std::max(y, 1e-300), 1.0 / expo);
    sx += N;
    sy += t;
    sxx += N * N;
    sxy += N * t;
  }
  double n = double(data.size());
  double dp = (n * sxy - sx * sy) / std::max(n * sxx - sx * sx, 1e-12);
  double p = (sy - dp * sx) / n;
  p = std::max(p, 1e-9);
  dp = std::max(dp, 0.0);

  double prev_obj = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::MatrixXd jac(data.size(), 2);
    Eigen::VectorXd resid(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
      auto [N, y] = data[i];
      double base = std::max(p + N * dp, 1e-15);
      resid(i) = y - std::pow(base, expo);
      double dfdp = expo * std::pow(base, expo - 1);
      jac(i, 0) = dfdp;
      jac(i, 1) = dfdp * N;
    }
    double obj = resid.squaredNorm();
    Eigen::Matrix2d jtj = jac.transpose() * jac;
    jtj += 1e-14 * Eigen::Matrix2d::Identity();
    Eigen::Vector2d step = jtj.ldlt().solve(jac.transpose() * resid);
    double scale = 1.0;
    for (int bt = 0; bt < 40; ++bt) {
      double np = std::max(p + scale * step(0), 0.0);
      double ndp = std::max(dp + scale * step(1), 0.0);
      double nobj = 0;
      for (auto& [N, y] : data) {
        double diff = y - model(np, ndp, N);
        nobj += diff * diff;
      }
      if (nobj <= obj) {
        p = np;
        dp = ndp;
        break;
      }
      scale *= 0.5;
    }
    if (std::abs(prev_obj - obj) < 1e-24 + 1e-9 * obj) {
      converged = true;
      break;
    }
    prev_obj = obj;
  }
  GateModelFit fit;
  fit.amplitude = 1.0;
  fit.p_qec = p;
  fit.delta_p_det = dp;
  fit.converged = converged;
  double obj = 0;
  for (auto& [N, y] : data) {
    double diff = y - model(p, dp, N);
    obj += diff * diff;
  }
  fit.residual = std::sqrt(obj / data.size());
  if (!converged)
    throw std::runtime_error("gate model fit did not converge; residual " +
                             std::to_string(fit.residual));
  return fit;
}

ClusterCorrelators cluster_correlators(const GeneratedCircuit& gen, const ShotBatch& batch,
                                       const std::vector<size_t>* accepted_shots) {
  if (!gen.cluster) throw std::invalid_argument("batch is not from a cluster circuit");
  const ClusterStructure& cs = *gen.cluster;
  std::vector<size_t> shots;
  if (accepted_shots) {
    shots = *accepted_shots;
  } else {
    shots.resize(batch.n_shots);
    std::iota(shots.begin(), shots.end(), 0);
  }

  // Observable values per shot.
  std::vector<std::vector<uint8_t>> obs(shots.size());
  {
    std::vector<uint8_t> dets, ob;
    for (size_t i = 0; i < shots.size(); ++i) {
      compute_detector_bits(gen.circuit, batch, shots[i], dets, ob);
      obs[i] = ob;
    }
  }

  // Dressed per-block stabilizer error bits: an X-measured block's X
  // stabilizer times the same-support Z parities of its lattice neighbors
  // (and dually); the product is deterministic in the cluster state.
  int layers = cs.layers, width = cs.width;
  auto block_of = [&](int t, int x) { return t * width + x; };
  auto stab_error = [&](size_t shot, int t, int x, size_t stab_idx) -> int {
    char basis = cs.block_basis[block_of(t, x)];
    const auto& sup =
        basis == 'X' ? cs.stab_x_support[stab_idx]
                     : cs.stab_z_support[stab_idx % cs.stab_z_support.size()];
    int par = 0;
    auto add = [&](int tt, int xx) {
      if (tt < 0 || tt >= layers || xx < 0 || xx >= width) return;
      for (uint32_t q : sup) {
        uint8_t v = batch.record(shot, cs.block_records[block_of(tt, xx)][q]);
        par ^= (v == 1);
      }
    };
    add(t, x);
    add(t - 1, x);
    add(t + 1, x);
    add(t, x - 1);
    add(t, x + 1);
    return par;
  };
  size_t n_stabs = std::min(cs.stab_x_support.size(), cs.stab_z_support.size());

  ClusterCorrelators out;
  int max_sep = layers - 1;
  for (int sep = 1; sep <= max_sep; ++sep) {
    // Logical correlator: product of the cluster stabilizers of the
    // X-measured sites between the endpoints (1D, column 0).
    double corr = 0;
    size_t corr_n = 0;
    for (int t0 = 0; t0 + sep < layers; t0 += 1) {
      // product over X-sites strictly inside [t0, t0+sep] with matching parity
      std::vector<uint32_t> involved;
      for (size_t o = 0; o < cs.observable_site.size(); ++o) {
        auto [blk, li] = cs.observable_site[o];
        if (li != 0) continue;
        int t = blk / width, x = blk % width;
        if (x != 0) continue;
        if (t > t0 - 1 && t <= t0 + sep && cs.block_basis[blk] == 'X') {
          if ((t - t0) % 2 == 1 || sep == 1 || true) involved.push_back(uint32_t(o));
        }
      }
      if (involved.empty()) continue;
      for (size_t i = 0; i < shots.size(); ++i) {
        int par = 0;
        for (uint32_t o : involved) par ^= obs[i][o];
        corr += par ? -1 : 1;
      }
      corr_n += shots.size();
    }
    out.separation.push_back(sep);
    out.logical_correlator.push_back(corr_n ? corr / double(corr_n) : 0.0);

    // Physical covariance of the same stabilizer between blocks sep apart.
    double cov_acc = 0, cov_sq = 0;
    size_t cov_n = 0;
    std::vector<double> pair_covs;
    for (int x = 0; x < width; ++x) {
      for (int t0 = 0; t0 + sep < layers; ++t0) {
        if (cs.block_basis[block_of(t0, x)] != cs.block_basis[block_of(t0 + sep, x)]) continue;
        for (size_t si = 0; si < n_stabs; ++si) {
          double ea = 0, eb = 0, eab = 0;
          for (size_t i = 0; i < shots.size(); ++i) {
            int a = stab_error(shots[i], t0, x, si);
            int b = stab_error(shots[i], t0 + sep, x, si);
            ea += a;
            eb += b;
            eab += a * b;
          }
          double n = double(shots.size());
          double cov = eab / n - (ea / n) * (eb / n);
          pair_covs.push_back(cov);
          cov_acc += cov;
          cov_sq += cov * cov;
          ++cov_n;
        }
      }
    }
    double mean_cov = cov_n ? cov_acc / double(cov_n) : 0.0;
    out.physical_covariance.push_back(mean_cov);
    // Standard error: binomial-scale estimate of a covariance of rare bits.
    double var_est = 0;
    if (cov_n > 1) {
      for (double c : pair_covs) var_est += (c - mean_cov) * (c - mean_cov);
      var_est /= double(cov_n - 1) * double(cov_n);
    } else if (cov_n == 1) {
      var_est = 1.0 / double(shots.size());
    }
    out.physical_sigma.push_back(std::sqrt(var_est) + 1e-12);
  }
  return out;
}

std::vector<int> co_propagating_weights(HypercubeFamily family, bool with_permutation) {
  if (family != HypercubeFamily::CODE_16_6_4)
    throw std::invalid_argument("co-propagating analysis is for the high-rate family");
  // Logical X operators are the degree-2 monomials x_a x_b over the four
  // cube axes. The row/column swap pair is the affine substitution
  // x2 -> x1+x2+1, x4 -> x3+x4+1; a cluster stabilizer built from logical i
  // becomes the product of one weight-3 stabilizer per degree-2 monomial in
  // the substituted polynomial.
  auto spec = detail::build_hypercube(family, Puncture::NONE, 'X');
  std::vector<int> weights;
  for (int w : spec.logical_wires) {
    // polynomial of the monomial prod_{k in w} x_k after substitution, as a
    // set of monomials over GF(2); monomial = bitmask of participating axes
    std::map<int, int> poly;  // monomial mask -> coefficient mod 2
    poly[w] = 1;
    if (with_permutation) {
      // substitute axis 2 and axis 4 wherever present
      for (auto [var, rep_base] : {std::pair<int, int>{1, 0}, std::pair<int, int>{3, 2}}) {
        std::map<int, int> next;
        for (auto& [mono, coef] : poly) {
          if (!coef) continue;
          if (!(mono >> var & 1)) {
            next[mono] ^= 1;
            continue;
          }
          int rest = mono & ~(1 << var);
          // x_var -> x_rep + x_var + 1
          next[rest | (1 << rep_base)] ^= 1;
          next[rest | (1 << var)] ^= 1;
          next[rest] ^= 1;
        }
        // re-reduce squares: x_k^2 = x_k handled by mask arithmetic already
        poly = std::move(next);
      }
    }
    int degree2 = 0;
    for (auto& [mono, coef] : poly)
      if (coef && std::popcount(unsigned(mono)) == 2) ++degree2;
    weights.push_back(3 * degree2);
  }
  std::sort(weights.begin(), weights.end());
  return weights;
}

std::optional<size_t> circuit_distance(const DetectorErrorModel& dem, size_t max_weight) {
  if (max_weight > 6) throw std::invalid_argument("max_weight capped at 6");
  size_t m = dem.mechanisms.size();
  size_t words = (dem.num_detectors + 63) / 64;
  std::vector<std::vector<uint64_t>> sig(m, std::vector<uint64_t>(words, 0));
  std::vector<uint64_t> obs(m);
  for (size_t e = 0; e < m; ++e) {
    for (uint32_t d : dem.mechanisms[e].detectors) sig[e][d >> 6] |= uint64_t(1) << (d & 63);
    obs[e] = dem.mechanisms[e].observables;
  }
  struct Hash {
    size_t operator()(const std::vector<uint64_t>& v) const {
      size_t h = 1469598103934665603ULL;
      for (uint64_t w : v) {
        h ^= w;
        h *= 1099511628211ULL;
      }
      return h;
    }
  };
  // Meet in the middle: enumerate subsets of size <= ceil(w/2), store the
  // cheapest observable content per signature, then match complements.
  for (size_t w = 1; w <= max_weight; ++w) {
    size_t half = (w + 1) / 2;
    // map: signature -> set of observable masks seen with subset sizes
    std::unordered_map<std::vector<uint64_t>, std::map<size_t, std::vector<uint64_t>>, Hash> table;
    std::vector<uint64_t> cur(words, 0);
    std::function<void(size_t, size_t, uint64_t)> fill = [&](size_t start, size_t size,
                                                             uint64_t obsmask) {
      auto& entry = table[cur][size];
      if (std::find(entry.begin(), entry.end(), obsmask) == entry.end()) entry.push_back(obsmask);
      if (size == half) return;
      for (size_t e = start; e < m; ++e) {
        for (size_t ww = 0; ww < words; ++ww) cur[ww] ^= sig[e][ww];
        fill(e + 1, size + 1, obsmask ^ obs[e]);
        for (size_t ww = 0; ww < words; ++ww) cur[ww] ^= sig[e][ww];
      }
    };
    fill(0, 0, 0);
    // pairs (a, b) with a + b == w: identical signatures must cancel.
    // Note subsets may overlap between the halves; overlapping pairs reduce
    // to smaller total weight which earlier iterations already covered.
    for (auto& [signature, by_size] : table) {
      for (auto& [sa, obs_a] : by_size) {
        size_t sb = w - sa;
        auto it = by_size.find(sb);
        if (it == by_size.end()) continue;
        for (uint64_t oa : obs_a)
          for (uint64_t ob : it->second)
            if ((oa ^ ob) != 0) return w;
      }
    }
  }
  return std::nullopt;
}

std::vector<double> simulate_detector_rates(const GeneratedCircuit& gen, const NoiseModel& model,
                                            size_t shots, uint64_t seed) {
  auto noisy = apply_noise(gen.circuit, model);
  auto batch = sample_shots(noisy, shots, seed);
  auto arrays = extract_detectors(noisy, batch, LossPolicy::BARE, &gen.geometry);
  auto stats = detector_stats(arrays);
  return stats.per_detector_rate;
}

std::vector<BudgetEntry> error_budget(const GeneratedCircuit& gen, const NoiseModel& model,
                                      size_t shots, uint64_t seed, LossPolicy policy) {
  auto mean_rate = [&](const NoiseModel& m) {
    auto noisy = apply_noise(gen.circuit, m);
    auto batch = sample_shots(noisy, shots, seed);
    auto arrays = extract_detectors(noisy, batch, policy,
                                    policy == LossPolicy::BARE ? nullptr : &gen.geometry);
    return detector_stats(arrays).mean_rate;
  };
  double full = mean_rate(model);
  std::vector<BudgetEntry> out;
  struct Channel {
    const char* name;
    NoiseModel::Rates NoiseModel::* member;
    bool pauli;
  };
  const Channel channels[] = {
      {"single_qubit_gate.pauli", &NoiseModel::single_qubit_gate, true},
      {"single_qubit_gate.loss", &NoiseModel::single_qubit_gate, false},
      {"two_qubit_gate.pauli", &NoiseModel::two_qubit_gate, true},
      {"two_qubit_gate.loss", &NoiseModel::two_qubit_gate, false},
      {"idle_per_tick.pauli", &NoiseModel::idle_per_tick, true},
      {"idle_per_tick.loss", &NoiseModel::idle_per_tick, false},
      {"reset.pauli", &NoiseModel::reset, true},
      {"reset.loss", &NoiseModel::reset, false},
      {"measure.pauli", &NoiseModel::measure, true},
      {"measure.loss", &NoiseModel::measure, false},
      {"move.pauli", &NoiseModel::move, true},
      {"move.loss", &NoiseModel::move, false},
  };
  for (const auto& ch : channels) {
    double rate = ch.pauli ? (model.*ch.member).pauli : (model.*ch.member).loss;
    if (rate <= 0) continue;
    NoiseModel ablated = model;
    if (ch.pauli)
      (ablated.*ch.member).pauli = 0;
    else
      (ablated.*ch.member).loss = 0;
    double without = mean_rate(ablated);
    BudgetEntry e;
    e.channel = ch.name;
    e.contribution = full > 0 ? (full - without) / full : 0.0;
    out.push_back(e);
  }
  return out;
}

TuneResult tune_error_model(const GeneratedCircuit& gen, const std::vector<double>& reference_rates,
                            NoiseModel initial, size_t shots_per_eval, int max_evals,
                            uint64_t seed) {
  struct Param {
    double NoiseModel::Rates::* field;
    NoiseModel::Rates NoiseModel::* member;
  };
  std::vector<Param> params;
  for (auto member : {&NoiseModel::single_qubit_gate, &NoiseModel::two_qubit_gate,
                      &NoiseModel::idle_per_tick, &NoiseModel::reset, &NoiseModel::measure,
                      &NoiseModel::move}) {
    if ((initial.*member).pauli > 0) params.push_back({&NoiseModel::Rates::pauli, member});
    if ((initial.*member).loss > 0) params.push_back({&NoiseModel::Rates::loss, member});
  }
  int evals = 0;
  auto objective = [&](const NoiseModel& m) {
    auto rates = simulate_detector_rates(gen, m, shots_per_eval, seed + 1000 + evals);
    ++evals;
    double obj = 0;
    for (size_t d = 0; d < std::min(rates.size(), reference_rates.size()); ++d) {
      double diff = rates[d] - reference_rates[d];
      obj += diff * diff;
    }
    return obj;
  };
  NoiseModel best = initial;
  double best_obj = objective(best);
  bool improved = true;
  while (improved && evals < max_evals) {
    improved = false;
    for (const auto& p : params) {
      if (evals >= max_evals) break;
      for (double factor : {0.6, 0.8, 1.25, 1.6}) {
        if (evals >= max_evals) break;
        NoiseModel trial = best;
        (trial.*p.member).*p.field *= factor;
        if ((trial.*p.member).pauli + (trial.*p.member).loss > 1) continue;
        double obj = objective(trial);
        if (obj < best_obj) {
          best = trial;
          best_obj = obj;
          improved = true;
        }
      }
    }
  }
  TuneResult out;
  out.model = best;
  out.model.name = initial.name + "-tuned";
  out.objective = best_obj;
  out.budget_exhausted = evals >= max_evals;
  return out;
}

}  // namespace qecw
