// qecw: experiment driver. Subcommands generate circuits, sample them with
// a chosen error model, decode, and emit CSV results plus JSON metadata.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

#include "qecw/analytics.hpp"
#include "qecw/dem.hpp"
#include "qecw/detectors.hpp"
#include "qecw/generators.hpp"
#include "qecw/io.hpp"
#include "qecw/noise.hpp"
#include "qecw/sampler.hpp"
#include "qecw/universality.hpp"

using namespace qecw;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string out_dir = "out";
  uint64_t seed = 1;
  int threads = 1;
  std::string model = "theory-p006";
  std::string model_file;
  size_t shots = 10000;
  std::string policy = "bare";
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_model = true) {
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "master seed (env QECW_SEED overrides)");
  cmd->add_option("--threads", opt.threads, "worker threads; results do not depend on it");
  if (with_model) {
    cmd->add_option("--model", opt.model, "named error model (none|theory-p006|exp-like|loss-heavy)");
    cmd->add_option("--model-file", opt.model_file, "JSON error model file (overrides --model)");
    cmd->add_option("--shots", opt.shots, "number of shots")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--policy", opt.policy, "loss policy: bare|detect-loss|supercheck|postselect");
}

uint64_t resolve_seed(uint64_t cli_seed) {
  if (const char* env = std::getenv("QECW_SEED")) return std::strtoull(env, nullptr, 10);
  return cli_seed;
}

NoiseModel resolve_model(const CommonOptions& opt) {
  if (!opt.model_file.empty()) return NoiseModel::from_json_file(opt.model_file);
  return NoiseModel::named(opt.model);
}

LossPolicy resolve_policy(const std::string& name) {
  if (name == "bare") return LossPolicy::BARE;
  if (name == "detect-loss") return LossPolicy::DETECT_LOSS;
  if (name == "supercheck") return LossPolicy::SUPERCHECK;
  if (name == "postselect") return LossPolicy::POSTSELECT;
  throw CLI::ValidationError("--policy", "unknown policy " + name);
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

void write_metadata(const std::string& dir, std::map<std::string, std::string> extra,
                    const Circuit& circuit, const NoiseModel* model, uint64_t seed) {
  extra["seed"] = std::to_string(seed);
  extra["circuit_hash"] = content_hash_hex(circuit.to_text());
  if (model) {
    extra["model"] = model->name;
    extra["model_hash"] = content_hash_hex(model->to_json());
  }
  extra["schema_version"] = "1";
  write_file(dir + "/metadata.json", metadata_json(extra));
}

std::vector<std::vector<uint8_t>> detector_events_of(const DetectorArrays& arrays) {
  std::vector<std::vector<uint8_t>> events(arrays.n_shots);
  for (size_t s = 0; s < arrays.n_shots; ++s) {
    events[s].resize(arrays.n_detectors);
    for (size_t d = 0; d < arrays.n_detectors; ++d) events[s][d] = arrays.det(s, d);
  }
  return events;
}

struct LogicalSummary {
  double logical_error = 0;
  size_t shots = 0;
  std::vector<uint8_t> per_shot_error;
  std::vector<double> per_shot_confidence;
};

// Bare decoding: declared observables have true value 0 for these circuits.
LogicalSummary decode_logical(const Circuit& noisy, const DetectorErrorModel& dem,
                              const ShotBatch& batch, int threads, uint64_t obs_index = 0) {
  LogicalSummary out;
  std::vector<uint8_t> dets, obs;
  std::vector<std::vector<uint8_t>> events(batch.n_shots);
  std::vector<uint8_t> obs_bits(batch.n_shots);
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(noisy, batch, s, dets, obs);
    events[s] = dets;
    obs_bits[s] = obs[obs_index];
  }
  auto results = decode_batch(dem, events, {}, threads);
  out.shots = batch.n_shots;
  out.per_shot_error.resize(batch.n_shots);
  out.per_shot_confidence.resize(batch.n_shots);
  for (size_t s = 0; s < batch.n_shots; ++s) {
    uint8_t predicted = uint8_t((results[s].observable_flips >> obs_index) & 1);
    out.per_shot_error[s] = uint8_t(predicted ^ obs_bits[s]);
    out.per_shot_confidence[s] = results[s].confidence;
    out.logical_error += out.per_shot_error[s];
  }
  out.logical_error /= double(batch.n_shots);
  return out;
}

// Loss-aware decoding: per-shot conditioned models for lossy shots.
LogicalSummary decode_logical_loss_aware(const GeneratedCircuit& gen, const Circuit& noisy,
                                         const DetectorErrorModel& dem, const ShotBatch& batch,
                                         int threads, uint64_t obs_index = 0) {
  DemDecoder bare(dem);
  LogicalSummary out;
  out.shots = batch.n_shots;
  out.per_shot_error.resize(batch.n_shots);
  out.per_shot_confidence.resize(batch.n_shots);
  (void)threads;
  std::vector<uint8_t> dets, obs;
  for (size_t s = 0; s < batch.n_shots; ++s) {
    compute_detector_bits(noisy, batch, s, dets, obs);
    auto lost = batch.lost_records(s);
    uint8_t predicted, value;
    double confidence;
    if (lost.empty()) {
      auto res = bare.decode(dets);
      predicted = uint8_t((res.observable_flips >> obs_index) & 1);
      value = obs[obs_index];
      confidence = res.confidence;
    } else {
      auto cond = condition_dem_on_loss(dem, noisy, gen.geometry, batch, s);
      std::vector<uint8_t> merged;
      cond.transform.apply(dets, merged);
      auto res = DemDecoder(cond.dem).decode(merged);
      predicted = uint8_t((res.observable_flips >> obs_index) & 1);
      uint8_t patched = obs[obs_index];
      for (uint32_t pd : cond.transform.observable_patches[obs_index]) patched ^= dets[pd];
      value = patched;
      confidence = res.confidence;
    }
    out.per_shot_error[s] = uint8_t(predicted ^ value);
    out.per_shot_confidence[s] = confidence;
    out.logical_error += out.per_shot_error[s];
  }
  out.logical_error /= double(batch.n_shots);
  return out;
}

std::pair<double, double> bootstrap_ratio_ci(const std::vector<uint8_t>& err_small,
                                             const std::vector<uint8_t>& err_large, double rounds,
                                             uint64_t seed, int resamples = 400) {
  std::mt19937_64 gen(seed);
  std::vector<double> ratios;
  for (int b = 0; b < resamples; ++b) {
    auto resample = [&](const std::vector<uint8_t>& v) {
      size_t n = v.size();
      size_t cnt = 0;
      for (size_t i = 0; i < n; ++i) cnt += v[gen() % n];
      return double(cnt) / double(n);
    };
    double ps = resample(err_small), pl = resample(err_large);
    ps = std::min(ps, 0.49999);
    pl = std::max(std::min(pl, 0.49999), 1e-9);
    ratios.push_back(lepr(ps, rounds) / std::max(lepr(pl, rounds), 1e-12));
  }
  std::sort(ratios.begin(), ratios.end());
  return {ratios[size_t(0.025 * resamples)], ratios[size_t(0.975 * resamples) - 1]};
}

std::string stats_csv(const DetectorStats& stats) {
  std::ostringstream out;
  out << "detector,rate,valid_fraction\n";
  for (size_t d = 0; d < stats.per_detector_rate.size(); ++d)
    out << d << ',' << fmt_g(stats.per_detector_rate[d]) << ','
        << fmt_g(stats.per_detector_valid[d]) << '\n';
  return out.str();
}

std::string histogram_csv(const DetectorStats& stats) {
  std::ostringstream out;
  out << "fired_detectors,shots\n";
  for (size_t k = 0; k < stats.fired_histogram.size(); ++k)
    out << k << ',' << stats.fired_histogram[k] << '\n';
  return out.str();
}

std::string pij_csv(const Eigen::MatrixXd& pij) {
  std::ostringstream out;
  out << "i,j,p_ij\n";
  for (int i = 0; i < pij.rows(); ++i)
    for (int j = 0; j < pij.cols(); ++j) out << i << ',' << j << ',' << fmt_g(pij(i, j)) << '\n';
  return out.str();
}

int run_memory(const CommonOptions& opt, int d, int rounds, char basis,
               const std::string& ordering_name, bool xzzx, bool loss_aware,
               double acceptance_fraction) {
  uint64_t seed = resolve_seed(opt.seed);
  auto ordering = ordering_name == "same" ? CheckOrdering::SAME : CheckOrdering::N_Z_ZR_NR;
  auto variant = xzzx ? SurfaceVariant::XZZX : SurfaceVariant::CSS;
  auto gen = surface_code_memory(d, rounds, basis, ordering, variant);
  auto model = resolve_model(opt);
  auto noisy = apply_noise(gen.circuit, model);
  SampleOptions sopt;
  sopt.threads = opt.threads;
  auto batch = sample_shots(noisy, opt.shots, seed, sopt);
  auto arrays = extract_detectors(noisy, batch, resolve_policy(opt.policy), &gen.geometry);
  auto stats = detector_stats(arrays);
  auto pij = pij_matrix(arrays);
  auto dem = build_dem(noisy);
  auto summary = loss_aware
                     ? decode_logical_loss_aware(gen, noisy, dem, batch, opt.threads)
                     : decode_logical(noisy, dem, batch, opt.threads);

  double p_l = summary.logical_error;
  if (acceptance_fraction < 1.0) {
    std::vector<DecodeResult> conf(summary.shots);
    for (size_t s = 0; s < summary.shots; ++s) conf[s].confidence = summary.per_shot_confidence[s];
    auto kept = postselect_confidence(conf, acceptance_fraction);
    size_t errs = 0;
    for (size_t s : kept.accepted) errs += summary.per_shot_error[s];
    p_l = double(errs) / double(kept.accepted.size());
  }
  double rate = lepr(std::min(p_l, 0.5), rounds);

  ensure_dir(opt.out_dir);
  std::ostringstream lepr_csv;
  lepr_csv << "d,rounds,basis,shots,logical_error,lepr,mean_detector_error\n";
  lepr_csv << d << ',' << rounds << ',' << basis << ',' << opt.shots << ',' << fmt_g(p_l) << ','
           << fmt_g(rate) << ',' << fmt_g(stats.mean_rate) << '\n';
  write_file(opt.out_dir + "/lepr.csv", lepr_csv.str());
  write_file(opt.out_dir + "/detector_stats.csv", stats_csv(stats));
  write_file(opt.out_dir + "/detector_histogram.csv", histogram_csv(stats));
  write_file(opt.out_dir + "/pij.csv", pij_csv(pij));
  write_file(opt.out_dir + "/circuit.txt", noisy.to_text());
  write_file(opt.out_dir + "/geometry.json", gen.geometry.to_json());
  write_metadata(opt.out_dir,
                 {{"experiment", "memory"},
                  {"d", std::to_string(d)},
                  {"rounds", std::to_string(rounds)},
                  {"basis", std::string(1, basis)},
                  {"policy", opt.policy},
                  {"loss_aware", loss_aware ? "true" : "false"},
                  {"acceptance_fraction", fmt_g(acceptance_fraction)},
                  {"shots", std::to_string(opt.shots)}},
                 noisy, &model, seed);
  std::cout << "memory d=" << d << " rounds=" << rounds << " basis=" << basis
            << " logical_error=" << fmt_g(p_l) << " lepr=" << fmt_g(rate)
            << " mean_detector_error=" << fmt_g(stats.mean_rate) << "\n";
  return 0;
}

int run_bell(const CommonOptions& opt, int d, int n_per_round, double pm) {
  uint64_t seed = resolve_seed(opt.seed);
  auto model = resolve_model(opt);
  std::ostringstream csv;
  csv << "basis,n_per_round,pm,bell_error,epsilon\n";
  double mean_err = 0;
  for (char basis : {'X', 'Z'}) {
    auto gen = transversal_cnot_bell(d, n_per_round, basis);
    auto noisy = apply_noise(gen.circuit, model);
    SampleOptions sopt;
    sopt.threads = opt.threads;
    auto batch = sample_shots(noisy, opt.shots, seed + (basis == 'X' ? 0 : 1), sopt);
    if (pm > 0) {
      std::vector<uint8_t> flippable(batch.n_records, 0);
      for (size_t r = 0; r < batch.n_records; ++r)
        if (gen.geometry.record_roles[r].kind == RecordRole::ANCILLA) flippable[r] = 1;
      batch = inject_measurement_error(batch, pm, seed + 7, flippable);
    }
    auto dem = build_dem(noisy);
    auto summary = decode_logical(noisy, dem, batch, opt.threads);
    mean_err += summary.logical_error / 2;
    csv << basis << ',' << n_per_round << ',' << fmt_g(pm) << ','
        << fmt_g(summary.logical_error) << ','
        << fmt_g(epsilon_per_logical_op(std::min(summary.logical_error, 0.4999), n_per_round))
        << '\n';
  }
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir + "/bell.csv", csv.str());
  auto gen = transversal_cnot_bell(d, n_per_round, 'X');
  write_metadata(opt.out_dir,
                 {{"experiment", "bell"},
                  {"d", std::to_string(d)},
                  {"n_per_round", std::to_string(n_per_round)},
                  {"pm", fmt_g(pm)}},
                 gen.circuit, &model, seed);
  std::cout << "bell d=" << d << " N=" << n_per_round << " pm=" << fmt_g(pm)
            << " mean_bell_error=" << fmt_g(mean_err) << "\n";
  return 0;
}

int run_surgery(const CommonOptions& opt, int d, int rounds, double pm, bool error_detect) {
  uint64_t seed = resolve_seed(opt.seed);
  auto model = resolve_model(opt);
  std::ostringstream csv;
  csv << "observable,pm,error,accepted_fraction\n";
  double zz_err = 0;
  {
    auto gen = lattice_surgery_zz(d, rounds, 'Z');
    auto noisy = apply_noise(gen.circuit, model);
    SampleOptions sopt;
    sopt.threads = opt.threads;
    auto batch = sample_shots(noisy, opt.shots, seed, sopt);
    if (pm > 0) {
      std::vector<uint8_t> flippable(batch.n_records, 0);
      for (size_t r = 0; r < batch.n_records; ++r)
        if (gen.geometry.record_roles[r].kind == RecordRole::ANCILLA) flippable[r] = 1;
      batch = inject_measurement_error(batch, pm, seed + 7, flippable);
    }
    auto dem = build_dem(noisy);
    // decode the consistency observable (index 2): seam-derived vs
    // data-derived ZZ disagreement is the logical error.
    auto summary = decode_logical(noisy, dem, batch, opt.threads, 2);
    double accepted = 1.0;
    if (error_detect) {
      // keep shots whose seam checks repeat identically across rounds
      auto seam = surgery_seam_records(gen);
      std::vector<size_t> kept;
      for (size_t s = 0; s < batch.n_shots; ++s) {
        std::map<int, std::vector<uint8_t>> per_check;
        for (size_t r : seam)
          per_check[gen.geometry.record_roles[r].check].push_back(batch.record(s, r));
        bool ok = true;
        for (auto& [c, vals] : per_check)
          for (size_t i = 1; i < vals.size(); ++i) ok &= vals[i] == vals[0];
        if (ok) kept.push_back(s);
      }
      size_t errs = 0;
      for (size_t s : kept) errs += summary.per_shot_error[s];
      zz_err = kept.empty() ? 0.0 : double(errs) / double(kept.size());
      accepted = double(kept.size()) / double(batch.n_shots);
    } else {
      zz_err = summary.logical_error;
    }
    csv << "ZZ," << fmt_g(pm) << ',' << fmt_g(zz_err) << ',' << fmt_g(accepted) << '\n';
  }
  {
    auto gen = lattice_surgery_zz(d, rounds, 'X');
    auto noisy = apply_noise(gen.circuit, model);
    SampleOptions sopt;
    sopt.threads = opt.threads;
    auto batch = sample_shots(noisy, opt.shots, seed + 1, sopt);
    auto dem = build_dem(noisy);
    auto summary = decode_logical(noisy, dem, batch, opt.threads, 0);
    csv << "XX," << fmt_g(pm) << ',' << fmt_g(summary.logical_error) << ",1\n";
  }
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir + "/surgery.csv", csv.str());
  auto gen = lattice_surgery_zz(d, rounds, 'Z');
  write_metadata(opt.out_dir,
                 {{"experiment", "surgery"}, {"d", std::to_string(d)}, {"pm", fmt_g(pm)}},
                 gen.circuit, &model, seed);
  std::cout << "surgery d=" << d << " pm=" << fmt_g(pm) << " zz_error=" << fmt_g(zz_err) << "\n";
  return 0;
}

int run_rotate(const CommonOptions& opt, const std::string& family_name, double phi_max, int steps,
               bool flip_signs, int trajectories) {
  uint64_t seed = resolve_seed(opt.seed);
  std::optional<HypercubeFamily> family;
  if (family_name == "steane")
    family = HypercubeFamily::STEANE_7_1_3;
  else if (family_name == "rm15")
    family = HypercubeFamily::REED_MULLER_15_1_3;
  else if (family_name == "c1664")
    family = HypercubeFamily::CODE_16_6_4;
  else if (family_name != "unencoded")
    throw CLI::ValidationError("--family", "unknown family " + family_name);
  std::vector<double> phis;
  for (int i = 0; i <= steps; ++i) phis.push_back(phi_max * i / steps);
  std::vector<uint32_t> signs;
  if (flip_signs && family) signs = corner_sign_flips(*family);
  auto scan = global_rotation_scan(family, phis, signs, trajectories, seed);
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "phi,logical,stabilizer_mean\n";
  for (size_t i = 0; i < phis.size(); ++i)
    csv << fmt_g(scan.phis[i]) << ',' << fmt_g(scan.logical[i]) << ','
        << fmt_g(scan.stabilizer_mean[i]) << '\n';
  write_file(opt.out_dir + "/rotation_scan.csv", csv.str());
  std::map<std::string, std::string> meta{{"experiment", "rotate"},
                                          {"family", family_name},
                                          {"signs", flip_signs ? "flipped" : "positive"},
                                          {"seed", std::to_string(seed)},
                                          {"schema_version", "1"}};
  write_file(opt.out_dir + "/metadata.json", metadata_json(meta));
  std::cout << "rotate family=" << family_name << " points=" << phis.size() << "\n";
  return 0;
}

int run_angle_synth(const CommonOptions& opt, int max_t, double target_theta, double target_phi,
                    bool have_target) {
  auto set = ht_angle_set(max_t);
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "sequence,t_count,theta,phi\n";
  for (const auto& r : set.records)
    csv << (r.sequence.empty() ? "I" : r.sequence) << ',' << r.t_count << ',' << fmt_g(r.theta)
        << ',' << fmt_g(r.phi) << '\n';
  write_file(opt.out_dir + "/angles.csv", csv.str());
  std::map<std::string, std::string> meta{{"experiment", "angle-synth"},
                                          {"max_t", std::to_string(max_t)},
                                          {"min_separation", fmt_g(set.min_separation)},
                                          {"schema_version", "1"}};
  std::cout << "angle-synth max_t=" << max_t << " angles=" << set.records.size()
            << " min_separation=" << fmt_g(set.min_separation) << "\n";
  if (have_target) {
    auto synth = synthesize_angle(target_theta, target_phi, max_t);
    meta["best_sequence"] = synth.best.sequence.empty() ? "I" : synth.best.sequence;
    meta["angular_error"] = fmt_g(synth.angular_error);
    std::cout << "  best sequence: " << (synth.best.sequence.empty() ? "I" : synth.best.sequence)
              << " epsilon=" << fmt_g(synth.angular_error) << "\n";
  }
  write_file(opt.out_dir + "/metadata.json", metadata_json(meta));
  return 0;
}

int run_cluster(const CommonOptions& opt, const std::string& family_name,
                const std::string& geometry_name, int layers, int width,
                const std::string& gate_name, int permute_layer, double acceptance_fraction) {
  uint64_t seed = resolve_seed(opt.seed);
  HypercubeFamily family = family_name == "c1664" ? HypercubeFamily::CODE_16_6_4
                                                  : HypercubeFamily::STEANE_7_1_3;
  ClusterOptions copt;
  copt.width = width;
  copt.gate = gate_name == "cnot" ? ClusterGate::CNOT : ClusterGate::CZ;
  copt.permutation_layer = permute_layer;
  auto geometry =
      geometry_name == "2d" ? ClusterGeometry::TWO_D : ClusterGeometry::ONE_D_TIME;
  auto gen = cluster_state_circuit(family, geometry, layers, copt);
  auto model = resolve_model(opt);
  auto noisy = apply_noise(gen.circuit, model);
  SampleOptions sopt;
  sopt.threads = opt.threads;
  auto batch = sample_shots(noisy, opt.shots, seed, sopt);

  std::optional<std::vector<size_t>> accepted;
  if (acceptance_fraction < 1.0) {
    // Confidence postselection from the MLE decode of the full batch.
    auto dem = build_dem(noisy);
    std::vector<uint8_t> dets, obs;
    std::vector<std::vector<uint8_t>> events(batch.n_shots);
    for (size_t s = 0; s < batch.n_shots; ++s) {
      compute_detector_bits(noisy, batch, s, dets, obs);
      events[s] = dets;
    }
    auto results = decode_batch(dem, events, {}, opt.threads);
    auto kept = postselect_confidence(results, acceptance_fraction);
    accepted = kept.accepted;
  }
  auto corr = cluster_correlators(gen, batch, accepted ? &*accepted : nullptr);
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "separation,logical_correlator,physical_covariance,physical_sigma\n";
  for (size_t i = 0; i < corr.separation.size(); ++i)
    csv << fmt_g(corr.separation[i]) << ',' << fmt_g(corr.logical_correlator[i]) << ','
        << fmt_g(corr.physical_covariance[i]) << ',' << fmt_g(corr.physical_sigma[i]) << '\n';
  write_file(opt.out_dir + "/cluster_correlators.csv", csv.str());
  write_metadata(opt.out_dir,
                 {{"experiment", "cluster"},
                  {"family", family_name},
                  {"geometry", geometry_name},
                  {"gate", gate_name},
                  {"layers", std::to_string(layers)},
                  {"acceptance_fraction", fmt_g(acceptance_fraction)}},
                 noisy, &model, seed);
  std::cout << "cluster family=" << family_name << " layers=" << layers
            << " gate=" << gate_name << " separations=" << corr.separation.size() << "\n";
  return 0;
}

int run_coherent(const CommonOptions& opt, double theta_frac, int rounds) {
  uint64_t seed = resolve_seed(opt.seed);
  double theta = 2 * 3.14159265358979323846 * theta_frac;
  auto res = coherent_qec_sim(theta, rounds, opt.shots, seed);
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "theta_frac,rounds,shots,logical_error,same_basis,orthogonal_basis,orthogonal_sigma\n";
  csv << fmt_g(theta_frac) << ',' << rounds << ',' << opt.shots << ','
      << fmt_g(res.logical_error) << ',' << fmt_g(res.same_basis) << ','
      << fmt_g(res.orthogonal_basis) << ',' << fmt_g(res.orthogonal_sigma) << '\n';
  write_file(opt.out_dir + "/coherent.csv", csv.str());
  std::map<std::string, std::string> meta{{"experiment", "coherent"},
                                          {"theta_frac", fmt_g(theta_frac)},
                                          {"rounds", std::to_string(rounds)},
                                          {"seed", std::to_string(seed)},
                                          {"schema_version", "1"}};
  write_file(opt.out_dir + "/metadata.json", metadata_json(meta));
  std::cout << "coherent theta/2pi=" << fmt_g(theta_frac) << " rounds=" << rounds
            << " logical_error=" << fmt_g(res.logical_error)
            << " orthogonal=" << fmt_g(res.orthogonal_basis) << "\n";
  return 0;
}

int run_distance(const CommonOptions& opt, int d, int rounds, char basis,
                 const std::string& ordering_name, size_t max_weight) {
  auto ordering = ordering_name == "same" ? CheckOrdering::SAME : CheckOrdering::N_Z_ZR_NR;
  auto gen = surface_code_memory(d, rounds, basis, ordering);
  auto model = resolve_model(opt);
  auto noisy = apply_noise(gen.circuit, model);
  auto dem = build_dem(noisy);
  auto dist = circuit_distance(dem, max_weight);
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "d,rounds,basis,ordering,max_weight,distance\n";
  csv << d << ',' << rounds << ',' << basis << ',' << ordering_name << ',' << max_weight << ','
      << (dist ? std::to_string(*dist) : std::string("exceeds")) << '\n';
  write_file(opt.out_dir + "/distance.csv", csv.str());
  std::cout << "distance d=" << d << " ordering=" << ordering_name << " -> "
            << (dist ? std::to_string(*dist) : std::string("exceeds max_weight")) << "\n";
  return 0;
}

int run_budget(const CommonOptions& opt, int d, int rounds, char basis) {
  uint64_t seed = resolve_seed(opt.seed);
  auto gen = surface_code_memory(d, rounds, basis);
  auto model = resolve_model(opt);
  auto budget = error_budget(gen, model, opt.shots, seed, resolve_policy(opt.policy));
  ensure_dir(opt.out_dir);
  std::ostringstream csv;
  csv << "channel,contribution\n";
  for (auto& e : budget) csv << e.channel << ',' << fmt_g(e.contribution) << '\n';
  write_file(opt.out_dir + "/budget.csv", csv.str());
  std::cout << "budget channels=" << budget.size() << "\n";
  for (auto& e : budget) std::cout << "  " << e.channel << ": " << fmt_g(e.contribution) << "\n";
  return 0;
}

int run_tune(const CommonOptions& opt, int d, int rounds, char basis, int evals, double perturb) {
  uint64_t seed = resolve_seed(opt.seed);
  auto gen = surface_code_memory(d, rounds, basis);
  auto truth = resolve_model(opt);
  auto reference = simulate_detector_rates(gen, truth, opt.shots, seed);
  NoiseModel initial = truth;
  if (perturb != 0) {
    std::mt19937_64 prng(seed + 17);
    std::uniform_real_distribution<double> factor(1 - perturb, 1 + perturb);
    for (auto member : {&NoiseModel::single_qubit_gate, &NoiseModel::two_qubit_gate,
                        &NoiseModel::idle_per_tick, &NoiseModel::reset, &NoiseModel::measure}) {
      (initial.*member).pauli *= factor(prng);
      (initial.*member).loss *= factor(prng);
    }
  }
  auto tuned = tune_error_model(gen, reference, initial, opt.shots, evals, seed + 1);
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir + "/tuned_model.json", tuned.model.to_json());
  std::map<std::string, std::string> meta{{"experiment", "tune"},
                                          {"objective", fmt_g(tuned.objective)},
                                          {"budget_exhausted", tuned.budget_exhausted ? "true" : "false"},
                                          {"schema_version", "1"}};
  write_file(opt.out_dir + "/metadata.json", metadata_json(meta));
  std::cout << "tune objective=" << fmt_g(tuned.objective)
            << (tuned.budget_exhausted ? " (budget exhausted)" : "") << "\n";
  return 0;
}

int run_sample(const CommonOptions& opt, int d, int rounds, char basis) {
  uint64_t seed = resolve_seed(opt.seed);
  auto gen = surface_code_memory(d, rounds, basis);
  auto model = resolve_model(opt);
  auto noisy = apply_noise(gen.circuit, model);
  SampleOptions sopt;
  sopt.threads = opt.threads;
  auto batch = sample_shots(noisy, opt.shots, seed, sopt);
  auto arrays = extract_detectors(noisy, batch, resolve_policy(opt.policy), &gen.geometry);
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir + "/records.csv", shot_records_csv(batch));
  write_file(opt.out_dir + "/events.csv", detector_events_csv(detector_events_of(arrays)));
  write_file(opt.out_dir + "/circuit.txt", noisy.to_text());
  write_file(opt.out_dir + "/geometry.json", gen.geometry.to_json());
  write_file(opt.out_dir + "/model.dem", build_dem(noisy).to_text());
  write_metadata(opt.out_dir, {{"experiment", "sample"}}, noisy, &model, seed);
  std::cout << "sample wrote " << opt.shots << " shots to " << opt.out_dir << "\n";
  return 0;
}

int run_decode(const CommonOptions& opt, const std::string& dem_path,
               const std::string& events_path) {
  auto dem = DetectorErrorModel::from_text(read_file(dem_path));
  auto events = parse_detector_events_csv(read_file(events_path));
  std::vector<DecodeResult> results(events.size());
  DemDecoder decoder(dem);
  for (size_t s = 0; s < events.size(); ++s) {
    try {
      results[s] = decoder.decode(events[s]);
    } catch (const std::exception&) {
      results[s].status = DecodeStatus::REJECTED;
      results[s].confidence = 0.5;
    }
  }
  ensure_dir(opt.out_dir);
  write_file(opt.out_dir + "/decoded.csv", decode_results_csv(results, dem.num_observables));
  std::cout << "decode wrote " << results.size() << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loss-aware stabilizer-circuit workbench"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI-style config file");

  CommonOptions opt;
  int d = 3, rounds = 4, logic_n = 3, layers = 8, width = 1, max_t = 6, evals = 60;
  int permute_layer = -1, trajectories = 32, steps = 64, qec_rounds = 1;
  std::string basis = "Z", ordering = "nzzrnr", family = "steane", geometry = "1d", gate = "cz";
  std::string dem_path, events_path;
  double pm = 0, phi_max = 6.283185307179586, target_theta = 0, target_phi = 0;
  double acceptance = 1.0, theta_frac = 0.016, perturb = 0.5;
  size_t max_weight = 4;
  bool xzzx = false, loss_aware = false, flip_signs = false, error_detect = false,
       have_target = false;

  auto* memory = app.add_subcommand("memory", "repeated stabilizer rounds on one code patch");
  add_common(memory, opt);
  memory->add_option("--d", d, "code distance (odd)");
  memory->add_option("--rounds", rounds, "stabilizer rounds");
  memory->add_option("--basis", basis, "memory basis X or Z");
  memory->add_option("--ordering", ordering, "check stroke ordering: same|nzzrnr");
  memory->add_flag("--xzzx", xzzx, "dressed variant");
  memory->add_flag("--loss-aware", loss_aware, "condition the decoder on observed losses");
  memory->add_option("--acceptance-fraction", acceptance, "confidence postselection fraction");

  auto* bell = app.add_subcommand("bell", "transversal CNOT Bell pairs with interleaved rounds");
  add_common(bell, opt);
  bell->add_option("--d", d, "code distance");
  bell->add_option("--n-per-round", logic_n, "transversal CNOTs per logic round");
  bell->add_option("--pm", pm, "injected ancilla measurement error");

  auto* surgery = app.add_subcommand("surgery", "joint ZZ measurement through a seam");
  add_common(surgery, opt);
  surgery->add_option("--d", d, "code distance");
  surgery->add_option("--rounds", rounds, "merge rounds");
  surgery->add_option("--pm", pm, "injected ancilla measurement error");
  surgery->add_flag("--error-detect", error_detect, "postselect on repeated seam outcomes");

  auto* rotate = app.add_subcommand("rotate", "global RZ scans over encoded blocks");
  add_common(rotate, opt, false);
  rotate->add_option("--family", family, "steane|rm15|c1664|unencoded");
  rotate->add_option("--phi-max", phi_max, "scan endpoint");
  rotate->add_option("--steps", steps, "grid steps");
  rotate->add_flag("--flip-signs", flip_signs, "negative-sign preparation");
  rotate->add_option("--trajectories", trajectories, "decoding trajectories per point");

  auto* synth = app.add_subcommand("angle-synth", "enumerate H/T angles and synthesize targets");
  add_common(synth, opt, false);
  synth->add_option("--max-t", max_t, "maximum T count");
  auto* topt = synth->add_option("--target-theta", target_theta, "target polar angle");
  synth->add_option("--target-phi", target_phi, "target azimuth");
  topt->each([&](const std::string&) { have_target = true; });

  auto* cluster = app.add_subcommand("cluster", "teleported cluster states of encoded blocks");
  add_common(cluster, opt);
  cluster->add_option("--family", family, "steane|c1664");
  cluster->add_option("--geometry", geometry, "1d|2d");
  cluster->add_option("--layers", layers, "number of layers");
  cluster->add_option("--width", width, "blocks per layer (2d)");
  cluster->add_option("--gate", gate, "cz|cnot");
  cluster->add_option("--permute-layer", permute_layer, "apply the block permutation from this layer");
  cluster->add_option("--acceptance-fraction", acceptance, "confidence postselection fraction");

  auto* coherent = app.add_subcommand("coherent", "coherent rotation injections with QEC rounds");
  add_common(coherent, opt, false);
  coherent->add_option("--theta-frac", theta_frac, "rotation per time-step over 2 pi");
  coherent->add_option("--rounds", qec_rounds, "active QEC round slots (0..5)");
  coherent->add_option("--shots", opt.shots, "trajectories");

  auto* distance = app.add_subcommand("distance", "minimum undetectable mechanism set");
  add_common(distance, opt);
  distance->add_option("--d", d, "code distance");
  distance->add_option("--rounds", rounds, "stabilizer rounds");
  distance->add_option("--basis", basis, "X or Z");
  distance->add_option("--ordering", ordering, "same|nzzrnr");
  distance->add_option("--max-weight", max_weight, "search cap (<= 6)");

  auto* budget = app.add_subcommand("budget", "per-channel detector-error contributions");
  add_common(budget, opt);
  budget->add_option("--d", d, "code distance");
  budget->add_option("--rounds", rounds, "stabilizer rounds");
  budget->add_option("--basis", basis, "X or Z");

  auto* tune = app.add_subcommand("tune", "recover error rates from detector statistics");
  add_common(tune, opt);
  tune->add_option("--d", d, "code distance");
  tune->add_option("--rounds", rounds, "stabilizer rounds");
  tune->add_option("--basis", basis, "X or Z");
  tune->add_option("--evals", evals, "objective evaluation budget");
  tune->add_option("--perturb", perturb, "initial rate perturbation (fraction)");

  auto* sample = app.add_subcommand("sample", "emit circuit, shots, events and the error model");
  add_common(sample, opt);
  sample->add_option("--d", d, "code distance");
  sample->add_option("--rounds", rounds, "stabilizer rounds");
  sample->add_option("--basis", basis, "X or Z");

  auto* decode = app.add_subcommand("decode", "batch most-likely-error decoding");
  add_common(decode, opt, false);
  decode->add_option("--dem", dem_path, "error model file")->required();
  decode->add_option("--events", events_path, "detector event CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (memory->parsed())
      return run_memory(opt, d, rounds, basis[0], ordering, xzzx, loss_aware, acceptance);
    if (bell->parsed()) return run_bell(opt, d, logic_n, pm);
    if (surgery->parsed()) return run_surgery(opt, d, rounds, pm, error_detect);
    if (rotate->parsed()) return run_rotate(opt, family, phi_max, steps, flip_signs, trajectories);
    if (synth->parsed()) return run_angle_synth(opt, max_t, target_theta, target_phi, have_target);
    if (cluster->parsed())
      return run_cluster(opt, family, geometry, layers, width, gate, permute_layer, acceptance);
    if (coherent->parsed()) return run_coherent(opt, theta_frac, qec_rounds);
    if (distance->parsed()) return run_distance(opt, d, rounds, basis[0], ordering, max_weight);
    if (budget->parsed()) return run_budget(opt, d, rounds, basis[0]);
    if (tune->parsed()) return run_tune(opt, d, rounds, basis[0], evals, perturb);
    if (sample->parsed()) return run_sample(opt, d, rounds, basis[0]);
    if (decode->parsed()) return run_decode(opt, dem_path, events_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
