#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qecw/decoder.hpp"
#include "qecw/detectors.hpp"
#include "qecw/generators.hpp"
#include "qecw/noise.hpp"

namespace qecw {

struct DetectorStats {
  std::vector<double> per_detector_rate;   // weighted error probability per slot
  std::vector<double> per_detector_valid;  // valid-shot fraction per slot
  double mean_rate = 0;                    // over deterministic detectors with data
  std::vector<size_t> fired_histogram;     // per-shot fired-detector counts
};

DetectorStats detector_stats(const DetectorArrays& arrays);

// Pairwise detection correlation probabilities. Entries with degenerate
// denominators are NaN; radicands above 1 clip to 0.
Eigen::MatrixXd pij_matrix(const DetectorArrays& arrays);

// Logical error per round and related closed forms.
double lepr(double p_l, double rounds);
double lepr_multi(double p_l, double rounds, int n_logical);
double epsilon_per_logical_op(double p_l, int n_gates_per_round);
double lambda_ratio(double lepr_small_d, double lepr_large_d);

struct GateModelFit {
  double amplitude = 0;   // A
  double p_qec = 0;
  double delta_p_det = 0;
  double residual = 0;
  bool converged = false;
};

// Least squares of  A (p_qec + N dp)^((d+1)/2)  to (N, logical error) data.
GateModelFit fit_gate_model(const std::vector<std::pair<double, double>>& data, int d);

struct ClusterCorrelators {
  std::vector<double> separation;           // in layers
  std::vector<double> logical_correlator;   // product of intervening cluster stabilizers
  std::vector<double> physical_covariance;  // same-stabilizer error covariance
  std::vector<double> physical_sigma;       // standard error per separation
};

// batch must come from cluster_state_circuit; postselected_shots (optional)
// restricts the shots entering the averages.
ClusterCorrelators cluster_correlators(const GeneratedCircuit& gen, const ShotBatch& batch,
                                       const std::vector<size_t>* accepted_shots = nullptr);

// Composite operator weights of the co-propagating cluster stabilizers
// (counts of constituent weight-3 stabilizers per closed chain product)
// after the block permutation braids the logical pairing.
std::vector<int> co_propagating_weights(HypercubeFamily family, bool with_permutation);

// Minimum-cardinality mechanism set with empty detector signature and a
// nonzero observable flip, via meet-in-the-middle over signatures.
std::optional<size_t> circuit_distance(const DetectorErrorModel& dem, size_t max_weight);

struct BudgetEntry {
  std::string channel;
  double contribution = 0;  // relative drop in mean detector error when removed
};

std::vector<BudgetEntry> error_budget(const GeneratedCircuit& gen, const NoiseModel& model,
                                      size_t shots, uint64_t seed,
                                      LossPolicy policy = LossPolicy::BARE);

struct TuneResult {
  NoiseModel model;
  double objective = 0;
  bool budget_exhausted = false;
};

// Derivative-free coordinate search matching simulated per-detector rates
// to the reference rates.
TuneResult tune_error_model(const GeneratedCircuit& gen, const std::vector<double>& reference_rates,
                            NoiseModel initial, size_t shots_per_eval, int max_evals,
                            uint64_t seed);

// Per-detector BARE rates for a model, used by the tuner and budget.
std::vector<double> simulate_detector_rates(const GeneratedCircuit& gen, const NoiseModel& model,
                                            size_t shots, uint64_t seed);

}  // namespace qecw
