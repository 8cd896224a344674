#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qecw/code.hpp"
#include "qecw/generators.hpp"
#include "qecw/statevector.hpp"

namespace qecw {

// Whether the transversal T layer on the [[15,1,3]] block implements the
// logical T-dagger (the alternative being logical T). Fixed once by exact
// simulation; see the unit test that asserts it.
inline constexpr bool kTransversalTIsLogicalTDag = true;

struct RotationScan {
  std::vector<double> phis;
  std::vector<double> logical;          // decoded logical X expectation
  std::vector<double> stabilizer_mean;  // mean stabilizer expectation
};

// Applies RZ(phi) to every physical qubit of the encoded |+L> and evaluates
// the logical X after ideal decoding (projective stabilizer measurement +
// lookup correction) plus the mean stabilizer sign. family = nullopt means
// one unencoded qubit.
RotationScan global_rotation_scan(std::optional<HypercubeFamily> family,
                                  const std::vector<double>& phis,
                                  const std::vector<uint32_t>& sign_flips = {},
                                  int trajectories = 32, uint64_t seed = 0);

// The four corner qubits whose X flips give the negative-sign preparation.
std::vector<uint32_t> corner_sign_flips(HypercubeFamily family);

struct AngleRecord {
  std::string sequence;  // word over H/T, applied left to right to |+>
  int t_count = 0;
  double theta = 0;  // polar angle from +Z
  double phi = 0;    // azimuth
};

struct AngleSet {
  std::vector<AngleRecord> records;  // deduplicated
  double min_separation = 0;         // smallest pairwise great-circle angle
};

// Enumerates canonicalized H/T words with at most max_t T gates acting on
// |+>, deduplicated to 1e-9 angular separation.
AngleSet ht_angle_set(int max_t);

struct SynthesisResult {
  AngleRecord best;
  double angular_error = 0;
};

// Nearest generated angle to the target Bloch direction.
SynthesisResult synthesize_angle(double target_theta, double target_phi, int max_t);

struct TeleportOutcome {
  std::vector<uint8_t> source_x_outcomes;  // transversal X readout of the source
  int feedforward = 0;                     // decoded logical X outcome
  StateVector state;                       // target block (7 qubits)
};

// Transversal CZ between the face of a [[15,1,3]] block and a [[7,1,3]]
// block in |+L>, then transversal X readout of the source and software
// feedforward. t_layers counts transversal T layers applied to the source
// |+L> first, so t_layers = 0 teleports H|psi> and t_layers = 1 teleports
// the logical T onto the 2D code (up to the documented dagger convention).
TeleportOutcome teleport_logical(int t_layers, uint64_t seed);

// Runs an alternating sequence of transversal-T layers and teleportations;
// returns the Bloch angles of the resulting single-qubit logical state.
// t_runs[i] is the number of T layers before the i-th teleport.
std::pair<double, double> teleport_chain_angles(const std::vector<int>& t_runs, uint64_t seed);

enum class ChshMode { PHYSICAL, LOGICAL };

// CHSH value S = E(X,T) + E(X,Tdag) + E(Y,T) - E(Y,Tdag) on a Bell pair.
// PHYSICAL uses two bare qubits; LOGICAL uses two [[7,1,3]] blocks with the
// T-side measured in the logical T basis. Exact at p = 0; depolarizing
// noise of strength p per physical qubit is averaged over trajectories.
double chsh(double p, ChshMode mode = ChshMode::LOGICAL, uint64_t seed = 0,
            int trajectories = 64);

// Entropy bounds: smallest region entropy of the maximally mixed logical
// state over all regions of the given size.
double min_region_entropy(const StabilizerCode& code, const GeneratedCircuit& encoder,
                          size_t region_size);

// Maximum output entanglement (over logical bipartitions and stabilizer
// product inputs) generated by the logical action of a physical unitary
// that preserves the code space. The physical op is given as a circuit on
// the code block.
double logical_operator_entanglement(const GeneratedCircuit& encoder, const Circuit& block_op);

struct CoherentQecResult {
  double logical_error = 0;     // after ideal-round lookup decoding
  double same_basis = 0;        // <X_L>
  double orthogonal_basis = 0;  // <Y_L>
  double orthogonal_sigma = 0;  // standard error of the mean
};

// Distance-3 surface-code trajectories with global RZ(theta) injected at
// every entangling time-step and `qec_rounds` of the five round slots
// active.
CoherentQecResult coherent_qec_sim(double theta_per_timestep, int qec_rounds, size_t shots,
                                   uint64_t seed);

}  // namespace qecw
