#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qecw/circuit.hpp"
#include "qecw/code.hpp"
#include "qecw/geometry.hpp"

namespace qecw {

struct ClusterStructure {
  int layers = 0;
  int width = 1;
  int k = 1;               // logicals per block
  size_t block_n = 0;      // physical qubits per block
  std::vector<char> block_basis;                    // per block (layer*width + x)
  std::vector<std::vector<size_t>> block_records;   // record index per local qubit
  std::vector<std::vector<uint32_t>> stab_x_support;  // local X-stabilizer supports
  std::vector<std::vector<uint32_t>> stab_z_support;
  std::vector<std::vector<uint32_t>> logical_x_support;  // per logical, local
  // (block, logical) pair behind each OBSERVABLE index.
  std::vector<std::pair<int, int>> observable_site;

  int block_of(int layer, int x = 0) const { return layer * width + x; }
};

struct GeneratedCircuit {
  Circuit circuit;  // noiseless; pass through apply_noise for sampling
  Geometry geometry;
  std::vector<StabilizerCode> codes;
  std::optional<ClusterStructure> cluster;
};

// ---- rotated surface code -------------------------------------------------

enum class CheckOrdering { SAME, N_Z_ZR_NR };
enum class SurfaceVariant { CSS, XZZX };

// d^2 data qubits, d^2-1 checks, `rounds` measure-and-reset stabilizer
// rounds between transversal preparation and readout in `basis`.
GeneratedCircuit surface_code_memory(int d, int rounds, char basis,
                                     CheckOrdering ordering = CheckOrdering::N_Z_ZR_NR,
                                     SurfaceVariant variant = SurfaceVariant::CSS);

// ---- transversal CNOT Bell pairs -------------------------------------------

// Two distance-d blocks in |+L>/|0L>, three logic rounds of N transversal
// CNOTs interleaved with stabilizer rounds, transversal readout of both
// blocks in `final_basis`. Declares the X1X2 (X basis) or Z1Z2 (Z basis)
// Bell parity when 3N is odd, else the deterministic single-block logical.
GeneratedCircuit transversal_cnot_bell(int d, int cnots_per_round, char final_basis,
                                       int logic_rounds = 3,
                                       CheckOrdering ordering = CheckOrdering::N_Z_ZR_NR);

// ---- lattice surgery -------------------------------------------------------

// Two codes in |+L> merged through a seam of Z checks for `rounds` rounds.
// final_basis Z declares: observable 0 = seam-derived Z1Z2 (round-1 seam
// product), observable 1 = data-derived Z1Z2, observable 2 = their
// consistency; final_basis X declares observable 0 = joint X1X2.
GeneratedCircuit lattice_surgery_zz(int d, int rounds = 2, char final_basis = 'Z');

// Record indices of seam-check measurements, for error-detection flags.
std::vector<size_t> surgery_seam_records(const GeneratedCircuit& g);

// ---- hypercube encoders ----------------------------------------------------

enum class HypercubeFamily { STEANE_7_1_3, REED_MULLER_15_1_3, CODE_16_6_4 };
enum class Puncture { NONE, TOP, BOTTOM };

// Shared hypercube CNOT skeleton with per-family input patterns. Prepares
// every logical wire in |0L> (prep_basis 'Z') or |+L> ('X'); sign_flips
// lists physical qubits X-flipped after encoding (negative stabilizers).
// Returns the encoding circuit and the extracted stabilizer code.
GeneratedCircuit hypercube_encoder(HypercubeFamily family, Puncture puncture = Puncture::NONE,
                                   char prep_basis = 'Z',
                                   const std::vector<uint32_t>& sign_flips = {});

// Default puncture for the punctured families (BOTTOM), full cube otherwise.
Puncture default_puncture(HypercubeFamily family);

// ---- logical cluster states -------------------------------------------------

enum class ClusterGeometry { ONE_D_TIME, TWO_D };
enum class ClusterGate { CZ, CNOT };

struct ClusterOptions {
  int width = 1;            // blocks per layer (TWO_D)
  ClusterGate gate = ClusterGate::CZ;
  // Layer index after which the in-block permutation is applied each layer;
  // -1 disables. Only valid for multi-logical families.
  int permutation_layer = -1;
};

// Teleportation cluster of encoded blocks: every layer encodes fresh blocks,
// entangles them transversally with the previous layer, and measures the
// older group in alternating X/Z bases. Declares the logical cluster
// stabilizers (X on a site, Z on its neighbors) as observables.
GeneratedCircuit cluster_state_circuit(HypercubeFamily family, ClusterGeometry geometry, int layers,
                                       const ClusterOptions& options = {});

namespace detail {
// Shared hypercube wiring used by the encoder and the cluster generator.
struct HypercubeSpec {
  HypercubeFamily family;
  char prep_basis = 'Z';
  int m = 4;
  int source = 0;                // corner the spreading is anchored to
  int punctured_vertex = -1;
  bool away_from_source = true;  // CNOT layer orientation
  std::vector<int> vertices;
  std::map<int, uint32_t> index_of;
  std::vector<int> plus_wires, zero_wires, logical_wires;
};
HypercubeSpec build_hypercube(HypercubeFamily family, Puncture puncture, char prep_basis);
}  // namespace detail

// ---- coherent rotations -----------------------------------------------------

// Inserts RZ(theta) on all data qubits at every entangling time-step.
// With twirl=true the rotations become Pauli-Z channels of probability
// sin^2(theta/2), consumable by the frame sampler.
Circuit inject_global_rotation(const Circuit& circuit, const std::vector<uint32_t>& data_qubits,
                               double theta_per_timestep, bool twirl = false);

}  // namespace qecw
