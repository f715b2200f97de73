#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqc1lab/matqm.hpp"
#include "dqc1lab/noise.hpp"

namespace dqc1lab::prep {

/// Defining action of an adaptive gate: one input pure state mapped to one
/// output pure state on the joint ancilla-register space.
struct TargetMap {
  Vector input;
  Vector output;
};

/// Unitary agreeing with the map on its (normalized) input, completed on the
/// orthogonal complement by Gram-Schmidt over the computational basis in
/// lexicographic (ancilla, Fock) order. Deterministic.
Operator complete_unitary(const HilbertSpec& space, const TargetMap& map);

struct AdaptiveStep {
  std::string branch_label;  // path over {0,1}, outcome g -> '0', e -> '1'
  TargetMap target_map;
  Operator completed_unitary;
};

struct MeasurementBranch {
  int outcome = 0;  // 0 = g, 1 = e
  double probability = 0.0;
  DensityMatrix post_state;
};

/// Projective ancilla z-basis measurement; returns both renormalized
/// branches (zero-probability branches are omitted).
std::vector<MeasurementBranch> measure_ancilla(const DensityMatrix& joint);

/// The single requested branch (0 = g, 1 = e). Throws
/// ZeroProbabilityBranch when that outcome has no support.
MeasurementBranch measure_ancilla_branch(const DensityMatrix& joint, int outcome);

/// Sampled variant: draws one branch. Throws ZeroProbabilityBranch if the
/// drawn branch has vanishing probability (cannot happen for valid states).
MeasurementBranch measure_ancilla_sampled(const DensityMatrix& joint, std::uint64_t& rng_state);

/// outcome e: apply sigma_x (x) I; outcome g: identity.
DensityMatrix reset_ancilla(const DensityMatrix& joint, int outcome);

/// Diagonal unitary encoding the calibrated measurement-induced phase per
/// photon number (|0> is the zero-phase reference). Single-Kraus channel on
/// the 8-level register.
QuantumChannel measurement_phase_channel();

struct ChannelTrace {
  std::map<std::string, double> branch_probabilities;       // depth-3 leaves
  std::map<std::string, DensityMatrix> branch_states;       // joint leaf states
  std::map<std::string, double> node_fidelity_vs_target;    // after each gate
  std::uint64_t seed = 0;
  bool sampled = false;
  std::string sampled_path;  // set in sampled mode
};

struct PrepResult {
  DensityMatrix register_state;
  ChannelTrace trace;
};

struct TreeOptions {
  bool with_phase_model = false;
  bool sampled = false;
  std::uint64_t seed = 0;
  /// When set (deterministic mode only), each layer's adaptive gate is
  /// followed by a dissipation-only segment of gate_durations["prep_layer"]
  /// (pulses are register-independent, so the dispersive term is
  /// compensated during them). Qualitative hardware model.
  std::optional<noise::NoiseParams> noise;
};

/// Depth-3 adaptive binary tree: prepare (|g>+|e>)/sqrt(2) (x) |0>, then
/// three layers of measure -> reset-if-e -> adaptive gate. The deterministic
/// mode returns the exact channel output (all branches, weighted); the ideal
/// run yields the 8-level maximally mixed register state with every leaf at
/// probability 1/8. When the phase model is on, the measurement-induced
/// phase unitary is applied after every measurement.
PrepResult run_binary_tree(const TreeOptions& options = {});

/// The adaptive steps of the tree (targets plus completed unitaries), keyed
/// by the branch label they act on. Exposed for consistency tests.
std::vector<AdaptiveStep> tree_steps();

/// Ideal ancilla-register product states at each node, keyed by path label
/// ("" for the root after the unconditional rotation).
std::map<std::string, Vector> tree_node_targets();

/// Leaf Fock index per depth-3 path (binary string -> register level).
std::map<std::string, int> tree_leaf_levels();

}  // namespace dqc1lab::prep
