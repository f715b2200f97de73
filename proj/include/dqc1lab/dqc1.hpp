#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dqc1lab/matqm.hpp"
#include "dqc1lab/noise.hpp"
#include "dqc1lab/resources.hpp"

namespace dqc1lab::dqc1 {

/// 65 uniform points on [0, 2pi]; contains 0, pi/2, pi, 3pi/2, 2pi exactly.
std::vector<double> default_phi_grid(int points = 65);

struct Dqc1Config {
  int register_dim = 8;
  std::vector<double> phi_grid = default_phi_grid();
  /// Ancilla-factor state fed into the circuit; |g><g| when absent.
  std::optional<Matrix> initial_ancilla;
  std::optional<noise::NoiseParams> noise;
  resources::OptimizerConfig discord;

  void validate() const;
};

/// R_y(pi/2) on the ancilla: |g> -> (|g>+|e>)/sqrt(2). Register-independent
/// by construction (applied as R (x) I on the joint space).
Operator hadamard_equiv();

/// |g><g| (x) 1 + |e><e| (x) diag(1, e^{i phi}, ..., e^{i(d-1) phi}).
Operator controlled_phase(double phi, int d);

/// Ideal circuit: C_phi (R (x) I) (rho_anc (x) I/d) (h.c. ordering).
DensityMatrix run_circuit(const Dqc1Config& config, double phi);

/// (<sigma_x>, <sigma_y>) on the ancilla marginal; equals
/// (Re, Im) of Tr(U)/d for ideal states.
std::pair<double, double> trace_estimate(const DensityMatrix& joint);

struct SweepRecord {
  double phi = 0.0;
  double trace_re = 0.0;
  double trace_im = 0.0;
  double c_before = 0.0;
  double c_after = 0.0;
  double delta_c = 0.0;
  resources::DiscordResult discord;
  /// Fock-fixed value; equals discord.value unless full mode was requested.
  double discord_fock_fixed = 0.0;
  /// Set when full and fock-fixed disagree beyond 1e-3.
  bool discord_gap_flag = false;
  double joint_fidelity = 1.0;
  double leaked_population = 0.0;
  DensityMatrix state;
};

/// One record per phi grid point, ordered by the grid. When noise is set the
/// states come from the Lindblad integrator; c_before then reflects the
/// integrated (noisy) pre-gate ancilla state.
std::vector<SweepRecord> sweep(const Dqc1Config& config);

}  // namespace dqc1lab::dqc1
