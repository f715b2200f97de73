#pragma once

#include <map>
#include <string>
#include <vector>

#include "dqc1lab/matqm.hpp"

namespace dqc1lab::dqc1 {
struct Dqc1Config;
}

namespace dqc1lab::noise {

/// Physical rates in microseconds / MHz. Gate durations hold the dissipative
/// segment inserted for each instantaneous gate unitary.
struct NoiseParams {
  double t1_us = 30.0;          // qubit energy relaxation
  double tphi_us = 120.0;       // qubit pure dephasing
  double tau_s_us = 143.0;      // storage-cavity photon lifetime
  double chi_over_2pi_mhz = 1.90;
  int cavity_truncation = 10;
  std::map<std::string, double> gate_durations = {{"hadamard", 1.0},
                                                  {"tomo_prerotation", 1.0},
                                                  {"measurement", 0.0},
                                                  {"prep_layer", 1.0}};

  double chi_rad_per_us() const { return 2.0 * kPi * chi_over_2pi_mhz; }
  double gate_duration(const std::string& name) const;
  void validate() const;
};

/// Time-independent generator: Hamiltonian (angular frequency, rotating
/// frame) plus collapse operators with rate prefactors already embedded.
struct Lindbladian {
  HilbertSpec space;
  Matrix hamiltonian;
  std::vector<Matrix> collapse;
};

/// Rotating-frame dispersive Hamiltonian -chi |e><e| (x) n on the
/// ancilla (x) cavity space truncated at params.cavity_truncation.
Operator dispersive_hamiltonian(const NoiseParams& params);

/// Collapse set for the named channels: sqrt(1/T1) sigma-, sqrt(1/(2 Tphi))
/// sigma_z, sqrt(1/tau_s) a, lifted to the joint space.
std::vector<Matrix> collapse_operators(const NoiseParams& params);

/// drho/dt = -i[H, rho] + sum_j (L rho L^dag - 1/2 {L^dag L, rho}).
Matrix lindblad_rhs(const Lindbladian& lind, const Matrix& rho);

/// Fixed-step RK4 integration of the master equation, performed in the
/// interaction picture of H: the Hamiltonian phases are applied exactly per
/// step and RK4 integrates only the (slow) dissipative part. This keeps the
/// dt-halving drift far below 1e-8 at the default dt and makes the
/// zero-rate limit exact up to roundoff.
DensityMatrix evolve(const Lindbladian& lind, const DensityMatrix& rho0, double duration_us,
                     double dt_us);

inline constexpr double kDefaultDtUs = 1e-3;  // 1 ns

struct NoisyCircuitResult {
  DensityMatrix state;  // 2 x register_dim computational block, renormalized
  double leaked_population = 0.0;
  bool leakage_warning = false;  // leaked population above 0.05
};

/// Caches the phi-independent pre-gate evolution (initial product state,
/// instantaneous Hadamard-equivalent, dissipative segment of the gate
/// duration) so a sweep pays only for the controlled-phase wait per point.
class NoisyDqc1 {
 public:
  explicit NoisyDqc1(const dqc1::Dqc1Config& config);

  /// Pre-gate joint state restricted to the computational block.
  NoisyCircuitResult pre_gate() const;
  /// Full run: free dispersive evolution for t = phi / chi after the
  /// pre-gate segment.
  NoisyCircuitResult run(double phi) const;

  /// max-abs change of the final state under dt -> dt/2 at the given phi.
  double dt_halving_defect(double phi) const;

 private:
  NoisyCircuitResult project(const Matrix& full) const;

  NoiseParams params_;
  int register_dim_ = 8;
  double dt_us_ = kDefaultDtUs;
  HilbertSpec work_space_;
  Lindbladian wait_;
  Matrix pre_gate_full_;  // on the truncated working space
};

/// One-shot convenience wrapper around NoisyDqc1.
NoisyCircuitResult noisy_circuit(const dqc1::Dqc1Config& config, double phi);

}  // namespace dqc1lab::noise
