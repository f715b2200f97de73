#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dqc1lab/matqm.hpp"

namespace dqc1lab::resources {

/// One unitary per factor; its columns are the local dephasing basis
/// (identity = computational / Fock basis).
struct ReferenceBasis {
  HilbertSpec space;
  std::vector<Matrix> factor_bases;

  static ReferenceBasis computational(const HilbertSpec& space);
  /// Kronecker product of the per-factor bases.
  Matrix joint() const;
  void validate() const;
};

enum class DiscordMode { kFockFixed, kFull };

struct OptimizerConfig {
  int starts = 16;
  double tolerance = 1e-6;
  int max_evals = 2000;
  DiscordMode mode = DiscordMode::kFockFixed;
  std::uint64_t seed = 1;
};

struct DiscordResult {
  double value = 0.0;
  ReferenceBasis optimal_basis;
  std::vector<std::pair<int, double>> optimizer_trace;  // (cumulative evals, best value)
  bool converged = false;
};

/// Product of local dephasings in the given basis. Idempotent.
DensityMatrix dephase(const DensityMatrix& rho, const ReferenceBasis& basis);

/// Relative entropy of coherence, S(dephase(rho)) - S(rho), in bits.
double coherence(const DensityMatrix& rho, const ReferenceBasis& basis);

/// Coherence change C(before) - C(after); may be negative, no clamping.
double coherence_consumption(const DensityMatrix& before, const DensityMatrix& after,
                             const ReferenceBasis& basis);

/// Global-discord objective at a fixed product basis:
///   S(rho || Phi(rho)) - sum_k S(rho_k || Phi_k(rho_k)).
double discord_objective(const DensityMatrix& rho, const ReferenceBasis& basis);

/// Minimizes the objective above over product dephasing bases.
/// kFockFixed optimizes only the first factor's basis (Bloch angles for a
/// qubit factor); kFull optimizes every factor, seeding one start from the
/// fock-fixed optimum so the full-mode value can only improve on it.
DiscordResult global_discord(const DensityMatrix& rho, const OptimizerConfig& config = {});

/// True when every Kraus operator maps computational-basis projectors to
/// diagonal matrices (incoherent operation check).
bool is_incoherent_channel(const QuantumChannel& channel, double tol = 1e-12);

}  // namespace dqc1lab::resources
