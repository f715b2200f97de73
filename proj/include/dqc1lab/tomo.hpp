#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dqc1lab/matqm.hpp"
#include "dqc1lab/resources.hpp"

namespace dqc1lab::tomo {

enum class PauliSetting { kI, kX, kY, kZ };

std::string setting_name(PauliSetting s);

/// Displaced-parity grid with per-point joint-observable expectations and,
/// in shot mode, the raw (ancilla, parity) +-1 outcome pairs.
struct WignerDataset {
  HilbertSpec state_space;              // 2x8 joint, or register-only
  std::vector<Complex> beta_grid;
  std::vector<PauliSetting> settings;
  int truncation = 16;                  // working cavity truncation
  int shots_per_point = 0;              // 0 => exact expectations
  std::uint64_t seed = 0;
  RealMatrix expectations;              // settings x beta, W values
  // shot records [setting][beta][shot] -> (ancilla outcome, parity outcome)
  std::vector<std::vector<std::vector<std::pair<std::int8_t, std::int8_t>>>> shots;

  bool has_shots() const { return shots_per_point > 0; }
  /// Recomputes W = (2/pi) mean(s_a * s_p) from the shot records.
  RealMatrix expectations_from_shots() const;
};

/// Internal cavity truncation for displacement accuracy. 24 levels keep the
/// computational block of D(beta) converged to better than 1e-6 for
/// |beta| <= 2.5 (16 levels leave errors near 1e-1 at the outer grid radii).
inline constexpr int kWorkingTruncation = 24;
inline constexpr double kMaxDisplacement = 2.5;

/// exp(beta a^dag - beta* a) on the truncated space. Throws TruncationError
/// when trunc < 9, |beta| > 2.5, or the computational-block entries have not
/// converged in the truncation (checked against trunc + 8).
Operator displacement(Complex beta, int trunc);

/// Photon-number parity diag((-1)^k); involution.
Operator parity_op(int trunc);

/// Default displacement grid: 121-point golden-angle spiral, |beta| <= 2.2.
/// Informationally complete for the 16-dim joint space and well conditioned
/// against shot noise (unlike few-angle concentric rings).
std::vector<Complex> default_beta_grid();

std::vector<PauliSetting> all_settings();

/// W_i(beta) = (2/pi) tr[rho (sigma_i (x) D P D^dag)], with rho zero-padded
/// into the working truncation. Pass a register-only state to get plain
/// Wigner tomography (settings must then be {I}).
WignerDataset joint_wigner_forward(const DensityMatrix& rho, const std::vector<Complex>& beta_grid,
                                   const std::vector<PauliSetting>& settings,
                                   int trunc = kWorkingTruncation);

/// Draws joint (ancilla, parity) outcomes from the exact four-outcome
/// distribution per grid point. Deterministic for a fixed seed.
WignerDataset sample_shots(const DensityMatrix& rho, const std::vector<Complex>& beta_grid,
                           const std::vector<PauliSetting>& settings, int shots,
                           std::uint64_t seed, int trunc = kWorkingTruncation);

struct ReconstructionResult {
  DensityMatrix rho;
  double residual = 0.0;           // least-squares objective at the projected state
  double residual_unconstrained = 0.0;
  double projection_distance = 0.0;  // Frobenius distance moved by the PSD projection
  int measurement_rank = 0;
  std::optional<double> fidelity_vs_reference;
};

/// Shared measurement-map factorization so repeated solves (bootstrap) reuse
/// the QR decomposition.
class Reconstructor {
 public:
  Reconstructor(const HilbertSpec& state_space, const std::vector<Complex>& beta_grid,
                const std::vector<PauliSetting>& settings, int trunc = kWorkingTruncation);

  ReconstructionResult solve(const RealVector& w_values) const;
  int rank() const { return rank_; }

 private:
  HilbertSpec state_space_;
  int dim_ = 0;
  int rank_ = 0;
  RealMatrix model_;  // rows: measurements, cols: Hermitian coordinates
  Eigen::ColPivHouseholderQR<RealMatrix> qr_;
};

/// Constrained least squares: unconstrained Hermitian solve, then Euclidean
/// projection onto the trace-one PSD set (sorted-eigenvalue simplex
/// projection). Throws NotInformationallyComplete when the measurement map
/// is rank-deficient.
ReconstructionResult reconstruct(const WignerDataset& dataset);

struct BootstrapResult {
  double sigma_delta_c = 0.0;
  double sigma_discord = 0.0;
  int n_resamples = 0;
};

/// Resamples shots with replacement per grid point, re-runs reconstruction
/// and the resource measures, and reports sample standard deviations.
/// c_before_reference is the fixed pre-gate coherence entering delta-C.
BootstrapResult bootstrap_errors(const WignerDataset& dataset, int n_resamples,
                                 std::uint64_t seed, double c_before_reference,
                                 const resources::OptimizerConfig& discord_config = {});

// Hermitian-coordinate helpers (orthonormal basis: diagonal units, then
// symmetric and antisymmetric pairs in row-major order).
RealVector hermitian_coords(const Matrix& h);
Matrix hermitian_from_coords(const RealVector& x, int dim);

/// Euclidean projection of a Hermitian matrix onto {rho >= 0, tr rho = 1}.
Matrix project_psd_trace_one(const Matrix& h);

}  // namespace dqc1lab::tomo
