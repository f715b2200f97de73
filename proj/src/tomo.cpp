#include "dqc1lab/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dqc1lab/parallel.hpp"
#include "dqc1lab/rng.hpp"

namespace dqc1lab::tomo {

namespace {

constexpr double kTwoOverPi = 2.0 / kPi;

Matrix setting_matrix(PauliSetting s) {
  switch (s) {
    case PauliSetting::kI:
      return Matrix::Identity(2, 2);
    case PauliSetting::kX:
      return pauli_x();
    case PauliSetting::kY:
      return pauli_y();
    case PauliSetting::kZ:
      return pauli_z();
  }
  throw InvalidConfig("unknown Pauli setting");
}

bool has_ancilla(const HilbertSpec& space) { return space.index_of(kAncillaLabel).has_value(); }

int register_dim_of(const HilbertSpec& space) {
  const auto idx = space.index_of(kRegisterLabel);
  if (!idx) throw InvalidSpace("tomography state needs a register factor");
  return space.factor(*idx).dim;
}

// Flat indices of the state space embedded in the working space (register
// levels >= register_dim are the zero-padded numerical buffer).
std::vector<int> embedding_indices(const HilbertSpec& state_space, int trunc) {
  const int d_reg = register_dim_of(state_space);
  std::vector<int> idx;
  if (has_ancilla(state_space)) {
    for (int a = 0; a < 2; ++a) {
      for (int k = 0; k < d_reg; ++k) idx.push_back(a * trunc + k);
    }
  } else {
    for (int k = 0; k < d_reg; ++k) idx.push_back(k);
  }
  return idx;
}

// Restriction of a working-space operator to the embedded state space.
Matrix restrict_to_state_space(const Matrix& work_op, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  Matrix out(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      out(r, c) = work_op(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
    }
  }
  return out;
}

// Measurement operators (W scale, i.e. including 2/pi) restricted to the
// state space, ordered settings-major then beta.
std::vector<Matrix> measurement_operators(const HilbertSpec& state_space,
                                          const std::vector<Complex>& beta_grid,
                                          const std::vector<PauliSetting>& settings, int trunc) {
  if (!has_ancilla(state_space)) {
    for (PauliSetting s : settings) {
      if (s != PauliSetting::kI) {
        throw InvalidConfig("register-only tomography supports only the I setting");
      }
    }
  }
  if (register_dim_of(state_space) > trunc) {
    throw TruncationError("working truncation smaller than the register");
  }
  const std::vector<int> idx = embedding_indices(state_space, trunc);
  const Matrix p = parity_op(trunc).elements();

  std::vector<Matrix> displaced_parities;
  displaced_parities.reserve(beta_grid.size());
  for (const Complex& beta : beta_grid) {
    const Matrix d = displacement(beta, trunc).elements();
    displaced_parities.push_back(d * p * d.adjoint());
  }

  std::vector<Matrix> ops;
  ops.reserve(settings.size() * beta_grid.size());
  for (PauliSetting s : settings) {
    const Matrix sigma = setting_matrix(s);
    for (const Matrix& displaced_parity : displaced_parities) {
      const Matrix joint = has_ancilla(state_space)
                               ? kron_matrix(sigma, displaced_parity)
                               : displaced_parity;
      ops.push_back(kTwoOverPi * restrict_to_state_space(joint, idx));
    }
  }
  return ops;
}

}  // namespace

std::string setting_name(PauliSetting s) {
  switch (s) {
    case PauliSetting::kI:
      return "I";
    case PauliSetting::kX:
      return "X";
    case PauliSetting::kY:
      return "Y";
    case PauliSetting::kZ:
      return "Z";
  }
  return "?";
}

RealMatrix WignerDataset::expectations_from_shots() const {
  RealMatrix out(settings.size(), beta_grid.size());
  for (size_t s = 0; s < shots.size(); ++s) {
    for (size_t b = 0; b < shots[s].size(); ++b) {
      double acc = 0.0;
      for (const auto& [sa, sp] : shots[s][b]) {
        acc += static_cast<double>(sa) * static_cast<double>(sp);
      }
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) =
          kTwoOverPi * acc / static_cast<double>(shots[s][b].size());
    }
  }
  return out;
}

Operator displacement(Complex beta, int trunc) {
  if (trunc < 9) throw TruncationError("displacement: truncation must be >= 9");
  if (std::abs(beta) > kMaxDisplacement) {
    throw TruncationError("displacement: |beta| exceeds the supported grid bound");
  }
  auto build = [&beta](int n) {
    const Matrix a = destroy_op(n);
    return matrix_exp_skew(Matrix(beta * a.adjoint() - std::conj(beta) * a));
  };
  const Matrix d = build(trunc);
  // Convergence of the computational block against a larger truncation.
  const int block = std::min(trunc, 8);
  const Matrix d_big = build(trunc + 8);
  const double defect =
      max_abs(d.topLeftCorner(block, block) - d_big.topLeftCorner(block, block));
  if (defect > 1e-6) {
    throw TruncationError("displacement: truncation " + std::to_string(trunc) +
                          " has not converged (defect " + std::to_string(defect) + ")");
  }
  return Operator(HilbertSpec::single(kRegisterLabel, trunc), d, OperatorKind::kUnitary);
}

Operator parity_op(int trunc) {
  Matrix p = Matrix::Identity(trunc, trunc);
  for (int k = 1; k < trunc; k += 2) p(k, k) = -1.0;
  return Operator(HilbertSpec::single(kRegisterLabel, trunc), std::move(p),
                  OperatorKind::kHermitianObservable);
}

std::vector<Complex> default_beta_grid() {
  // Golden-angle spiral, uniform in area. Concentric ring designs with few
  // angles alias the high angular harmonics of the 8-level register: they
  // stay rank-complete but pick up singular values near 1e-3, which shot
  // noise amplifies into useless reconstructions. The spiral keeps the
  // smallest singular value of the measurement map near 0.5.
  std::vector<Complex> grid;
  const int n = 121;
  const double r_max = 2.2;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double radius = r_max * std::sqrt((k + 0.5) / static_cast<double>(n));
    grid.push_back(radius * std::exp(Complex(0.0, golden * k)));
  }
  return grid;
}

std::vector<PauliSetting> all_settings() {
  return {PauliSetting::kI, PauliSetting::kX, PauliSetting::kY, PauliSetting::kZ};
}

WignerDataset joint_wigner_forward(const DensityMatrix& rho, const std::vector<Complex>& beta_grid,
                                   const std::vector<PauliSetting>& settings, int trunc) {
  const auto ops = measurement_operators(rho.space(), beta_grid, settings, trunc);
  WignerDataset ds;
  ds.state_space = rho.space();
  ds.beta_grid = beta_grid;
  ds.settings = settings;
  ds.truncation = trunc;
  ds.expectations.resize(static_cast<Eigen::Index>(settings.size()),
                         static_cast<Eigen::Index>(beta_grid.size()));
  for (size_t s = 0; s < settings.size(); ++s) {
    for (size_t b = 0; b < beta_grid.size(); ++b) {
      const Matrix& op = ops[s * beta_grid.size() + b];
      ds.expectations(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) =
          std::real((rho.elements() * op).trace());
    }
  }
  return ds;
}

WignerDataset sample_shots(const DensityMatrix& rho, const std::vector<Complex>& beta_grid,
                           const std::vector<PauliSetting>& settings, int shots,
                           std::uint64_t seed, int trunc) {
  if (shots < 1) throw InvalidConfig("sample_shots: shots must be >= 1");
  const std::vector<int> idx = embedding_indices(rho.space(), trunc);
  const Matrix p = parity_op(trunc).elements();
  const bool with_ancilla = has_ancilla(rho.space());

  WignerDataset ds;
  ds.state_space = rho.space();
  ds.beta_grid = beta_grid;
  ds.settings = settings;
  ds.truncation = trunc;
  ds.shots_per_point = shots;
  ds.seed = seed;
  ds.shots.assign(settings.size(),
                  std::vector<std::vector<std::pair<std::int8_t, std::int8_t>>>(beta_grid.size()));

  std::vector<Matrix> displaced_parities;
  displaced_parities.reserve(beta_grid.size());
  for (const Complex& beta : beta_grid) {
    const Matrix d = displacement(beta, trunc).elements();
    displaced_parities.push_back(d * p * d.adjoint());
  }

  for (size_t s = 0; s < settings.size(); ++s) {
    const Matrix sigma = setting_matrix(settings[s]);
    // Ancilla +-1 projectors; the I setting always reports +1.
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix proj_a_plus = settings[s] == PauliSetting::kI ? id2 : (id2 + sigma) / 2.0;
    const Matrix proj_a_minus = settings[s] == PauliSetting::kI
                                    ? Matrix::Zero(2, 2)
                                    : Matrix((id2 - sigma) / 2.0);
    for (size_t b = 0; b < beta_grid.size(); ++b) {
      const Matrix& m = displaced_parities[b];
      const int n = trunc;
      const Matrix proj_p_plus = (Matrix::Identity(n, n) + m) / 2.0;
      const Matrix proj_p_minus = (Matrix::Identity(n, n) - m) / 2.0;

      std::array<double, 4> probs{};  // (a+,p+), (a+,p-), (a-,p+), (a-,p-)
      int pi = 0;
      for (const Matrix* pa : {&proj_a_plus, &proj_a_minus}) {
        for (const Matrix* pp : {&proj_p_plus, &proj_p_minus}) {
          const Matrix joint = with_ancilla ? kron_matrix(*pa, *pp) : *pp;
          const Matrix restricted = restrict_to_state_space(joint, idx);
          probs[static_cast<size_t>(pi++)] =
              std::max(0.0, std::real((rho.elements() * restricted).trace()));
        }
        if (!with_ancilla) {
          // register-only: no ancilla outcome; minus branch has no weight
          probs[2] = probs[3] = 0.0;
          break;
        }
      }
      const double total = probs[0] + probs[1] + probs[2] + probs[3];
      for (double& q : probs) q /= total;

      SplitMix64 rng(substream_seed(seed, s * beta_grid.size() + b));
      auto& record = ds.shots[s][b];
      record.reserve(static_cast<size_t>(shots));
      for (int k = 0; k < shots; ++k) {
        const double u = rng.uniform();
        int outcome = 3;
        double acc = 0.0;
        for (int o = 0; o < 4; ++o) {
          acc += probs[static_cast<size_t>(o)];
          if (u < acc) {
            outcome = o;
            break;
          }
        }
        const std::int8_t sa = (outcome < 2) ? 1 : -1;
        const std::int8_t sp = (outcome % 2 == 0) ? 1 : -1;
        record.emplace_back(sa, sp);
      }
    }
  }
  ds.expectations = ds.expectations_from_shots();
  return ds;
}

RealVector hermitian_coords(const Matrix& h) {
  const int d = static_cast<int>(h.rows());
  RealVector x(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) x(k++) = std::real(h(i, i));
  const double r = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      x(k++) = r * std::real(h(i, j));
      x(k++) = -r * std::imag(h(i, j));  // coefficient of i(E_ij - E_ji)/sqrt(2)
    }
  }
  return x;
}

Matrix hermitian_from_coords(const RealVector& x, int dim) {
  Matrix h = Matrix::Zero(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) h(i, i) = x(k++);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = x(k++) * r;
      const double im = -x(k++) * r;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

Matrix project_psd_trace_one(const Matrix& h) {
  const EigHermitian eig = eig_hermitian((h + Matrix(h.adjoint())) / 2.0, 1e-8);
  const int d = static_cast<int>(eig.values.size());

  // Euclidean projection of the spectrum onto the probability simplex.
  std::vector<double> sorted(eig.values.data(), eig.values.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (int j = 0; j < d; ++j) {
    cumulative += sorted[static_cast<size_t>(j)];
    const double candidate = (cumulative - 1.0) / (j + 1);
    if (sorted[static_cast<size_t>(j)] - candidate > 0.0) {
      tau = candidate;
    } else {
      break;
    }
  }
  Vector lambda(d);
  for (int i = 0; i < d; ++i) lambda(i) = std::max(0.0, eig.values(i) - tau);
  return eig.vectors * lambda.asDiagonal() * eig.vectors.adjoint();
}

Reconstructor::Reconstructor(const HilbertSpec& state_space, const std::vector<Complex>& beta_grid,
                             const std::vector<PauliSetting>& settings, int trunc)
    : state_space_(state_space), dim_(state_space.dim()) {
  const auto ops = measurement_operators(state_space, beta_grid, settings, trunc);
  model_.resize(static_cast<Eigen::Index>(ops.size()), dim_ * dim_);
  for (size_t r = 0; r < ops.size(); ++r) {
    model_.row(static_cast<Eigen::Index>(r)) = hermitian_coords(ops[r]).transpose();
  }
  qr_.compute(model_);
  rank_ = static_cast<int>(qr_.rank());
}

ReconstructionResult Reconstructor::solve(const RealVector& w_values) const {
  if (rank_ < dim_ * dim_) {
    throw NotInformationallyComplete("measurement map rank " + std::to_string(rank_) + " < " +
                                     std::to_string(dim_ * dim_));
  }
  if (w_values.size() != model_.rows()) {
    throw InvalidConfig("reconstruct: data length does not match the measurement set");
  }
  const RealVector x = qr_.solve(w_values);
  const Matrix rho_ls = hermitian_from_coords(x, dim_);
  const double residual_ls = (model_ * x - w_values).squaredNorm();

  const Matrix rho_proj = project_psd_trace_one(rho_ls);
  const double projection_distance = (rho_proj - rho_ls).norm();
  const RealVector x_proj = hermitian_coords(rho_proj);
  const double residual = (model_ * x_proj - w_values).squaredNorm();

  ReconstructionResult result{DensityMatrix(state_space_, rho_proj),
                              residual,
                              residual_ls,
                              projection_distance,
                              rank_,
                              std::nullopt};
  return result;
}

ReconstructionResult reconstruct(const WignerDataset& dataset) {
  const Reconstructor rec(dataset.state_space, dataset.beta_grid, dataset.settings,
                          dataset.truncation);
  const RealMatrix values =
      dataset.has_shots() ? dataset.expectations_from_shots() : dataset.expectations;
  RealVector w(values.size());
  int k = 0;
  for (Eigen::Index s = 0; s < values.rows(); ++s) {
    for (Eigen::Index b = 0; b < values.cols(); ++b) w(k++) = values(s, b);
  }
  return rec.solve(w);
}

BootstrapResult bootstrap_errors(const WignerDataset& dataset, int n_resamples,
                                 std::uint64_t seed, double c_before_reference,
                                 const resources::OptimizerConfig& discord_config) {
  if (n_resamples < 2) throw InvalidConfig("bootstrap needs at least two resamples");
  if (!dataset.has_shots()) throw InvalidConfig("bootstrap needs shot records");
  if (!has_ancilla(dataset.state_space)) {
    throw InvalidConfig("bootstrap resource measures need the joint ancilla-register space");
  }

  const Reconstructor rec(dataset.state_space, dataset.beta_grid, dataset.settings,
                          dataset.truncation);
  const auto anc_basis =
      resources::ReferenceBasis::computational(HilbertSpec::single(kAncillaLabel, 2));

  std::vector<double> delta_c(static_cast<size_t>(n_resamples));
  std::vector<double> discord(static_cast<size_t>(n_resamples));
  parallel_for(n_resamples, [&](int r) {
    SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(r)));
    RealVector w(static_cast<Eigen::Index>(dataset.settings.size() * dataset.beta_grid.size()));
    int k = 0;
    for (size_t s = 0; s < dataset.shots.size(); ++s) {
      for (size_t b = 0; b < dataset.shots[s].size(); ++b) {
        const auto& record = dataset.shots[s][b];
        const int n = static_cast<int>(record.size());
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
          const auto& [sa, sp] = record[static_cast<size_t>(rng.next() % record.size())];
          acc += static_cast<double>(sa) * static_cast<double>(sp);
        }
        w(k++) = kTwoOverPi * acc / n;
      }
    }
    const ReconstructionResult result = rec.solve(w);
    const DensityMatrix anc = partial_trace(result.rho, {kAncillaLabel});
    delta_c[static_cast<size_t>(r)] =
        c_before_reference - resources::coherence(anc, anc_basis);
    resources::OptimizerConfig cfg = discord_config;
    cfg.seed = discord_config.seed + 7919ull * static_cast<std::uint64_t>(r);
    discord[static_cast<size_t>(r)] = resources::global_discord(result.rho, cfg).value;
  });

  auto sample_std = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
  };
  return BootstrapResult{sample_std(delta_c), sample_std(discord), n_resamples};
}

}  // namespace dqc1lab::tomo
