#include "dqc1lab/dqc1.hpp"

#include <cmath>

#include "dqc1lab/parallel.hpp"

namespace dqc1lab::dqc1 {

std::vector<double> default_phi_grid(int points) {
  if (points < 2) throw InvalidConfig("phi grid needs at least two points");
  std::vector<double> grid(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<size_t>(i)] = 2.0 * kPi * static_cast<double>(i) / (points - 1);
  }
  return grid;
}

void Dqc1Config::validate() const {
  if (register_dim < 2) throw InvalidConfig("register_dim must be >= 2");
  if (phi_grid.empty()) throw InvalidConfig("phi grid is empty");
  for (double phi : phi_grid) {
    if (!std::isfinite(phi)) throw InvalidConfig("phi grid contains a non-finite value");
  }
  if (initial_ancilla) {
    if (initial_ancilla->rows() != 2 || initial_ancilla->cols() != 2) {
      throw InvalidConfig("initial_ancilla must be 2x2");
    }
    // enforce the density-matrix invariants on the supplied ancilla state
    DensityMatrix(HilbertSpec::single(kAncillaLabel, 2), *initial_ancilla);
  }
  if (noise) noise->validate();
}

Operator hadamard_equiv() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << r, -r, r, r;
  return Operator(HilbertSpec::single(kAncillaLabel, 2), std::move(m), OperatorKind::kUnitary);
}

Operator controlled_phase(double phi, int d) {
  if (d < 2) throw InvalidConfig("controlled_phase needs register dimension >= 2");
  Matrix m = Matrix::Identity(2 * d, 2 * d);
  for (int k = 0; k < d; ++k) {
    m(d + k, d + k) = std::exp(Complex(0.0, phi * static_cast<double>(k)));
  }
  return Operator(HilbertSpec::ancilla_register(d), std::move(m), OperatorKind::kUnitary);
}

namespace {

Matrix initial_joint(const Dqc1Config& config) {
  const int d = config.register_dim;
  const Matrix rho_anc = config.initial_ancilla
                             ? *config.initial_ancilla
                             : (Matrix(2, 2) << 1, 0, 0, 0).finished();
  return kron_matrix(rho_anc, Matrix::Identity(d, d) / static_cast<double>(d));
}

Matrix pre_gate_matrix(const Dqc1Config& config) {
  const int d = config.register_dim;
  const Matrix r = kron_matrix(hadamard_equiv().elements(), Matrix::Identity(d, d));
  return r * initial_joint(config) * r.adjoint();
}

}  // namespace

DensityMatrix run_circuit(const Dqc1Config& config, double phi) {
  config.validate();
  const int d = config.register_dim;
  const Matrix c = controlled_phase(phi, d).elements();
  return DensityMatrix(HilbertSpec::ancilla_register(d), c * pre_gate_matrix(config) * c.adjoint());
}

std::pair<double, double> trace_estimate(const DensityMatrix& joint) {
  const DensityMatrix anc = partial_trace(joint, {kAncillaLabel});
  const double re = std::real(expectation(anc, pauli_x()));
  const double im = std::real(expectation(anc, pauli_y()));
  return {re, im};
}

std::vector<SweepRecord> sweep(const Dqc1Config& config) {
  config.validate();
  const int d = config.register_dim;
  const HilbertSpec joint_space = HilbertSpec::ancilla_register(d);
  const HilbertSpec anc_space = HilbertSpec::single(kAncillaLabel, 2);
  const auto anc_basis = resources::ReferenceBasis::computational(anc_space);

  std::optional<noise::NoisyDqc1> engine;
  if (config.noise) engine.emplace(config);

  // The pre-gate ancilla state does not depend on phi; compute C_before once.
  double c_before = 0.0;
  if (engine) {
    const DensityMatrix pre = engine->pre_gate().state;
    c_before = resources::coherence(partial_trace(pre, {kAncillaLabel}), anc_basis);
  } else {
    const DensityMatrix pre(joint_space, pre_gate_matrix(config));
    c_before = resources::coherence(partial_trace(pre, {kAncillaLabel}), anc_basis);
  }

  const int n = static_cast<int>(config.phi_grid.size());
  std::vector<std::optional<SweepRecord>> slots(static_cast<size_t>(n));

  parallel_for(n, [&](int i) {
    const double phi = config.phi_grid[static_cast<size_t>(i)];
    const DensityMatrix ideal = run_circuit(config, phi);

    double leaked = 0.0;
    double joint_fidelity = 1.0;
    std::optional<DensityMatrix> state;
    if (engine) {
      noise::NoisyCircuitResult noisy = engine->run(phi);
      leaked = noisy.leaked_population;
      joint_fidelity = fidelity(noisy.state, ideal);
      state.emplace(std::move(noisy.state));
    } else {
      joint_fidelity = fidelity(ideal, ideal);
      state.emplace(ideal);
    }

    const auto [re, im] = trace_estimate(*state);
    const double c_after =
        resources::coherence(partial_trace(*state, {kAncillaLabel}), anc_basis);

    resources::OptimizerConfig disc_cfg = config.discord;
    disc_cfg.seed = config.discord.seed + 1000003ull * static_cast<std::uint64_t>(i);
    resources::DiscordResult discord;
    double discord_fock_fixed = 0.0;
    bool gap_flag = false;
    if (disc_cfg.mode == resources::DiscordMode::kFull) {
      resources::OptimizerConfig ff_cfg = disc_cfg;
      ff_cfg.mode = resources::DiscordMode::kFockFixed;
      discord_fock_fixed = resources::global_discord(*state, ff_cfg).value;
      discord = resources::global_discord(*state, disc_cfg);
      gap_flag = std::abs(discord.value - discord_fock_fixed) > 1e-3;
    } else {
      discord = resources::global_discord(*state, disc_cfg);
      discord_fock_fixed = discord.value;
    }

    slots[static_cast<size_t>(i)].emplace(SweepRecord{.phi = phi,
                                                      .trace_re = re,
                                                      .trace_im = im,
                                                      .c_before = c_before,
                                                      .c_after = c_after,
                                                      .delta_c = c_before - c_after,
                                                      .discord = std::move(discord),
                                                      .discord_fock_fixed = discord_fock_fixed,
                                                      .discord_gap_flag = gap_flag,
                                                      .joint_fidelity = joint_fidelity,
                                                      .leaked_population = leaked,
                                                      .state = std::move(*state)});
  });

  std::vector<SweepRecord> records;
  records.reserve(static_cast<size_t>(n));
  for (auto& slot : slots) records.push_back(std::move(*slot));
  return records;
}

}  // namespace dqc1lab::dqc1
