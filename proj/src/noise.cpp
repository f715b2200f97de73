#include "dqc1lab/noise.hpp"

#include <cmath>

#include "dqc1lab/dqc1.hpp"

namespace dqc1lab::noise {

double NoiseParams::gate_duration(const std::string& name) const {
  const auto it = gate_durations.find(name);
  return it == gate_durations.end() ? 0.0 : it->second;
}

void NoiseParams::validate() const {
  if (t1_us <= 0 || tphi_us <= 0 || tau_s_us <= 0 || chi_over_2pi_mhz <= 0) {
    throw InvalidConfig("noise rates/times must be strictly positive");
  }
  if (cavity_truncation < 9) throw InvalidConfig("cavity_truncation must be >= 9");
  for (const auto& [name, dur] : gate_durations) {
    if (dur < 0) throw InvalidConfig("gate duration '" + name + "' is negative");
  }
}

Operator dispersive_hamiltonian(const NoiseParams& params) {
  params.validate();
  const int nc = params.cavity_truncation;
  const HilbertSpec space = HilbertSpec::ancilla_register(nc);
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  const Matrix h = -params.chi_rad_per_us() * kron_matrix(excited, number_op(nc));
  return Operator(space, h, OperatorKind::kHermitianObservable);
}

std::vector<Matrix> collapse_operators(const NoiseParams& params) {
  const int nc = params.cavity_truncation;
  const Matrix id_c = Matrix::Identity(nc, nc);
  const Matrix id_q = Matrix::Identity(2, 2);
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 / params.t1_us) * kron_matrix(sigma_minus(), id_c));
  ops.push_back(std::sqrt(1.0 / (2.0 * params.tphi_us)) * kron_matrix(pauli_z(), id_c));
  ops.push_back(std::sqrt(1.0 / params.tau_s_us) * kron_matrix(id_q, destroy_op(nc)));
  return ops;
}

Matrix lindblad_rhs(const Lindbladian& lind, const Matrix& rho) {
  const Complex i_unit(0.0, 1.0);
  Matrix out = -i_unit * (lind.hamiltonian * rho - rho * lind.hamiltonian);
  for (const Matrix& l : lind.collapse) {
    const Matrix ldag_l = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldag_l * rho + rho * ldag_l);
  }
  return out;
}

namespace {

// Elementwise phase mask exp(i (lambda_m - lambda_n) t) as an outer product.
Matrix phase_mask(const RealVector& lambda, double t) {
  Vector e(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) e(i) = std::exp(Complex(0.0, lambda(i) * t));
  return e * e.adjoint();
}

// Dissipator in the interaction picture at time t. The phase-masked
// L(t) = mask(t) o L has L(t)^dag L(t) = mask(t) o (L^dag L), so the
// anticommutator part reuses one precomputed sum.
struct InteractionDissipator {
  std::vector<Matrix> collapse;  // in the H eigenbasis
  Matrix ldagl_sum;              // sum_j L_j^dag L_j in the H eigenbasis
  const RealVector* lambda;

  Matrix rhs(double t, const Matrix& rho) const {
    const Matrix mask = phase_mask(*lambda, t);
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const Matrix& l : collapse) {
      const Matrix a = mask.cwiseProduct(l);
      out += a * rho * a.adjoint();
    }
    const Matrix n = mask.cwiseProduct(ldagl_sum);
    out -= 0.5 * (n * rho + rho * n);
    return out;
  }
};

}  // namespace

DensityMatrix evolve(const Lindbladian& lind, const DensityMatrix& rho0, double duration_us,
                     double dt_us) {
  if (lind.space != rho0.space()) throw InvalidSpace("evolve: space mismatch");
  if (duration_us < 0) throw InvalidConfig("evolve: negative duration");
  if (duration_us == 0.0) return rho0;
  if (dt_us <= 0 || dt_us > duration_us + 1e-15) {
    throw InvalidConfig("evolve: dt must satisfy 0 < dt <= duration");
  }

  const EigHermitian h = eig_hermitian(lind.hamiltonian, 1e-10);
  const Matrix& v = h.vectors;

  InteractionDissipator diss;
  diss.lambda = &h.values;
  const int d = rho0.dim();
  diss.ldagl_sum = Matrix::Zero(d, d);
  for (const Matrix& l : lind.collapse) {
    Matrix lt = v.adjoint() * l * v;
    diss.ldagl_sum += lt.adjoint() * lt;
    diss.collapse.push_back(std::move(lt));
  }

  Matrix rho = v.adjoint() * rho0.elements() * v;
  const long n_full = static_cast<long>(std::floor(duration_us / dt_us + 1e-12));
  const double remainder = duration_us - static_cast<double>(n_full) * dt_us;

  double t = 0.0;
  auto step = [&](double hstep) {
    const Matrix k1 = diss.rhs(t, rho);
    const Matrix k2 = diss.rhs(t + hstep / 2.0, rho + (hstep / 2.0) * k1);
    const Matrix k3 = diss.rhs(t + hstep / 2.0, rho + (hstep / 2.0) * k2);
    const Matrix k4 = diss.rhs(t + hstep, rho + hstep * k3);
    rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += hstep;
  };
  for (long s = 0; s < n_full; ++s) step(dt_us);
  if (remainder > 1e-12 * duration_us) step(remainder);

  // Undo the interaction-picture phases and rotate back.
  rho = phase_mask(h.values, duration_us).conjugate().cwiseProduct(rho);
  rho = v * rho * v.adjoint();
  rho = (rho + Matrix(rho.adjoint())) / 2.0;

  const double tr = std::real(rho.trace());
  if (std::abs(tr - 1.0) > 1e-8) {
    throw IntegratorUnstable("evolve: trace drifted by " + std::to_string(tr - 1.0) +
                             "; retry with dt = " + std::to_string(dt_us / 2.0));
  }
  rho /= tr;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-6) {
    throw IntegratorUnstable("evolve: positivity violated (min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) +
                             "); retry with dt = " + std::to_string(dt_us / 2.0));
  }
  StateTolerance tol = rho0.tolerance();
  tol.psd_floor = std::max(tol.psd_floor, 1e-6);
  return DensityMatrix(rho0.space(), std::move(rho), tol);
}

NoisyDqc1::NoisyDqc1(const dqc1::Dqc1Config& config) {
  config.validate();
  if (!config.noise) throw InvalidConfig("NoisyDqc1 requires noise parameters");
  params_ = *config.noise;
  register_dim_ = config.register_dim;
  if (params_.cavity_truncation < register_dim_) {
    throw InvalidConfig("cavity_truncation must be >= register_dim");
  }
  const int nc = params_.cavity_truncation;
  work_space_ = HilbertSpec::ancilla_register(nc);

  wait_.space = work_space_;
  wait_.hamiltonian = dispersive_hamiltonian(params_).elements();
  wait_.collapse = collapse_operators(params_);

  // Initial product state: ancilla (x) I_d/d zero-padded into the truncated
  // cavity space.
  Matrix rho_anc = config.initial_ancilla ? *config.initial_ancilla
                                          : (Matrix(2, 2) << 1, 0, 0, 0).finished();
  Matrix reg = Matrix::Zero(nc, nc);
  for (int k = 0; k < register_dim_; ++k) reg(k, k) = 1.0 / static_cast<double>(register_dim_);
  Matrix rho = kron_matrix(rho_anc, reg);

  // Gate unitaries are instantaneous and register-independent (the pulse
  // engineering that makes them so is out of scope); each gate contributes a
  // dissipation-only segment of its configured duration, with the dispersive
  // term compensated during the pulse.
  const Matrix r = kron_matrix(dqc1::hadamard_equiv().elements(), Matrix::Identity(nc, nc));
  rho = r * rho * r.adjoint();
  const double t_gate = params_.gate_duration("hadamard");
  if (t_gate > 0.0) {
    Lindbladian gate_segment;
    gate_segment.space = work_space_;
    gate_segment.hamiltonian = Matrix::Zero(2 * nc, 2 * nc);
    gate_segment.collapse = wait_.collapse;
    const DensityMatrix evolved =
        evolve(gate_segment, DensityMatrix(work_space_, rho), t_gate, dt_us_);
    rho = evolved.elements();
  }
  pre_gate_full_ = std::move(rho);
}

NoisyCircuitResult NoisyDqc1::project(const Matrix& full) const {
  const int nc = params_.cavity_truncation;
  const int d = register_dim_;
  Matrix block(2 * d, 2 * d);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      block.block(a * d, b * d, d, d) = full.block(a * nc, b * nc, d, d);
    }
  }
  const double kept = std::real(block.trace());
  const double leaked = 1.0 - kept;
  block /= kept;
  StateTolerance tol;
  tol.psd_floor = 1e-6;
  tol.trace = 1e-9;
  NoisyCircuitResult result{
      DensityMatrix(HilbertSpec::ancilla_register(d), std::move(block), tol), leaked,
      leaked > 0.05};
  return result;
}

NoisyCircuitResult NoisyDqc1::pre_gate() const { return project(pre_gate_full_); }

NoisyCircuitResult NoisyDqc1::run(double phi) const {
  const double wait_us = phi / params_.chi_rad_per_us();
  if (wait_us <= 0.0) return project(pre_gate_full_);
  const DensityMatrix evolved =
      evolve(wait_, DensityMatrix(work_space_, pre_gate_full_), wait_us, dt_us_);
  return project(evolved.elements());
}

double NoisyDqc1::dt_halving_defect(double phi) const {
  const double wait_us = phi / params_.chi_rad_per_us();
  if (wait_us <= 0.0) return 0.0;
  const DensityMatrix rho0(work_space_, pre_gate_full_);
  const DensityMatrix coarse = evolve(wait_, rho0, wait_us, dt_us_);
  const DensityMatrix fine = evolve(wait_, rho0, wait_us, dt_us_ / 2.0);
  return max_abs(coarse.elements() - fine.elements());
}

NoisyCircuitResult noisy_circuit(const dqc1::Dqc1Config& config, double phi) {
  return NoisyDqc1(config).run(phi);
}

}  // namespace dqc1lab::noise
