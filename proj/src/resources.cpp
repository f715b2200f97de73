#include "dqc1lab/resources.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dqc1lab/optim.hpp"

namespace dqc1lab::resources {

namespace {

RealVector clean_probs(const Matrix& m) {
  RealVector p(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) p(i) = std::max(0.0, std::real(m(i, i)));
  return p;
}

// Parameter count per factor: Bloch angles for a qubit, otherwise the real
// off-diagonal coordinates of an anti-Hermitian generator.
int factor_param_count(int dim) { return dim == 2 ? 2 : dim * (dim - 1); }

Matrix qubit_basis(double theta, double phi) {
  Matrix b(2, 2);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const Complex e_plus = std::exp(Complex(0.0, phi));
  const Complex e_minus = std::exp(Complex(0.0, -phi));
  b(0, 0) = c;
  b(1, 0) = s * e_plus;
  b(0, 1) = -s * e_minus;
  b(1, 1) = c;
  return b;
}

Matrix factor_basis_from_params(int dim, const double* params) {
  if (dim == 2) return qubit_basis(params[0], params[1]);
  Matrix gen = Matrix::Zero(dim, dim);
  int p = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(params[p], params[p + 1]);
      p += 2;
      gen(i, j) = z;
      gen(j, i) = -std::conj(z);
    }
  }
  return matrix_exp_skew(gen);
}

struct ObjectiveContext {
  const Matrix* rho;
  double s_global;
  std::vector<Matrix> marginals;
  std::vector<double> s_local;
  std::vector<int> dims;
  std::vector<int> opt_factors;  // factors whose basis is optimized
  std::vector<int> param_offset;

  int total_params() const {
    int n = 0;
    for (int f : opt_factors) n += factor_param_count(dims[static_cast<size_t>(f)]);
    return n;
  }
};

std::vector<Matrix> bases_from_params(const ObjectiveContext& ctx, const RealVector& params) {
  std::vector<Matrix> bases(ctx.dims.size());
  for (size_t f = 0; f < ctx.dims.size(); ++f) {
    bases[f] = Matrix::Identity(ctx.dims[f], ctx.dims[f]);
  }
  for (size_t k = 0; k < ctx.opt_factors.size(); ++k) {
    const int f = ctx.opt_factors[k];
    bases[static_cast<size_t>(f)] =
        factor_basis_from_params(ctx.dims[static_cast<size_t>(f)],
                                 params.data() + ctx.param_offset[k]);
  }
  return bases;
}

// Fast route for the optimizer: the dephased state is diagonal in the trial
// basis, so its entropy is the Shannon entropy of diag(B^dag rho B).
double objective_fast(const ObjectiveContext& ctx, const std::vector<Matrix>& bases) {
  Matrix joint = bases[0];
  for (size_t f = 1; f < bases.size(); ++f) joint = kron_matrix(joint, bases[f]);
  const double h_global = shannon_entropy_bits(clean_probs(joint.adjoint() * (*ctx.rho) * joint));
  double value = h_global - ctx.s_global;
  for (size_t f = 0; f < bases.size(); ++f) {
    const double h_local =
        shannon_entropy_bits(clean_probs(bases[f].adjoint() * ctx.marginals[f] * bases[f]));
    value -= h_local - ctx.s_local[f];
  }
  return value;
}

}  // namespace

ReferenceBasis ReferenceBasis::computational(const HilbertSpec& space) {
  ReferenceBasis b;
  b.space = space;
  for (int f = 0; f < space.factor_count(); ++f) {
    const int d = space.factor(f).dim;
    b.factor_bases.push_back(Matrix::Identity(d, d));
  }
  return b;
}

Matrix ReferenceBasis::joint() const {
  validate();
  Matrix out = factor_bases[0];
  for (size_t f = 1; f < factor_bases.size(); ++f) out = kron_matrix(out, factor_bases[f]);
  return out;
}

void ReferenceBasis::validate() const {
  if (static_cast<int>(factor_bases.size()) != space.factor_count()) {
    throw InvalidSpace("reference basis has wrong factor count");
  }
  for (int f = 0; f < space.factor_count(); ++f) {
    const Matrix& b = factor_bases[static_cast<size_t>(f)];
    const int d = space.factor(f).dim;
    if (b.rows() != d || b.cols() != d) {
      throw InvalidSpace("reference basis factor dimension mismatch");
    }
    if (max_abs(b.adjoint() * b - Matrix::Identity(d, d)) > 1e-10) {
      throw InvalidState("reference basis factor is not unitary");
    }
  }
}

DensityMatrix dephase(const DensityMatrix& rho, const ReferenceBasis& basis) {
  if (basis.space != rho.space()) throw InvalidSpace("dephase: basis space mismatch");
  const Matrix b = basis.joint();
  const Matrix rotated = b.adjoint() * rho.elements() * b;
  Matrix diag = Matrix::Zero(rotated.rows(), rotated.cols());
  diag.diagonal() = rotated.diagonal();
  return DensityMatrix(rho.space(), b * diag * b.adjoint(), rho.tolerance());
}

double coherence(const DensityMatrix& rho, const ReferenceBasis& basis) {
  if (basis.space != rho.space()) throw InvalidSpace("coherence: basis space mismatch");
  const Matrix b = basis.joint();
  const RealVector probs = clean_probs(b.adjoint() * rho.elements() * b);
  return shannon_entropy_bits(probs) - von_neumann_entropy(rho);
}

double coherence_consumption(const DensityMatrix& before, const DensityMatrix& after,
                             const ReferenceBasis& basis) {
  if (before.space() != after.space()) {
    throw InvalidSpace("coherence_consumption: state spaces differ");
  }
  return coherence(before, basis) - coherence(after, basis);
}

double discord_objective(const DensityMatrix& rho, const ReferenceBasis& basis) {
  if (basis.space != rho.space()) throw InvalidSpace("discord_objective: basis space mismatch");
  double value = relative_entropy(rho, dephase(rho, basis));
  for (int f = 0; f < rho.space().factor_count(); ++f) {
    const DensityMatrix marginal = partial_trace(rho, {rho.space().factor(f).label});
    ReferenceBasis local;
    local.space = marginal.space();
    local.factor_bases = {basis.factor_bases[static_cast<size_t>(f)]};
    value -= relative_entropy(marginal, dephase(marginal, local));
  }
  return value;
}

DiscordResult global_discord(const DensityMatrix& rho, const OptimizerConfig& config) {
  const HilbertSpec& space = rho.space();
  if (space.factor_count() < 2) {
    throw InvalidSpace("global_discord needs at least two factors");
  }

  ObjectiveContext ctx;
  ctx.rho = &rho.elements();
  ctx.s_global = von_neumann_entropy(rho);
  for (int f = 0; f < space.factor_count(); ++f) {
    ctx.dims.push_back(space.factor(f).dim);
    const DensityMatrix marginal = partial_trace(rho, {space.factor(f).label});
    ctx.marginals.push_back(marginal.elements());
    ctx.s_local.push_back(von_neumann_entropy(marginal));
  }
  if (config.mode == DiscordMode::kFockFixed) {
    ctx.opt_factors = {0};
  } else {
    for (int f = 0; f < space.factor_count(); ++f) ctx.opt_factors.push_back(f);
  }
  int offset = 0;
  for (int f : ctx.opt_factors) {
    ctx.param_offset.push_back(offset);
    offset += factor_param_count(ctx.dims[static_cast<size_t>(f)]);
  }
  const int n_params = ctx.total_params();

  auto objective = [&ctx](const RealVector& params) {
    return objective_fast(ctx, bases_from_params(ctx, params));
  };

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto random_start = [&] {
    RealVector x(n_params);
    for (size_t k = 0; k < ctx.opt_factors.size(); ++k) {
      const int f = ctx.opt_factors[k];
      const int d = ctx.dims[static_cast<size_t>(f)];
      double* p = x.data() + ctx.param_offset[k];
      if (d == 2) {
        p[0] = u01(rng) * kPi;
        p[1] = u01(rng) * 2.0 * kPi;
      } else {
        for (int i = 0; i < factor_param_count(d); ++i) p[i] = (u01(rng) - 0.5) * 3.0;
      }
    }
    return x;
  };

  std::vector<RealVector> starts;
  starts.push_back(RealVector::Zero(n_params));  // computational / Fock basis
  if (config.mode == DiscordMode::kFull && space.factor(0).dim == 2) {
    // Seed one start from the fock-fixed optimum so full mode cannot lose to it.
    OptimizerConfig ff = config;
    ff.mode = DiscordMode::kFockFixed;
    ff.starts = std::max(4, config.starts / 2);
    const DiscordResult ff_result = global_discord(rho, ff);
    RealVector x = RealVector::Zero(n_params);
    // Recover the Bloch angles of the fock-fixed ancilla basis column 0.
    const Matrix& b0 = ff_result.optimal_basis.factor_bases[0];
    const double c = std::clamp(std::abs(b0(0, 0)), 0.0, 1.0);
    x(0) = 2.0 * std::acos(c);
    x(1) = std::arg(b0(1, 0) * std::conj(b0(0, 0)));
    starts.push_back(x);
  }
  while (static_cast<int>(starts.size()) < std::max(1, config.starts)) {
    starts.push_back(random_start());
  }

  optim::NelderMeadOptions nm_opts;
  nm_opts.tolerance = config.tolerance;
  nm_opts.max_evals = config.max_evals;

  DiscordResult result;
  double best_value = objective(starts[0]);
  RealVector best_params = starts[0];
  bool any_converged = false;
  int cumulative_evals = 1;
  result.optimizer_trace.emplace_back(cumulative_evals, best_value);
  for (const RealVector& start : starts) {
    const optim::NelderMeadResult nm = optim::nelder_mead(objective, start, nm_opts);
    cumulative_evals += nm.evals;
    any_converged = any_converged || nm.converged;
    if (nm.value < best_value) {
      best_value = nm.value;
      best_params = nm.x;
    }
    result.optimizer_trace.emplace_back(cumulative_evals, best_value);
  }

  ReferenceBasis basis;
  basis.space = space;
  basis.factor_bases = bases_from_params(ctx, best_params);
  // Report the objective evaluated per its defining relative-entropy form.
  double value = discord_objective(rho, basis);
  const ReferenceBasis computational = ReferenceBasis::computational(space);
  const double at_computational = discord_objective(rho, computational);
  if (at_computational < value) {
    value = at_computational;
    basis = computational;
  }
  result.value = value;
  result.optimal_basis = std::move(basis);
  result.converged = any_converged;
  return result;
}

bool is_incoherent_channel(const QuantumChannel& channel, double tol) {
  const int d = channel.space.dim();
  for (const Matrix& k : channel.kraus) {
    for (int j = 0; j < d; ++j) {
      // K |j><j| K^dag is diagonal iff column j of K has at most one
      // non-negligible entry.
      double largest = 0.0, second = 0.0;
      for (int i = 0; i < d; ++i) {
        const double a = std::abs(k(i, j));
        if (a > largest) {
          second = largest;
          largest = a;
        } else if (a > second) {
          second = a;
        }
      }
      if (largest * second > tol) return false;
    }
  }
  return true;
}

}  // namespace dqc1lab::resources
