#include "dqc1lab/matqm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace dqc1lab {

namespace {

std::string space_to_string(const HilbertSpec& s) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < s.factor_count(); ++i) {
    if (i) os << ", ";
    os << s.factor(i).label << ":" << s.factor(i).dim;
  }
  os << "]";
  return os.str();
}

// Mixed-radix digit helpers for a subset of factors. `dims` are the factor
// dimensions in factor order; a flat index decomposes row-major (factor 0
// slowest).
std::vector<int> factor_dims(const HilbertSpec& s) {
  std::vector<int> d(static_cast<size_t>(s.factor_count()));
  for (int i = 0; i < s.factor_count(); ++i) d[static_cast<size_t>(i)] = s.factor(i).dim;
  return d;
}

std::vector<long> factor_strides(const std::vector<int>& dims) {
  std::vector<long> strides(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) {
    strides[static_cast<size_t>(i)] =
        strides[static_cast<size_t>(i) + 1] * dims[static_cast<size_t>(i) + 1];
  }
  return strides;
}

}  // namespace

HilbertSpec::HilbertSpec(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidSpace("HilbertSpec needs at least one factor");
  std::set<std::string> seen;
  total_dim_ = 1;
  for (const auto& f : factors_) {
    if (f.dim < 1) throw InvalidSpace("factor '" + f.label + "' has non-positive dimension");
    if (!seen.insert(f.label).second)
      throw InvalidSpace("duplicate factor label '" + f.label + "'");
    total_dim_ *= f.dim;
  }
}

HilbertSpec HilbertSpec::single(std::string label, int dim) {
  return HilbertSpec({Factor{std::move(label), dim}});
}

HilbertSpec HilbertSpec::ancilla_register(int register_dim) {
  return HilbertSpec({Factor{kAncillaLabel, 2}, Factor{kRegisterLabel, register_dim}});
}

std::optional<int> HilbertSpec::index_of(std::string_view label) const {
  for (int i = 0; i < factor_count(); ++i) {
    if (factors_[static_cast<size_t>(i)].label == label) return i;
  }
  return std::nullopt;
}

bool HilbertSpec::operator==(const HilbertSpec& other) const {
  if (factors_.size() != other.factors_.size()) return false;
  for (size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label != other.factors_[i].label) return false;
    if (factors_[i].dim != other.factors_[i].dim) return false;
  }
  return true;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix::DensityMatrix(HilbertSpec space, Matrix elements, StateTolerance tol)
    : space_(std::move(space)), elements_(std::move(elements)), tol_(tol) {
  if (elements_.rows() != elements_.cols() || elements_.rows() != space_.dim()) {
    throw InvalidSpace("density matrix shape does not match space " + space_to_string(space_));
  }
  const double herm = max_abs(elements_ - elements_.adjoint());
  if (herm > tol_.hermitian) {
    throw InvalidState("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const double trace_err = std::abs(elements_.trace() - Complex(1.0, 0.0));
  if (trace_err > tol_.trace) {
    throw InvalidState("density matrix trace off by " + std::to_string(trace_err));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(elements_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol_.psd_floor) {
    throw InvalidState("density matrix not PSD (min eigenvalue " + std::to_string(min_eig) + ")");
  }
}

DensityMatrix DensityMatrix::pure(HilbertSpec space, const Vector& ket, StateTolerance tol) {
  const double n = ket.norm();
  if (n < 1e-14) throw InvalidState("cannot build a pure state from a zero vector");
  Vector v = ket / n;
  return DensityMatrix(std::move(space), v * v.adjoint(), tol);
}

DensityMatrix DensityMatrix::maximally_mixed(HilbertSpec space) {
  const int d = space.dim();
  return DensityMatrix(std::move(space), Matrix::Identity(d, d) / static_cast<double>(d));
}

Operator::Operator(HilbertSpec space, Matrix elements, OperatorKind kind)
    : space_(std::move(space)), elements_(std::move(elements)), kind_(kind) {
  if (elements_.rows() != elements_.cols() || elements_.rows() != space_.dim()) {
    throw InvalidSpace("operator shape does not match space " + space_to_string(space_));
  }
  if (kind_ == OperatorKind::kUnitary) {
    const int d = static_cast<int>(elements_.rows());
    const double defect = max_abs(elements_.adjoint() * elements_ - Matrix::Identity(d, d));
    if (defect > 1e-10) {
      throw InvalidState("operator tagged unitary has U^dag U defect " + std::to_string(defect));
    }
  } else if (kind_ == OperatorKind::kHermitianObservable) {
    const double herm = max_abs(elements_ - elements_.adjoint());
    if (herm > 1e-12) {
      throw NotHermitian("operator tagged hermitian has defect " + std::to_string(herm));
    }
  }
}

DensityMatrix QuantumChannel::apply(const DensityMatrix& rho) const {
  if (rho.space() != space) throw InvalidSpace("channel space does not match state space");
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : kraus) out += k * rho.elements() * k.adjoint();
  return DensityMatrix(space, std::move(out), rho.tolerance());
}

double QuantumChannel::cptp_defect() const {
  const int d = space.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return max_abs(sum - Matrix::Identity(d, d));
}

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator kron(const Operator& a, const Operator& b) {
  std::vector<Factor> factors = a.space().factors();
  for (const auto& f : b.space().factors()) {
    if (a.space().index_of(f.label)) {
      throw InvalidSpace("kron label collision on '" + f.label + "'");
    }
    factors.push_back(f);
  }
  OperatorKind kind = OperatorKind::kGeneral;
  if (a.kind() == OperatorKind::kUnitary && b.kind() == OperatorKind::kUnitary) {
    kind = OperatorKind::kUnitary;
  } else if (a.kind() == OperatorKind::kHermitianObservable &&
             b.kind() == OperatorKind::kHermitianObservable) {
    kind = OperatorKind::kHermitianObservable;
  }
  return Operator(HilbertSpec(std::move(factors)), kron_matrix(a.elements(), b.elements()), kind);
}

Operator embed(const HilbertSpec& joint, std::string_view label, const Matrix& local,
               OperatorKind kind) {
  const auto idx = joint.index_of(label);
  if (!idx) throw InvalidSpace("embed: unknown label '" + std::string(label) + "'");
  if (local.rows() != joint.factor(*idx).dim) {
    throw InvalidSpace("embed: local operator dimension mismatch");
  }
  Matrix out = Matrix::Identity(1, 1);
  for (int f = 0; f < joint.factor_count(); ++f) {
    const int d = joint.factor(f).dim;
    out = (f == *idx) ? kron_matrix(out, local) : kron_matrix(out, Matrix::Identity(d, d));
  }
  return Operator(joint, std::move(out), kind);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  const HilbertSpec& space = rho.space();
  if (keep.empty()) throw InvalidSpace("partial_trace: keep list is empty");

  std::vector<int> keep_idx;
  std::set<int> keep_set;
  for (const auto& label : keep) {
    const auto idx = space.index_of(label);
    if (!idx) throw InvalidSpace("partial_trace: unknown label '" + label + "'");
    if (!keep_set.insert(*idx).second)
      throw InvalidSpace("partial_trace: repeated label '" + label + "'");
    keep_idx.push_back(*idx);
  }
  std::vector<int> traced_idx;
  for (int f = 0; f < space.factor_count(); ++f) {
    if (!keep_set.count(f)) traced_idx.push_back(f);
  }

  const std::vector<int> dims = factor_dims(space);
  const std::vector<long> strides = factor_strides(dims);

  long keep_dim = 1;
  std::vector<Factor> out_factors;
  for (int f : keep_idx) {
    keep_dim *= dims[static_cast<size_t>(f)];
    out_factors.push_back(space.factor(f));
  }
  long traced_dim = 1;
  for (int f : traced_idx) traced_dim *= dims[static_cast<size_t>(f)];

  // Flat index of the full space from a keep-subindex and a traced-subindex,
  // each interpreted in the mixed radix of its own factor list.
  auto compose = [&](long keep_flat, long traced_flat) {
    long flat = 0;
    for (int j = static_cast<int>(keep_idx.size()) - 1; j >= 0; --j) {
      const int f = keep_idx[static_cast<size_t>(j)];
      const int d = dims[static_cast<size_t>(f)];
      flat += (keep_flat % d) * strides[static_cast<size_t>(f)];
      keep_flat /= d;
    }
    for (int j = static_cast<int>(traced_idx.size()) - 1; j >= 0; --j) {
      const int f = traced_idx[static_cast<size_t>(j)];
      const int d = dims[static_cast<size_t>(f)];
      flat += (traced_flat % d) * strides[static_cast<size_t>(f)];
      traced_flat /= d;
    }
    return flat;
  };

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  const Matrix& m = rho.elements();
  for (long r = 0; r < keep_dim; ++r) {
    for (long c = 0; c < keep_dim; ++c) {
      Complex acc = 0.0;
      for (long t = 0; t < traced_dim; ++t) acc += m(compose(r, t), compose(c, t));
      out(r, c) = acc;
    }
  }
  return DensityMatrix(HilbertSpec(std::move(out_factors)), std::move(out), rho.tolerance());
}

EigHermitian eig_hermitian(const Matrix& a, double hermitian_tol) {
  const double herm = max_abs(a - a.adjoint());
  if (herm > hermitian_tol) {
    throw NotHermitian("eig_hermitian: input defect " + std::to_string(herm));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver failed");
  return EigHermitian{es.eigenvalues(), es.eigenvectors()};
}

EigHermitian eig_hermitian(const Operator& a) { return eig_hermitian(a.elements(), 1e-9); }

double shannon_entropy_bits(const RealVector& probs) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > kEigenvalueFloor) s -= p * std::log2(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.elements(), Eigen::EigenvaluesOnly);
  return shannon_entropy_bits(es.eigenvalues());
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.space() != sigma.space()) throw InvalidSpace("relative_entropy: space mismatch");
  const EigHermitian sig = eig_hermitian(sigma.elements(), 1e-9);

  // Support check: weight of rho inside ker(sigma).
  double kernel_weight = 0.0;
  double tr_rho_log_sigma = 0.0;
  for (Eigen::Index i = 0; i < sig.values.size(); ++i) {
    const double lam = sig.values(i);
    const Vector v = sig.vectors.col(i);
    const double w = std::max(0.0, std::real((v.adjoint() * rho.elements() * v)(0, 0)));
    if (lam <= kEigenvalueFloor) {
      kernel_weight += w;
    } else {
      tr_rho_log_sigma += w * std::log2(lam);
    }
  }
  if (kernel_weight > 1e-10) return std::numeric_limits<double>::infinity();

  const double value = -von_neumann_entropy(rho) - tr_rho_log_sigma;
  return std::max(0.0, value);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.space() != sigma.space()) throw InvalidSpace("fidelity: space mismatch");
  const EigHermitian sig = eig_hermitian(sigma.elements(), 1e-9);
  RealVector sqrt_vals(sig.values.size());
  for (Eigen::Index i = 0; i < sig.values.size(); ++i) {
    sqrt_vals(i) = std::sqrt(std::max(0.0, sig.values(i)));
  }
  const Matrix sqrt_sigma =
      sig.vectors * sqrt_vals.cast<Complex>().asDiagonal() * sig.vectors.adjoint();
  const Matrix inner = sqrt_sigma * rho.elements() * sqrt_sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es((inner + inner.adjoint()) / 2.0,
                                           Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    f += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  return std::clamp(f, 0.0, 1.0);
}

Matrix matrix_exp_skew(const Matrix& g) {
  const double skew_defect = max_abs(g + g.adjoint());
  if (skew_defect > 1e-10) {
    throw NotSkew("matrix_exp_skew: G + G^dag defect " + std::to_string(skew_defect));
  }
  // G = iK with K Hermitian; exp(G) = V exp(i diag) V^dag.
  const Matrix k = Complex(0.0, -1.0) * (g - g.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator matrix_exp_skew(const Operator& g) {
  return Operator(g.space(), matrix_exp_skew(g.elements()), OperatorKind::kUnitary);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Matrix destroy_op(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number_op(int dim) {
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Vector basis_ket(int dim, int k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return v;
}

Complex expectation(const DensityMatrix& rho, const Matrix& op) {
  return (rho.elements() * op).trace();
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  if (rho.space() != op.space()) throw InvalidSpace("expectation: space mismatch");
  return expectation(rho, op.elements());
}

}  // namespace dqc1lab
