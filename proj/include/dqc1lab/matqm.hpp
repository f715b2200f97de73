#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqc1lab/types.hpp"

namespace dqc1lab {

inline constexpr const char* kAncillaLabel = "ancilla";
inline constexpr const char* kRegisterLabel = "register";

struct Factor {
  std::string label;
  int dim = 0;
};

/// Ordered list of labeled tensor factors. Flat indices are row-major:
/// factor 0 is the slowest-varying digit.
class HilbertSpec {
 public:
  HilbertSpec() = default;
  explicit HilbertSpec(std::vector<Factor> factors);

  static HilbertSpec single(std::string label, int dim);
  /// [("ancilla", 2), ("register", register_dim)]
  static HilbertSpec ancilla_register(int register_dim);

  int dim() const { return total_dim_; }
  int factor_count() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int i) const { return factors_.at(static_cast<size_t>(i)); }
  const std::vector<Factor>& factors() const { return factors_; }
  std::optional<int> index_of(std::string_view label) const;

  bool operator==(const HilbertSpec& other) const;
  bool operator!=(const HilbertSpec& other) const { return !(*this == other); }

 private:
  std::vector<Factor> factors_;
  int total_dim_ = 1;
};

struct StateTolerance {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double psd_floor = 1e-10;
};

/// Hermitian, unit-trace, PSD (up to tolerance) matrix over a HilbertSpec.
/// Immutable after construction; construction validates all invariants.
class DensityMatrix {
 public:
  DensityMatrix(HilbertSpec space, Matrix elements, StateTolerance tol = {});

  static DensityMatrix pure(HilbertSpec space, const Vector& ket, StateTolerance tol = {});
  static DensityMatrix maximally_mixed(HilbertSpec space);

  const HilbertSpec& space() const { return space_; }
  const Matrix& elements() const { return elements_; }
  const StateTolerance& tolerance() const { return tol_; }
  int dim() const { return static_cast<int>(elements_.rows()); }

 private:
  HilbertSpec space_;
  Matrix elements_;
  StateTolerance tol_;
};

enum class OperatorKind { kUnitary, kHermitianObservable, kGeneral };

class Operator {
 public:
  Operator(HilbertSpec space, Matrix elements, OperatorKind kind = OperatorKind::kGeneral);

  const HilbertSpec& space() const { return space_; }
  const Matrix& elements() const { return elements_; }
  OperatorKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(elements_.rows()); }

 private:
  HilbertSpec space_;
  Matrix elements_;
  OperatorKind kind_;
};

/// CPTP map stored as a Kraus-operator list.
struct QuantumChannel {
  HilbertSpec space;
  std::vector<Matrix> kraus;

  DensityMatrix apply(const DensityMatrix& rho) const;
  /// max-abs of sum_k K^dag K - I.
  double cptp_defect() const;
};

// ---- operations ------------------------------------------------------

Matrix kron_matrix(const Matrix& a, const Matrix& b);

/// Result space is the concatenation of the factor lists; throws
/// InvalidSpace on a label collision.
Operator kron(const Operator& a, const Operator& b);

/// Lift a matrix acting on one factor to the joint space (identity on the
/// other factors).
Operator embed(const HilbertSpec& joint, std::string_view label, const Matrix& local,
               OperatorKind kind = OperatorKind::kGeneral);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

struct EigHermitian {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors, unitary
};

EigHermitian eig_hermitian(const Matrix& a, double hermitian_tol = 1e-9);
EigHermitian eig_hermitian(const Operator& a);

/// Shannon entropy in bits of a probability vector; entries below the
/// eigenvalue floor count as exact zeros.
double shannon_entropy_bits(const RealVector& probs);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// S(rho||sigma) in bits. Returns +infinity when supp(rho) is not
/// contained in supp(sigma); that is a value, not a failure.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Uhlmann fidelity tr sqrt(sqrt(sigma) rho sqrt(sigma)), clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// exp(G) for anti-Hermitian G, computed by eigendecomposition; result is
/// unitary. Throws NotSkew when G is not anti-Hermitian within 1e-10.
Matrix matrix_exp_skew(const Matrix& g);
Operator matrix_exp_skew(const Operator& g);

// ---- building blocks -------------------------------------------------

Matrix pauli_x();
Matrix pauli_y();
/// Convention: sigma_z |g> = +|g>, |g> is the first basis vector.
Matrix pauli_z();
Matrix sigma_minus();  // |g><e|
Matrix destroy_op(int dim);
Matrix number_op(int dim);
Vector basis_ket(int dim, int k);

Complex expectation(const DensityMatrix& rho, const Matrix& op);
Complex expectation(const DensityMatrix& rho, const Operator& op);

double max_abs(const Matrix& m);

}  // namespace dqc1lab
