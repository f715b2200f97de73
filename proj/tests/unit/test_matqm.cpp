#include <cmath>
#include <random>

#include "doctest.h"

#include "../common/oracles.hpp"
#include "dqc1lab/matqm.hpp"

using namespace dqc1lab;

namespace {

Operator op_single(const char* label, Matrix m, OperatorKind kind = OperatorKind::kGeneral) {
  const int d = static_cast<int>(m.rows());
  return Operator(HilbertSpec::single(label, d), std::move(m), kind);
}

}  // namespace

TEST_CASE("hilbert spec invariants") {
  const HilbertSpec space = HilbertSpec::ancilla_register(8);
  CHECK(space.dim() == 16);
  CHECK(space.factor_count() == 2);
  CHECK(space.index_of("ancilla").value() == 0);
  CHECK(!space.index_of("cavity"));
  CHECK_THROWS_AS(HilbertSpec({{"a", 2}, {"a", 3}}), InvalidSpace);
  CHECK_THROWS_AS(HilbertSpec({{"a", 0}}), InvalidSpace);
}

TEST_CASE("density matrix validation") {
  const HilbertSpec q = HilbertSpec::single("q", 2);
  Matrix ok(2, 2);
  ok << 0.5, 0.25, 0.25, 0.5;
  CHECK_NOTHROW(DensityMatrix(q, ok));

  Matrix not_hermitian(2, 2);
  not_hermitian << 0.5, 0.3, 0.1, 0.5;
  CHECK_THROWS_AS(DensityMatrix(q, not_hermitian), InvalidState);

  Matrix bad_trace(2, 2);
  bad_trace << 0.7, 0, 0, 0.7;
  CHECK_THROWS_AS(DensityMatrix(q, bad_trace), InvalidState);

  Matrix not_psd(2, 2);
  not_psd << 1.2, 0, 0, -0.2;
  CHECK_THROWS_AS(DensityMatrix(q, not_psd), InvalidState);
}

TEST_CASE("kron identity and eigenbasis cases") {
  const Operator i2 = op_single("ancilla", Matrix::Identity(2, 2), OperatorKind::kUnitary);
  const Operator i8 = op_single("register", Matrix::Identity(8, 8), OperatorKind::kUnitary);
  const Operator joint = kron(i2, i8);
  CHECK(max_abs(joint.elements() - Matrix::Identity(16, 16)) == 0.0);
  CHECK(joint.space() == HilbertSpec::ancilla_register(8));

  // sigma_z (x) I on |e> (x) |3>: eigenvalue -1 under the |g> -> +1 convention.
  const Operator sz = kron(op_single("ancilla", pauli_z()), i8);
  Vector e3 = Vector::Zero(16);
  e3(8 + 3) = 1.0;
  CHECK(max_abs(sz.elements() * e3 + e3) < 1e-15);

  const Operator sxsx =
      kron(op_single("a", pauli_x()), op_single("b", pauli_x()));
  CHECK(max_abs(sxsx.elements() * sxsx.elements() - Matrix::Identity(4, 4)) < 1e-15);

  CHECK_THROWS_AS(kron(op_single("ancilla", pauli_x()), op_single("ancilla", pauli_x())),
                  InvalidSpace);
}

TEST_CASE("partial trace of a product state returns the kept factor") {
  std::mt19937_64 rng(11);
  const Matrix rho_a = oracles::random_density(2, rng);
  const Matrix rho_r = oracles::random_density(8, rng);
  const DensityMatrix joint(HilbertSpec::ancilla_register(8), kron_matrix(rho_a, rho_r));

  const DensityMatrix kept = partial_trace(joint, {"ancilla"});
  CHECK(max_abs(kept.elements() - rho_a) < 1e-12);
  const DensityMatrix kept_r = partial_trace(joint, {"register"});
  CHECK(max_abs(kept_r.elements() - rho_r) < 1e-12);

  CHECK_THROWS_AS(partial_trace(joint, {"nope"}), InvalidSpace);
  CHECK_THROWS_AS(partial_trace(joint, {}), InvalidSpace);
}

TEST_CASE("partial trace of the phi = pi post-gate state is maximally mixed") {
  const DensityMatrix joint(HilbertSpec::ancilla_register(8),
                            oracles::ideal_post_gate_state(kPi, 8));
  const DensityMatrix anc = partial_trace(joint, {"ancilla"});
  Matrix expected(2, 2);
  expected << 0.5, 0, 0, 0.5;
  CHECK(max_abs(anc.elements() - expected) < 1e-12);
}

TEST_CASE("partial trace of a maximally entangled pair is maximally mixed") {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix joint =
      DensityMatrix::pure(HilbertSpec({{"ancilla", 2}, {"partner", 2}}), bell);
  const DensityMatrix anc = partial_trace(joint, {"ancilla"});
  CHECK(max_abs(anc.elements() - Matrix::Identity(2, 2) / 2.0) < 1e-12);
}

TEST_CASE("partial trace preserves trace on random joint states") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix joint(HilbertSpec::ancilla_register(8),
                              oracles::random_density(16, rng));
    const DensityMatrix reg = partial_trace(joint, {"register"});
    CHECK(std::abs(reg.elements().trace() - Complex(1.0)) < 1e-12);
  }
}

TEST_CASE("eig_hermitian basics") {
  const auto sz = eig_hermitian(pauli_z());
  CHECK(sz.values(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sz.values(1) == doctest::Approx(1.0).epsilon(1e-12));

  const auto id = eig_hermitian(Matrix(Matrix::Identity(16, 16)));
  CHECK(id.values.minCoeff() == doctest::Approx(1.0));
  CHECK(id.values.maxCoeff() == doctest::Approx(1.0));

  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto proj = eig_hermitian(Matrix(plus * plus.adjoint()));
  CHECK(proj.values(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(proj.values(1) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(eig_hermitian(sigma_minus()), NotHermitian);
}

TEST_CASE("eig_hermitian reconstruction residual on random matrices") {
  std::mt19937_64 rng(13);
  for (int dim : {2, 8, 16, 32}) {
    const Matrix h = oracles::random_hermitian(dim, rng);
    const auto eig = eig_hermitian(h);
    const Matrix rebuilt =
        eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    CHECK(max_abs(rebuilt - h) < 1e-10);
    for (Eigen::Index i = 1; i < eig.values.size(); ++i) {
      CHECK(eig.values(i) >= eig.values(i - 1));
    }
  }
}

TEST_CASE("von Neumann entropy reference values") {
  const HilbertSpec q = HilbertSpec::single("q", 2);
  Vector g(2);
  g << 1, 0;
  CHECK(von_neumann_entropy(DensityMatrix::pure(q, g)) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(HilbertSpec::single("r", 8))) ==
        doctest::Approx(3.0).epsilon(1e-12));

  Matrix diag(2, 2);
  diag << 0.25, 0, 0, 0.75;
  // binary entropy H2(1/4), evaluated directly
  CHECK(von_neumann_entropy(DensityMatrix(q, diag)) ==
        doctest::Approx(0.81127812445913283).epsilon(1e-12));
}

TEST_CASE("relative entropy reference values") {
  const HilbertSpec q = HilbertSpec::single("q", 2);
  Vector g(2), e(2);
  g << 1, 0;
  e << 0, 1;
  const DensityMatrix ground = DensityMatrix::pure(q, g);
  const DensityMatrix excited = DensityMatrix::pure(q, e);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(q);

  CHECK(relative_entropy(ground, ground) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(relative_entropy(ground, mixed) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(relative_entropy(ground, excited)));
}

TEST_CASE("fidelity reference values and symmetry") {
  const HilbertSpec q = HilbertSpec::single("q", 2);
  Vector g(2), e(2);
  g << 1, 0;
  e << 0, 1;
  const DensityMatrix ground = DensityMatrix::pure(q, g);
  const DensityMatrix excited = DensityMatrix::pure(q, e);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(q);

  CHECK(fidelity(ground, ground) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(ground, excited) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(fidelity(mixed, ground) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix a(q, oracles::random_density(2, rng));
    const DensityMatrix b(q, oracles::random_density(2, rng));
    CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-9);
  }

  const DensityMatrix big = DensityMatrix::maximally_mixed(HilbertSpec::single("q", 4));
  CHECK_THROWS_AS(fidelity(ground, big), InvalidSpace);
}

TEST_CASE("fidelity and entropy are invariant under global unitaries") {
  std::mt19937_64 rng(19);
  const HilbertSpec space = HilbertSpec::ancilla_register(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rho = oracles::random_density(16, rng);
    const Matrix sig = oracles::random_density(16, rng);
    const Matrix u = oracles::random_unitary(16, rng);
    const DensityMatrix a(space, rho), b(space, sig);
    const DensityMatrix ua(space, u * rho * u.adjoint()), ub(space, u * sig * u.adjoint());
    CHECK(std::abs(fidelity(a, b) - fidelity(ua, ub)) < 1e-9);
    CHECK(std::abs(von_neumann_entropy(a) - von_neumann_entropy(ua)) < 1e-9);
  }
}

TEST_CASE("entropy subadditivity on random joint states") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix joint(HilbertSpec::ancilla_register(8),
                              oracles::random_density(16, rng));
    const double s_joint = von_neumann_entropy(joint);
    const double s_a = von_neumann_entropy(partial_trace(joint, {"ancilla"}));
    const double s_r = von_neumann_entropy(partial_trace(joint, {"register"}));
    CHECK(s_a + s_r - s_joint >= -1e-9);
  }
}

TEST_CASE("matrix_exp_skew reference cases") {
  CHECK(max_abs(matrix_exp_skew(Matrix(Matrix::Zero(4, 4))) - Matrix::Identity(4, 4)) < 1e-12);

  const Matrix g = Complex(0.0, kPi / 2.0) * pauli_z();
  const Matrix u = matrix_exp_skew(g);
  Matrix expected(2, 2);
  expected << std::exp(Complex(0, kPi / 2)), 0, 0, std::exp(Complex(0, -kPi / 2));
  CHECK(max_abs(u - expected) < 1e-12);

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix h = oracles::random_hermitian(8, rng);
    const Matrix skew = Complex(0, 1) * h;
    const Matrix fwd = matrix_exp_skew(skew);
    const Matrix bwd = matrix_exp_skew(Matrix(-skew));
    CHECK(max_abs(fwd * bwd - Matrix::Identity(8, 8)) < 1e-9);
    CHECK(max_abs(fwd.adjoint() * fwd - Matrix::Identity(8, 8)) < 1e-9);
  }

  CHECK_THROWS_AS(matrix_exp_skew(pauli_x()), NotSkew);
}

TEST_CASE("quantum channel apply and cptp defect") {
  const HilbertSpec q = HilbertSpec::single("q", 2);
  const double p = 0.3;
  Matrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1 - p);
  k1 << 0, std::sqrt(p), 0, 0;
  const QuantumChannel damping{q, {k0, k1}};
  CHECK(damping.cptp_defect() < 1e-12);

  Vector e(2);
  e << 0, 1;
  const DensityMatrix out = damping.apply(DensityMatrix::pure(q, e));
  CHECK(std::real(out.elements()(0, 0)) == doctest::Approx(p).epsilon(1e-12));
}
