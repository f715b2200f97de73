#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"

#include "dqc1lab/prep.hpp"

using namespace dqc1lab;
using prep::TreeOptions;

namespace {

const HilbertSpec kJoint = HilbertSpec::ancilla_register(8);

Vector joint_ket(int ancilla, std::vector<int> levels) {
  Vector v = Vector::Zero(16);
  for (int k : levels) v(ancilla * 8 + k) = 1.0;
  return v / v.norm();
}

// Independent route for the tree output: compose the per-branch Kraus
// operators explicitly (projector, optional flip, optional phase unitary,
// adaptive gate) and sum over all depth-3 paths. No tree-walk logic shared
// with the implementation.
Matrix channel_composition_output(bool with_phases) {
  const auto steps = prep::tree_steps();
  std::map<std::string, Matrix> gate;
  for (const auto& s : steps) gate[s.branch_label] = s.completed_unitary.elements();

  Matrix pg = Matrix::Zero(16, 16), pe = Matrix::Zero(16, 16);
  pg.topLeftCorner(8, 8) = Matrix::Identity(8, 8);
  pe.bottomRightCorner(8, 8) = Matrix::Identity(8, 8);
  Matrix flip = Matrix::Zero(16, 16);
  flip.topRightCorner(8, 8) = Matrix::Identity(8, 8);
  flip.bottomLeftCorner(8, 8) = Matrix::Identity(8, 8);

  Matrix theta = Matrix::Identity(16, 16);
  if (with_phases) {
    const Matrix local = prep::measurement_phase_channel().kraus[0];
    for (int a = 0; a < 2; ++a) theta.block(a * 8, a * 8, 8, 8) = local;
  }

  auto layer_kraus = [&](const std::string& path, int outcome) {
    const std::string child = path + (outcome == 0 ? '0' : '1');
    const Matrix branch = outcome == 0 ? Matrix(theta * pg) : Matrix(theta * flip * pe);
    const auto it = gate.find(child);
    return it == gate.end() ? branch : Matrix(it->second * branch);
  };

  const double r = 1.0 / std::sqrt(2.0);
  Matrix had(2, 2);
  had << r, -r, r, r;
  const Matrix prep_rot = kron_matrix(had, Matrix::Identity(8, 8));
  const Vector start = prep_rot * joint_ket(0, {0});
  const Matrix rho0 = start * start.adjoint();

  Matrix out = Matrix::Zero(16, 16);
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      for (int b3 = 0; b3 < 2; ++b3) {
        std::string path;
        Matrix k = layer_kraus(path, b1);
        path += (b1 == 0 ? '0' : '1');
        k = layer_kraus(path, b2) * k;
        path += (b2 == 0 ? '0' : '1');
        k = layer_kraus(path, b3) * k;
        out += k * rho0 * k.adjoint();
      }
    }
  }
  // register marginal
  Matrix reg = Matrix::Zero(8, 8);
  for (int a = 0; a < 2; ++a) reg += out.block(a * 8, a * 8, 8, 8);
  return reg;
}

}  // namespace

TEST_CASE("complete_unitary identity and error cases") {
  const Vector v = joint_ket(0, {3});
  const Operator id = prep::complete_unitary(kJoint, {v, v});
  CHECK(max_abs(id.elements() - Matrix::Identity(16, 16)) < 1e-12);

  CHECK_THROWS_AS(prep::complete_unitary(kJoint, {Vector::Zero(16), v}), InvalidMap);
  CHECK_THROWS_AS(prep::complete_unitary(kJoint, {Vector::Zero(4), Vector::Zero(4)}),
                  InvalidMap);
}

TEST_CASE("adaptive gates reproduce their target maps and are unitary") {
  for (const auto& step : prep::tree_steps()) {
    const Matrix& g = step.completed_unitary.elements();
    CHECK(max_abs(g.adjoint() * g - Matrix::Identity(16, 16)) < 1e-10);
    const Vector in = step.target_map.input / step.target_map.input.norm();
    const Vector out = step.target_map.output / step.target_map.output.norm();
    CHECK((g * in - out).norm() < 1e-9);
  }
}

TEST_CASE("first adaptive gate maps the ground state to the listed target") {
  // |g,0> -> (|g>(|0>+|7>) + |e>(|2>+|5>)) / 2
  const auto steps = prep::tree_steps();
  const auto& g00 = steps.front();
  REQUIRE(g00.branch_label == "0");
  const Vector expected = (joint_ket(0, {0, 7}) + joint_ket(1, {2, 5})) / std::sqrt(2.0);
  CHECK((g00.completed_unitary.elements() * joint_ket(0, {0}) - expected).norm() < 1e-9);
}

TEST_CASE("measure_ancilla branch structure") {
  const DensityMatrix ground = DensityMatrix::pure(kJoint, joint_ket(0, {2}));
  const auto certain = prep::measure_ancilla(ground);
  REQUIRE(certain.size() == 1);
  CHECK(certain[0].outcome == 0);
  CHECK(certain[0].probability == doctest::Approx(1.0).epsilon(1e-12));

  const Vector plus = (joint_ket(0, {4}) + joint_ket(1, {4})) / std::sqrt(2.0);
  const auto even = prep::measure_ancilla(DensityMatrix::pure(kJoint, plus));
  REQUIRE(even.size() == 2);
  CHECK(even[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(even[1].probability == doctest::Approx(0.5).epsilon(1e-12));

  // the listed layer-1 state: equal branches with the listed post-states
  const Vector psi10 = (joint_ket(0, {0, 7}) + joint_ket(1, {2, 5})) / std::sqrt(2.0);
  const auto branches = prep::measure_ancilla(DensityMatrix::pure(kJoint, psi10));
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  const Vector post_g = joint_ket(0, {0, 7});
  const Vector post_e = joint_ket(1, {2, 5});
  CHECK(max_abs(branches[0].post_state.elements() - post_g * post_g.adjoint()) < 1e-12);
  CHECK(max_abs(branches[1].post_state.elements() - post_e * post_e.adjoint()) < 1e-12);
}

TEST_CASE("requesting a zero-probability branch is an error") {
  const DensityMatrix ground = DensityMatrix::pure(kJoint, joint_ket(0, {2}));
  const auto branch = prep::measure_ancilla_branch(ground, 0);
  CHECK(branch.probability == doctest::Approx(1.0));
  CHECK_THROWS_AS(prep::measure_ancilla_branch(ground, 1), ZeroProbabilityBranch);
  CHECK_THROWS_AS(prep::measure_ancilla_branch(ground, 7), InvalidConfig);
}

TEST_CASE("reset flips the excited branch and preserves purity") {
  const DensityMatrix untouched = DensityMatrix::pure(kJoint, joint_ket(0, {5}));
  CHECK(max_abs(prep::reset_ancilla(untouched, 0).elements() - untouched.elements()) == 0.0);

  const DensityMatrix excited = DensityMatrix::pure(kJoint, joint_ket(1, {3}));
  const DensityMatrix reset = prep::reset_ancilla(excited, 1);
  const Vector expected = joint_ket(0, {3});
  CHECK(max_abs(reset.elements() - expected * expected.adjoint()) < 1e-14);
  const double purity = std::real((reset.elements() * reset.elements()).trace());
  CHECK(purity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("per-layer channels are trace preserving") {
  // Kraus assembly per node: measurement projector, reset, gate.
  const auto steps = prep::tree_steps();
  std::map<std::string, Matrix> gate;
  for (const auto& s : steps) gate[s.branch_label] = s.completed_unitary.elements();

  Matrix pg = Matrix::Zero(16, 16), pe = Matrix::Zero(16, 16);
  pg.topLeftCorner(8, 8) = Matrix::Identity(8, 8);
  pe.bottomRightCorner(8, 8) = Matrix::Identity(8, 8);
  Matrix flip = Matrix::Zero(16, 16);
  flip.topRightCorner(8, 8) = Matrix::Identity(8, 8);
  flip.bottomLeftCorner(8, 8) = Matrix::Identity(8, 8);

  for (const std::string node : {"", "0", "1", "00", "01", "10", "11"}) {
    const auto kraus_for = [&](int outcome) {
      const std::string child = node + (outcome == 0 ? '0' : '1');
      Matrix k = outcome == 0 ? pg : Matrix(flip * pe);
      const auto it = gate.find(child);
      if (it != gate.end()) k = it->second * k;
      return k;
    };
    const QuantumChannel layer{kJoint, {kraus_for(0), kraus_for(1)}};
    CHECK(layer.cptp_defect() < 1e-9);
  }
}

TEST_CASE("ideal tree output is the maximally mixed register state") {
  const auto result = prep::run_binary_tree({});
  const auto mm = DensityMatrix::maximally_mixed(HilbertSpec::single("register", 8));
  CHECK(fidelity(result.register_state, mm) == doctest::Approx(1.0).epsilon(1e-10));

  REQUIRE(result.trace.branch_probabilities.size() == 8);
  for (const auto& [path, p] : result.trace.branch_probabilities) {
    CHECK(std::abs(p - 0.125) < 1e-10);
  }

  // Fock-diagonal output
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (i != j) CHECK(std::abs(result.register_state.elements()(i, j)) < 1e-10);
    }
  }

  // every node reaches its listed target exactly
  for (const auto& [path, f] : result.trace.node_fidelity_vs_target) {
    CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
  }

  // leaves land on the listed Fock levels
  const auto levels = prep::tree_leaf_levels();
  for (const auto& [path, state] : result.trace.branch_states) {
    const Vector expected = joint_ket(0, {levels.at(path)});
    CHECK(std::abs(std::real((expected.adjoint() * state.elements() * expected)(0, 0)) - 1.0) <
          1e-10);
  }

  // channel-composition route agrees
  CHECK(max_abs(result.register_state.elements() - channel_composition_output(false)) < 1e-12);
}

TEST_CASE("sampled runs are deterministic and uniform over leaves") {
  TreeOptions opt;
  opt.sampled = true;
  opt.seed = 12345;
  const auto first = prep::run_binary_tree(opt);
  const auto second = prep::run_binary_tree(opt);
  CHECK(first.trace.sampled_path == second.trace.sampled_path);
  CHECK(max_abs(first.register_state.elements() - second.register_state.elements()) == 0.0);

  std::map<std::string, int> histogram;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    opt.seed = 1000 + static_cast<std::uint64_t>(i);
    histogram[prep::run_binary_tree(opt).trace.sampled_path]++;
  }
  REQUIRE(histogram.size() == 8);
  // 3-sigma binomial band around runs/8
  const double sigma = std::sqrt(runs * 0.125 * 0.875);
  for (const auto& [path, count] : histogram) {
    CHECK(std::abs(count - runs / 8.0) <= 3.0 * sigma);
  }
}

TEST_CASE("measurement phase channel values") {
  const QuantumChannel channel = prep::measurement_phase_channel();
  REQUIRE(channel.kraus.size() == 1);
  const Matrix& d = channel.kraus[0];
  CHECK(channel.cptp_defect() < 1e-12);

  const std::array<double, 8> phases = {0.0, 0.31, 0.65, 1.03, 1.43, 1.85, 2.30, 2.78};
  for (int k = 0; k < 8; ++k) {
    CHECK(std::abs(d(k, k) - std::exp(Complex(0.0, phases[static_cast<size_t>(k)]))) < 1e-12);
  }

  // |0> is the reference: unchanged
  Vector vac = Vector::Zero(8);
  vac(0) = 1.0;
  CHECK((d * vac - vac).norm() < 1e-14);

  // relative phase on (|0> + |1>)/sqrt(2)
  Vector superpos = Vector::Zero(8);
  superpos(0) = superpos(1) = 1.0 / std::sqrt(2.0);
  const Vector rotated = d * superpos;
  CHECK(std::abs(std::arg(rotated(1) / rotated(0)) - 0.31) < 1e-12);

  // Fock-diagonal states are fixed points
  const DensityMatrix mm = DensityMatrix::maximally_mixed(channel.space);
  CHECK(max_abs(channel.apply(mm).elements() - mm.elements()) < 1e-14);
}

TEST_CASE("uncompensated measurement phases distort the prepared mixture") {
  // The phases act between measurement and gate, where the branch register
  // states are Fock superpositions, so the output is not the maximally
  // mixed state. Frozen value from the exhaustive branch evaluation,
  // cross-checked against the explicit channel composition.
  TreeOptions opt;
  opt.with_phase_model = true;
  const auto result = prep::run_binary_tree(opt);

  const auto mm = DensityMatrix::maximally_mixed(HilbertSpec::single("register", 8));
  CHECK(fidelity(result.register_state, mm) ==
        doctest::Approx(0.857625467285246).epsilon(1e-9));

  CHECK(max_abs(result.register_state.elements() - channel_composition_output(true)) < 1e-12);

  double total = 0.0;
  for (const auto& [path, p] : result.trace.branch_probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  // the first gate input |g,0> is a Fock state, so that node is unaffected;
  // deeper nodes degrade
  CHECK(result.trace.node_fidelity_vs_target.at("0") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.trace.node_fidelity_vs_target.at("00") ==
        doctest::Approx(std::abs(std::cos(2.78 / 2.0))).epsilon(1e-9));
}
