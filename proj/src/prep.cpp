#include "dqc1lab/prep.hpp"

#include <cmath>

#include "dqc1lab/noise.hpp"
#include "dqc1lab/rng.hpp"

namespace dqc1lab::prep {

namespace {

constexpr int kRegisterDim = 8;

HilbertSpec joint_space() { return HilbertSpec::ancilla_register(kRegisterDim); }

Vector ket(int ancilla, std::initializer_list<int> fock_levels) {
  Vector v = Vector::Zero(2 * kRegisterDim);
  for (int k : fock_levels) v(ancilla * kRegisterDim + k) = 1.0;
  return v / v.norm();
}

Vector ket_ge(std::initializer_list<int> g_levels, std::initializer_list<int> e_levels) {
  Vector v = Vector::Zero(2 * kRegisterDim);
  for (int k : g_levels) v(k) = 1.0;
  for (int k : e_levels) v(kRegisterDim + k) = 1.0;
  return v / v.norm();
}

// Calibrated measurement-induced phase per photon number, radians.
constexpr std::array<double, 8> kMeasurementPhases = {0.0,  0.31, 0.65, 1.03,
                                                      1.43, 1.85, 2.30, 2.78};

double pure_target_fidelity(const DensityMatrix& rho, const Vector& target) {
  const Complex overlap = (target.adjoint() * rho.elements() * target)(0, 0);
  return std::sqrt(std::max(0.0, std::real(overlap)));
}

Matrix phase_unitary_joint() {
  Matrix d = Matrix::Identity(2 * kRegisterDim, 2 * kRegisterDim);
  for (int a = 0; a < 2; ++a) {
    for (int k = 0; k < kRegisterDim; ++k) {
      d(a * kRegisterDim + k, a * kRegisterDim + k) =
          std::exp(Complex(0.0, kMeasurementPhases[static_cast<size_t>(k)]));
    }
  }
  return d;
}

}  // namespace

Operator complete_unitary(const HilbertSpec& space, const TargetMap& map) {
  const int d = space.dim();
  if (map.input.size() != d || map.output.size() != d) {
    throw InvalidMap("complete_unitary: target dimensions do not match the space");
  }
  const double nin = map.input.norm();
  const double nout = map.output.norm();
  if (nin < 1e-12 || nout < 1e-12) {
    throw InvalidMap("complete_unitary: target states are not normalizable");
  }

  // Modified Gram-Schmidt over the computational basis, seeded with the
  // specified column on each side; the pairing of complements fixes the
  // completion deterministically.
  auto orthonormal_list = [d](const Vector& seed) {
    std::vector<Vector> list;
    list.push_back(seed);
    for (int k = 0; k < d && static_cast<int>(list.size()) < d; ++k) {
      Vector v = basis_ket(d, k);
      for (const Vector& u : list) v -= (u.adjoint() * v)(0, 0) * u;
      const double n = v.norm();
      if (n > 1e-9) list.push_back(v / n);
    }
    if (static_cast<int>(list.size()) != d) {
      throw InvalidMap("complete_unitary: Gram-Schmidt completion failed");
    }
    return list;
  };

  const auto in_list = orthonormal_list(map.input / nin);
  const auto out_list = orthonormal_list(map.output / nout);
  Matrix u = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) u += out_list[static_cast<size_t>(k)] *
                                   in_list[static_cast<size_t>(k)].adjoint();
  return Operator(space, std::move(u), OperatorKind::kUnitary);
}

std::vector<MeasurementBranch> measure_ancilla(const DensityMatrix& joint) {
  const auto anc_idx = joint.space().index_of(kAncillaLabel);
  if (!anc_idx) throw InvalidSpace("measure_ancilla: no ancilla factor");
  const int d_total = joint.dim();

  std::vector<MeasurementBranch> branches;
  for (int outcome = 0; outcome < 2; ++outcome) {
    Matrix proj = Matrix::Zero(2, 2);
    proj(outcome, outcome) = 1.0;
    const Matrix p = embed(joint.space(), kAncillaLabel, proj).elements();
    const double prob = std::max(0.0, std::real((joint.elements() * p).trace()));
    if (prob < 1e-15) continue;
    Matrix post = p * joint.elements() * p / prob;
    post = (post + Matrix(post.adjoint())) / 2.0;
    branches.push_back(MeasurementBranch{
        outcome, prob, DensityMatrix(joint.space(), std::move(post), joint.tolerance())});
  }
  if (branches.empty()) {
    throw ZeroProbabilityBranch("measure_ancilla: no branch has support (dim " +
                                std::to_string(d_total) + ")");
  }
  return branches;
}

MeasurementBranch measure_ancilla_branch(const DensityMatrix& joint, int outcome) {
  if (outcome != 0 && outcome != 1) throw InvalidConfig("ancilla outcome must be 0 or 1");
  for (auto& branch : measure_ancilla(joint)) {
    if (branch.outcome == outcome) return std::move(branch);
  }
  throw ZeroProbabilityBranch("requested ancilla outcome " + std::to_string(outcome) +
                              " has no support");
}

MeasurementBranch measure_ancilla_sampled(const DensityMatrix& joint, std::uint64_t& rng_state) {
  auto branches = measure_ancilla(joint);
  SplitMix64 rng(rng_state);
  const double u = rng.uniform();
  rng_state = rng.state;
  double acc = 0.0;
  for (auto& b : branches) {
    acc += b.probability;
    if (u < acc) return std::move(b);
  }
  return std::move(branches.back());
}

DensityMatrix reset_ancilla(const DensityMatrix& joint, int outcome) {
  if (outcome == 0) return joint;
  const Matrix flip = embed(joint.space(), kAncillaLabel, pauli_x()).elements();
  return DensityMatrix(joint.space(), flip * joint.elements() * flip.adjoint(),
                       joint.tolerance());
}

QuantumChannel measurement_phase_channel() {
  Matrix d = Matrix::Identity(kRegisterDim, kRegisterDim);
  for (int k = 0; k < kRegisterDim; ++k) {
    d(k, k) = std::exp(Complex(0.0, kMeasurementPhases[static_cast<size_t>(k)]));
  }
  return QuantumChannel{HilbertSpec::single(kRegisterLabel, kRegisterDim), {std::move(d)}};
}

std::vector<AdaptiveStep> tree_steps() {
  const HilbertSpec space = joint_space();
  const auto targets = tree_node_targets();
  auto make = [&](const std::string& branch, const Vector& in, const Vector& out) {
    TargetMap map{in, out};
    return AdaptiveStep{branch, map, complete_unitary(space, map)};
  };
  std::vector<AdaptiveStep> steps;
  steps.push_back(make("0", ket(0, {0}), targets.at("0")));
  steps.push_back(make("1", ket(0, {0}), targets.at("1")));
  steps.push_back(make("00", ket(0, {0, 7}), targets.at("00")));
  steps.push_back(make("01", ket(0, {2, 5}), targets.at("01")));
  steps.push_back(make("10", ket(0, {1, 6}), targets.at("10")));
  steps.push_back(make("11", ket(0, {3, 4}), targets.at("11")));
  return steps;
}

std::map<std::string, Vector> tree_node_targets() {
  std::map<std::string, Vector> t;
  t[""] = ket_ge({0}, {0});
  t["0"] = ket_ge({0, 7}, {2, 5});
  t["1"] = ket_ge({1, 6}, {3, 4});
  t["00"] = ket_ge({7}, {0});
  t["01"] = ket_ge({5}, {2});
  t["10"] = ket_ge({6}, {1});
  t["11"] = ket_ge({4}, {3});
  for (const auto& [path, level] : tree_leaf_levels()) t[path] = ket(0, {level});
  return t;
}

std::map<std::string, int> tree_leaf_levels() {
  return {{"000", 7}, {"001", 0}, {"010", 5}, {"011", 2},
          {"100", 6}, {"101", 1}, {"110", 4}, {"111", 3}};
}

PrepResult run_binary_tree(const TreeOptions& options) {
  const HilbertSpec space = joint_space();
  const auto steps = tree_steps();
  const auto targets = tree_node_targets();
  auto step_for = [&steps](const std::string& path) -> const AdaptiveStep* {
    for (const auto& s : steps) {
      if (s.branch_label == path) return &s;
    }
    return nullptr;
  };

  const Matrix phase_u = phase_unitary_joint();
  const Matrix r = kron_matrix(
      (Matrix(2, 2) << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0),
       1.0 / std::sqrt(2.0))
          .finished(),
      Matrix::Identity(kRegisterDim, kRegisterDim));
  const Vector root = r * ket(0, {0});

  struct Branch {
    std::string path;
    double weight;
    DensityMatrix state;
  };

  ChannelTrace trace;
  trace.seed = options.seed;
  trace.sampled = options.sampled;

  std::optional<noise::Lindbladian> layer_noise;
  double layer_duration = 0.0;
  if (options.noise) {
    options.noise->validate();
    noise::Lindbladian l;
    l.space = space;
    l.hamiltonian = Matrix::Zero(16, 16);
    const Matrix id8 = Matrix::Identity(8, 8);
    l.collapse.push_back(std::sqrt(1.0 / options.noise->t1_us) *
                         kron_matrix(sigma_minus(), id8));
    l.collapse.push_back(std::sqrt(1.0 / (2.0 * options.noise->tphi_us)) *
                         kron_matrix(pauli_z(), id8));
    l.collapse.push_back(std::sqrt(1.0 / options.noise->tau_s_us) *
                         kron_matrix(Matrix::Identity(2, 2), destroy_op(8)));
    layer_noise = std::move(l);
    layer_duration = options.noise->gate_duration("prep_layer");
  }

  auto advance = [&](Branch branch, const MeasurementBranch& m) {
    branch.path += (m.outcome == 0 ? '0' : '1');
    branch.weight *= m.probability;
    DensityMatrix state = reset_ancilla(m.post_state, m.outcome);
    if (options.with_phase_model) {
      state = DensityMatrix(space, phase_u * state.elements() * phase_u.adjoint(),
                            state.tolerance());
    }
    if (const AdaptiveStep* step = step_for(branch.path)) {
      const Matrix& g = step->completed_unitary.elements();
      state = DensityMatrix(space, g * state.elements() * g.adjoint(), state.tolerance());
    }
    if (layer_noise && layer_duration > 0.0) {
      state = noise::evolve(*layer_noise, state, layer_duration, noise::kDefaultDtUs);
    }
    trace.node_fidelity_vs_target[branch.path] =
        pure_target_fidelity(state, targets.at(branch.path));
    branch.state = std::move(state);
    return branch;
  };

  std::vector<Branch> layer;
  layer.push_back(Branch{"", 1.0, DensityMatrix::pure(space, root)});

  if (options.sampled) {
    // Scramble so that nearby caller seeds give independent trajectories.
    std::uint64_t rng_state = mix64(options.seed);
    Branch current = std::move(layer.front());
    for (int depth = 0; depth < 3; ++depth) {
      const MeasurementBranch m = measure_ancilla_sampled(current.state, rng_state);
      current = advance(std::move(current), m);
    }
    trace.sampled_path = current.path;
    trace.branch_probabilities[current.path] = current.weight;
    trace.branch_states.emplace(current.path, current.state);
    return PrepResult{partial_trace(current.state, {kRegisterLabel}), std::move(trace)};
  }

  for (int depth = 0; depth < 3; ++depth) {
    std::vector<Branch> next;
    for (const Branch& b : layer) {
      for (const MeasurementBranch& m : measure_ancilla(b.state)) {
        next.push_back(advance(b, m));
      }
    }
    layer = std::move(next);
  }

  Matrix mixture = Matrix::Zero(space.dim(), space.dim());
  for (const Branch& b : layer) {
    trace.branch_probabilities[b.path] = b.weight;
    trace.branch_states.emplace(b.path, b.state);
    mixture += b.weight * b.state.elements();
  }
  const DensityMatrix joint(space, std::move(mixture), layer.front().state.tolerance());
  return PrepResult{partial_trace(joint, {kRegisterLabel}), std::move(trace)};
}

}  // namespace dqc1lab::prep
