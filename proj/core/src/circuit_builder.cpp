#include "elastoq/circuit_builder.hpp"

#include <cmath>

namespace elastoq {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::u1 ? "u1" : "u2";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "u1") return Scheme::u1;
  if (name == "u2") return Scheme::u2;
  throw ParameterError("unknown scheme '" + name + "' (expected u1 or u2)");
}

int ladder_qubit(const LatticeShape& shape, Axis axis, int k) {
  if (k < 1 || k > shape.n()) {
    throw ParameterError("ladder level 'k' must be in 1.." +
                         std::to_string(shape.n()));
  }
  const int q = 3 * shape.n() + kStateQubits;
  return q - (shape.axis_bit_offset(axis) + k - 1);
}

std::vector<Gate> build_W(const LatticeShape& shape, Axis axis, int k,
                          double theta, int pattern) {
  const int top = ladder_qubit(shape, axis, k);
  std::vector<int> lower;
  for (int l = 1; l < k; ++l) lower.push_back(ladder_qubit(shape, axis, l));

  std::vector<Gate> g;
  for (int t : lower) g.emplace_back(Cnot{top, t});
  g.emplace_back(PhaseS{top, true});
  g.emplace_back(Hadamard{top});
  // exp(i theta Z) == RZ(-2 theta)
  if (pattern >= 0) {
    g.emplace_back(PatternControlledRz{-2.0 * theta, pattern, lower, top});
  } else {
    g.emplace_back(MultiControlledRz{-2.0 * theta, lower, top});
  }
  g.emplace_back(Hadamard{top});
  g.emplace_back(PhaseS{top, false});
  for (int t : lower) g.emplace_back(Cnot{top, t});
  return g;
}

std::vector<Gate> build_W_jk(const HamiltonianModel& model, const TermKey& key,
                             double tau) {
  return build_W(model.shape(), key.axis, key.k, term_angle(model, key, tau),
                 key.j);
}

namespace {

GateProgram empty_program(const HamiltonianModel& model) {
  GateProgram p;
  p.qubits = model.qubits();
  p.n = model.shape().n();
  for (Axis a : kAxes) p.unitaries.push_back(model.eigensystem(a).basis);
  return p;
}

void append_block(GateProgram& p, const HamiltonianModel& model, Axis axis,
                  int j, double tau, bool descending) {
  const int ref = axis_index(axis);
  p.gates.emplace_back(FourQubitUnitary{ref, true});
  const int n = model.shape().n();
  for (int i = 0; i < n; ++i) {
    const int k = descending ? n - i : i + 1;
    for (Gate& g : build_W_jk(model, TermKey{axis, j, k}, tau)) {
      p.gates.push_back(std::move(g));
    }
  }
  p.gates.emplace_back(FourQubitUnitary{ref, false});
}

// Appends the blocks of one half-step in forward or reversed order.
void append_sweep(GateProgram& p, const HamiltonianModel& model, double tau,
                  bool reversed, const CircuitOptions& options) {
  for (int ai = 0; ai < 3; ++ai) {
    const Axis axis = kAxes[reversed ? 2 - ai : ai];
    const AxisEigenSystem& sys = model.eigensystem(axis);
    bool open = false;
    for (int ji = 0; ji < kStateComponents; ++ji) {
      const int j = reversed ? kStateComponents - 1 - ji : ji;
      if (options.skip_zero_angles &&
          std::abs(sys.lambdas(j)) < kZeroAngleThreshold) {
        continue;
      }
      const std::size_t start = p.gates.size();
      append_block(p, model, axis, j, tau, reversed);
      if (options.merge_basis_changes && open) {
        // Drop the trailing V of the previous block and this block's V^dagger.
        p.gates.erase(p.gates.begin() + static_cast<std::ptrdiff_t>(start));
        p.gates.erase(p.gates.begin() + static_cast<std::ptrdiff_t>(start) - 1);
      }
      open = true;
    }
  }
}

}  // namespace

GateProgram build_script_W(const HamiltonianModel& model, Axis axis, int j,
                           double tau, bool descending) {
  if (j < 0 || j >= kStateComponents) {
    throw ParameterError("eigenindex 'j' must be in 0..15");
  }
  GateProgram p = empty_program(model);
  p.tau = tau;
  append_block(p, model, axis, j, tau, descending);
  return p;
}

GateProgram build_U1(const HamiltonianModel& model, double tau,
                     const CircuitOptions& options) {
  GateProgram p = empty_program(model);
  p.scheme = "u1";
  p.tau = tau;
  p.cnot_account = u1_step_cnot(model.shape().n());
  append_sweep(p, model, tau, false, options);
  return p;
}

GateProgram build_U2(const HamiltonianModel& model, double tau,
                     const CircuitOptions& options) {
  GateProgram p = empty_program(model);
  p.scheme = "u2";
  p.tau = tau;
  p.cnot_account = u2_step_cnot(model.shape().n());
  append_sweep(p, model, 0.5 * tau, false, options);
  append_sweep(p, model, 0.5 * tau, true, options);
  return p;
}

GateProgram build_step(const HamiltonianModel& model, Scheme scheme,
                       double tau, const CircuitOptions& options) {
  return scheme == Scheme::u1 ? build_U1(model, tau, options)
                              : build_U2(model, tau, options);
}

}  // namespace elastoq
