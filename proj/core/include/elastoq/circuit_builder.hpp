#pragma once

#include "elastoq/gate_program.hpp"
#include "elastoq/hamiltonian.hpp"

namespace elastoq {

/// Product-formula scheme for one Trotter step.
enum class Scheme { u1, u2 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

inline constexpr double kZeroAngleThreshold = 1e-13;

struct CircuitOptions {
  /// Drop (axis, j) blocks whose eigenvalue is below kZeroAngleThreshold.
  bool skip_zero_angles = true;
  /// Omit the V V^dagger pair between consecutive blocks of one axis.
  bool merge_basis_changes = false;
};

/// Qubit number (1-based, most significant first) of ladder level k on an axis.
int ladder_qubit(const LatticeShape& shape, Axis axis, int k);

/// Gates realising exp(theta S_k) on the axis block, with theta = lambda_j
/// tau / 2h. With `pattern` >= 0 the rotation is also controlled on the state
/// register holding that pattern; with -1 it is controlled on the ladder only.
std::vector<Gate> build_W(const LatticeShape& shape, Axis axis, int k,
                          double theta, int pattern = -1);

/// W_jk for a term of the model, pattern-controlled on j.
std::vector<Gate> build_W_jk(const HamiltonianModel& model, const TermKey& key,
                             double tau);

/// V^dagger, then W_j1 .. W_jn (or W_jn .. W_j1 when `descending`), then V.
GateProgram build_script_W(const HamiltonianModel& model, Axis axis, int j,
                           double tau, bool descending = false);

GateProgram build_U1(const HamiltonianModel& model, double tau,
                     const CircuitOptions& options = {});
GateProgram build_U2(const HamiltonianModel& model, double tau,
                     const CircuitOptions& options = {});
GateProgram build_step(const HamiltonianModel& model, Scheme scheme,
                       double tau, const CircuitOptions& options = {});

}  // namespace elastoq
