#pragma once

#include <functional>

#include "elastoq/circuit_builder.hpp"
#include "elastoq/gate_program.hpp"
#include "elastoq/hamiltonian.hpp"

namespace elastoq {

/// Dense amplitudes over `qubits` qubits; index bit (qubits - q) is qubit q.
class StateVector {
 public:
  explicit StateVector(int qubits);
  StateVector(int qubits, CVector amplitudes);

  /// |index>
  static StateVector basis(int qubits, Index index);

  int qubits() const { return qubits_; }
  Index dimension() const { return amps_.size(); }
  const CVector& amplitudes() const { return amps_; }
  CVector& amplitudes() { return amps_; }
  double norm() const { return amps_.norm(); }

 private:
  int qubits_;
  CVector amps_;
};

/// Checks qubit ranges, per-gate disjointness, unitary references and
/// unitarity of payloads (tolerance 1e-10).
void validate_program(const GateProgram& program);

/// Applies the gates in order. Validates first.
StateVector simulate(const GateProgram& program, const StateVector& psi);
/// In place, without validation.
void simulate_in_place(const GateProgram& program, CVector& amplitudes);

/// The same map as build_step applied structurally: per axis rotate the state
/// register by V^dagger, apply exp(theta_j S_k) to each component slice, and
/// rotate back.
StateVector apply_block_fast(const HamiltonianModel& model, Scheme scheme,
                             double tau, const StateVector& psi);
void apply_block_fast_in_place(const HamiltonianModel& model, Scheme scheme,
                               double tau, CVector& amplitudes);

/// Dense matrix of a linear map given column by column (dimension <= 4096).
CMatrix dense_matrix(Index dim, const std::function<CVector(const CVector&)>& f);

}  // namespace elastoq
