#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "elastoq/common.hpp"
#include "elastoq/elastic_media.hpp"
#include "elastoq/lattice_ops.hpp"

namespace elastoq {

/// Identifies H_jk^(alpha) = P_j^(alpha) (x) (i lambda_j / 2h) S_k^(alpha).
struct TermKey {
  Axis axis = Axis::x;
  int j = 0;  ///< eigenindex 0..15
  int k = 1;  ///< ladder level 1..n

  friend bool operator==(const TermKey&, const TermKey&) = default;
};

/// H = i B^{-1/2} A B^{-1/2} on 3n+4 qubits: a 4-qubit state register (most
/// significant) followed by x, y and z blocks of n qubits each.
class HamiltonianModel {
 public:
  HamiltonianModel(const LatticeShape& shape, const MaterialParams& params);
  /// Uses caller-supplied eigensystems, e.g. with a rotated degenerate basis.
  HamiltonianModel(const LatticeShape& shape, const CellMatrices& cell,
                   const std::array<AxisEigenSystem, 3>& eigensystems);

  const LatticeShape& shape() const { return shape_; }
  const MaterialParams& params() const { return cell_.params; }
  const CellMatrices& cell() const { return cell_; }
  const AxisEigenSystem& eigensystem(Axis a) const {
    return eigen_[axis_index(a)];
  }
  const Matrix16& coupling(Axis a) const { return coupling_[axis_index(a)]; }

  int qubits() const { return 3 * shape_.n() + kStateQubits; }
  Index dimension() const { return kStateComponents * shape_.volume(); }
  int term_count() const { return 48 * shape_.n(); }
  /// ||S_comp^{-1}|| from the closed form.
  double compliance_inverse_norm() const;

  /// All 48n keys in product order: axis, then j, then k ascending. The first
  /// key is the rightmost factor of U1, i.e. the first one applied.
  std::vector<TermKey> terms() const;

 private:
  LatticeShape shape_;
  CellMatrices cell_;
  std::array<AxisEigenSystem, 3> eigen_;
  std::array<Matrix16, 3> coupling_;
};

using CSparse = Eigen::SparseMatrix<cplx>;

/// H v, matrix-free.
CVector apply_H(const HamiltonianModel& model, const CVector& v);

/// Sparse H assembled from the ladder terms, independent of apply_H.
CSparse materialize_sparse_H(const HamiltonianModel& model,
                             int max_n = kDefaultMaterializeCap);

/// Sparse H_jk^(alpha).
CSparse materialize_term(const HamiltonianModel& model, const TermKey& key,
                         int max_n = kDefaultMaterializeCap);

/// lambda_j tau / 2h
double term_angle(const HamiltonianModel& model, const TermKey& key,
                  double tau);

// -- One-step Trotter error bounds ------------------------------------------

/// (81 tau^2 / 2h^2) rho^{-1} ||S^{-1}|| n^2
double bound_first_order_norm(const HamiltonianModel& model, double tau);

/// (9 tau^2 / 4h^2) rho^{-1} ||S^{-1}|| (5n - 1)
double bound_first_order_commutator(const HamiltonianModel& model, double tau);

struct SecondOrderBound {
  double bound = 0.0;
  bool applicable = true;
};

/// 2 (1440 n tau rho^{-1/2} ||S^{-1/2}|| / h)^3, applicable while the cube
/// itself is at most 1.
SecondOrderBound bound_second_order(const HamiltonianModel& model, double tau);

/// Upper bound on ||H||: (3/h) rho^{-1/2} ||S^{-1/2}||.
double hamiltonian_norm_bound(const HamiltonianModel& model);

// -- CNOT accounting ---------------------------------------------------------

enum class BoundKind { first_norm, first_commutator, second };

std::string to_string(BoundKind kind);
BoundKind bound_kind_from_string(const std::string& name);

/// Basis change V or V^dagger on four qubits.
inline constexpr std::int64_t kBasisChangeCnot = 63;

/// CNOTs of the two ladders around level k: 2(k-1).
std::int64_t cnot_ladder(int k);
/// CNOTs of the rotation with k+3 controls: 16(k+3) - 40 + 3.
std::int64_t cnot_controlled_rz(int k);
/// 432 n^2 + 378
std::int64_t u1_step_cnot(int n);
/// 2 (432 n^2 + 378)
std::int64_t u2_step_cnot(int n);
/// Per-gate sum of ladder, rotation and basis-change costs over one U1 step.
std::int64_t u1_itemized_cnot(int n);
inline int qubit_count(int n) { return 3 * n + kStateQubits; }

struct ErrorBudget {
  BoundKind kind = BoundKind::first_commutator;
  int n = 1;
  double h = 1.0;
  double T = 1.0;
  double epsilon = 1.0;
  double rho = 1.0;
  double E = 1.0;
  double nu = 0.0;
  double C = 0.0;  ///< one-step error constant, ||U - e^{-iH tau}|| <= C tau^p
  int p = 2;
  /// Whether the bound's validity condition holds at tau = T / m.
  bool applicable = true;
  double m_exact = 0.0;  ///< (C T^p / eps)^{1/(p-1)} before rounding
  std::int64_t m = 0;
  int qubits = 0;
  std::int64_t per_step_cnot = 0;
  std::int64_t itemized_step_cnot = 0;
  std::int64_t total_cnot = 0;
  double closed_form_cnot = 0.0;   ///< closed-form global count without ceiling
  double ceiling_slack = 0.0;  ///< (m - m_exact) * per_step_cnot
};

ErrorBudget steps_and_cost(const HamiltonianModel& model, double T,
                           double epsilon, BoundKind kind);

/// Flat `key=value` lines.
std::string to_record(const ErrorBudget& budget);

}  // namespace elastoq
