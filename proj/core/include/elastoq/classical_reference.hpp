#pragma once

#include <memory>
#include <string>

#include "elastoq/hamiltonian.hpp"

namespace elastoq {

/// L : C^{q_size} <- C^{r_size} and its adjoint, the off-diagonal block of
/// the anti-Hermitian generator K = [[0, L], [-L^*, 0]].
class CouplingOperator {
 public:
  virtual ~CouplingOperator() = default;
  virtual Index q_size() const = 0;
  virtual Index r_size() const = 0;
  virtual CVector apply_L(const CVector& r) const = 0;
  virtual CVector apply_L_adjoint(const CVector& q) const = 0;
};

/// L_h = sum_alpha rho^{-1/2} C^(alpha) S^{-1/2} (x) D^(alpha) on the
/// 9-component sector, matrix-free. Components are the slow index, so q and r
/// are the first 3N^3 and next 6N^3 entries of a sector vector.
class ElasticCoupling : public CouplingOperator {
 public:
  explicit ElasticCoupling(const HamiltonianModel& model);

  Index q_size() const override { return 3 * shape_.volume(); }
  Index r_size() const override { return 6 * shape_.volume(); }
  CVector apply_L(const CVector& r) const override;
  CVector apply_L_adjoint(const CVector& q) const override;

  const LatticeShape& shape() const { return shape_; }
  /// rho^{-1/2} C^(alpha) S^{-1/2}
  const Eigen::Matrix<double, 3, 6>& block(Axis a) const {
    return g_[axis_index(a)];
  }
  /// Multiply-adds per grid point of one apply_L and one apply_L_adjoint.
  std::int64_t madds_L() const;
  std::int64_t madds_L_adjoint() const;
  /// 3v/h with v = sqrt(||S^{-1}|| / rho).
  double norm_bound() const { return norm_bound_; }

 private:
  LatticeShape shape_;
  double norm_bound_;
  std::array<Eigen::Matrix<double, 3, 6>, 3> g_;
};

/// Explicit matrix L, for test doubles and small dense checks.
class DenseCoupling : public CouplingOperator {
 public:
  explicit DenseCoupling(CMatrix l) : l_(std::move(l)) {}
  Index q_size() const override { return l_.rows(); }
  Index r_size() const override { return l_.cols(); }
  CVector apply_L(const CVector& r) const override;
  CVector apply_L_adjoint(const CVector& q) const override;
  const CMatrix& matrix() const { return l_; }

 private:
  CMatrix l_;
};

struct PhysicalState {
  CVector q;
  CVector r;

  double norm() const { return std::sqrt(q.squaredNorm() + r.squaredNorm()); }
  CVector stacked() const;
  static PhysicalState from_stacked(const CVector& z, Index q_size);
};

/// Restriction of a quantum-frame vector (length 16 N^3) to the physical
/// sector, and the zero-padded embedding back.
PhysicalState sector_state(const HamiltonianModel& model, const CVector& psi);
CVector embed_sector(const HamiltonianModel& model, const PhysicalState& s);

/// One partitioned leapfrog step.
PhysicalState leapfrog_step(const CouplingOperator& op,
                            const PhysicalState& state, double tau);
PhysicalState leapfrog(const CouplingOperator& op, const PhysicalState& state,
                       double tau, std::int64_t steps);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
  std::string method;  ///< "dense-svd" or "power-iteration"
};

/// ||L||: dense SVD when the smaller side is at most `dense_cap`, else power
/// iteration on L^* L.
NormEstimate estimate_L_norm(const CouplingOperator& op,
                             double rel_tol = 1e-6, int max_iter = 500,
                             Index dense_cap = 1536);

/// (1 - eta^2/4)^{-1/2}
double c_eta(double eta);

/// M_sigma(tau), the leapfrog step on one singular pair.
Eigen::Matrix2d m_sigma(double sigma, double tau);

class LeapfrogConfig {
 public:
  /// Requires 0 < eta < 2, tau > 0, T > 0 and tau ||L|| <= eta.
  LeapfrogConfig(double tau, double eta, double T, double norm_L);

  double tau() const { return tau_; }
  double eta() const { return eta_; }
  double T() const { return T_; }
  double norm_L() const { return norm_L_; }
  /// T / tau rounded, when it is an integer to 1e-9.
  std::int64_t steps() const;

 private:
  double tau_, eta_, T_, norm_L_;
};

struct Certificate {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  ///< bound - measured
  bool holds = false;
  std::string method;  ///< dense | krylov | probe
};

/// Singular values of L, from the Gram matrix on the smaller side.
Eigen::VectorXd singular_values_L(const CouplingOperator& op,
                                  Index dense_cap = 1536);

/// trajectory: ||Psi^m P|| for an orthonormal probe set P (the full basis when
/// small, otherwise 32 random vectors).
/// singular: max over the singular values of L of ||M_sigma^m||, which equals
/// ||Psi^m|| exactly; needs the dense Gram matrix.
enum class PowerMethod { trajectory, singular };

/// Max over m <= m_max of the step-power norm, against C_eta + 1e-8.
Certificate power_bound_certificate(const CouplingOperator& op,
                                    const LeapfrogConfig& config,
                                    std::int64_t m_max,
                                    PowerMethod method = PowerMethod::trajectory);

/// ||exp(tau K) - Psi_tau|| (dense) against tau^3 ||L||^3 / 2.
Certificate local_error_certificate(const CouplingOperator& op, double tau,
                                    double norm_L);

/// ||exp(T K) - Psi_tau^M|| against (C_eta/2) T tau^2 ||L||^3.
Certificate global_error_certificate(const CouplingOperator& op,
                                     const LeapfrogConfig& config);

inline constexpr Index kClassicalDenseCap = 1024;

/// Dense K = [[0, L], [-L^*, 0]].
CMatrix dense_generator(const CouplingOperator& op, Index cap = 4096);
/// Dense one-step matrix Psi_tau.
CMatrix dense_leapfrog_matrix(const CouplingOperator& op, double tau,
                              Index cap = 4096);
/// exp(T K) z: dense matrix exponential up to dimension 4096, Krylov above.
CVector exact_classical_flow(const CouplingOperator& op, double T,
                             const CVector& z, double norm_bound);

struct ClassicalCost {
  double T = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  double norm_L = 0.0;
  double norm_L_bound = 0.0;  ///< 3v/h
  double tau_stability = 0.0;  ///< eta / ||L||
  double tau_accuracy = 0.0;   ///< sqrt(2 eps / (C_eta T ||L||^3))
  double tau_max = 0.0;
  bool stability_limited = false;
  std::int64_t m_cl = 0;
  std::int64_t madds_per_point = 0;
  Index grid_points = 0;
  double arithmetic_ops = 0.0;  ///< m_cl * madds_per_point * N^3
  Index memory_complex = 0;     ///< 9 N^3
};

ClassicalCost cost_model(const ElasticCoupling& op, double norm_L, double T,
                         double epsilon, double eta);

std::string to_record(const Certificate& c);
std::string to_record(const ClassicalCost& c);

}  // namespace elastoq
