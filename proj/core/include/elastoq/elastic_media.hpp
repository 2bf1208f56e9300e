#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "elastoq/common.hpp"

namespace elastoq {

/// Homogeneous isotropic medium: mass density, Young's modulus, Poisson ratio.
class MaterialParams {
 public:
  /// Throws ParameterError naming the offending field unless
  /// rho > 0, E > 0 and -1 < nu < 1/2.
  MaterialParams(double rho, double youngs_modulus, double poisson_ratio);

  double rho() const { return rho_; }
  double E() const { return E_; }
  double nu() const { return nu_; }

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;

 private:
  double rho_;
  double E_;
  double nu_;
};

/// 6x6 Voigt compliance (order xx, yy, zz, xy, xz, yz).
Matrix6 build_compliance(const MaterialParams& params);

/// Closed-form operator norm of the inverse compliance:
/// E/(1-2nu) for nu >= 0, E/(1+nu) otherwise.
double compliance_inverse_norm(const MaterialParams& params);

/// The 3x6 selection matrix coupling velocities to stresses along one axis.
Eigen::Matrix<double, 3, 6> coupling_selection(Axis axis);

/// Spatially constant 16x16 blocks of the discretised operator.
struct CellMatrices {
  MaterialParams params;
  std::array<Matrix16, 3> a_axis;  ///< A^(alpha), zero-padded past index 8
  Matrix16 b_cell;
  Matrix16 b_sqrt;
  Matrix16 b_inv_sqrt;

  /// B^{-1/2} A^(alpha) B^{-1/2}; real symmetric.
  Matrix16 coupling(Axis axis) const;
};

CellMatrices build_cell_matrices(const MaterialParams& params);

/// Eigenpairs of B^{-1/2} A^(alpha) B^{-1/2}.
///
/// Eigenvalues are ascending; ties keep the eigensolver's order. Vectors in a
/// degenerate cluster are orthonormalised and each column is phased so its
/// largest-magnitude entry is real and positive.
struct AxisEigenSystem {
  Axis axis = Axis::x;
  Vector16 lambdas;
  Matrix16c basis;  ///< column j is |phi_j>; this is V^(alpha)

  /// |phi_j><phi_j|
  Matrix16c projector(int j) const;
  /// Contiguous index ranges [first, last) of eigenvalues closer than the
  /// clustering threshold.
  std::vector<std::pair<int, int>> clusters() const;
};

inline constexpr double kDegeneracyThreshold = 1e-9;

AxisEigenSystem eigendecompose_axis(const CellMatrices& cell, Axis axis);

/// Same eigenspaces, but with a random unitary basis inside every degenerate
/// cluster. Used to check that circuits depend only on the projectors.
AxisEigenSystem with_random_cluster_basis(const AxisEigenSystem& sys,
                                          std::uint64_t seed);

/// Sum of singular values.
double trace_norm(const Eigen::Ref<const CMatrix>& m);
/// Largest singular value.
double operator_norm(const Eigen::Ref<const CMatrix>& m);

}  // namespace elastoq
