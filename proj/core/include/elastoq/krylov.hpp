#pragma once

#include <functional>

#include "elastoq/common.hpp"

namespace elastoq {

/// y = H x for a Hermitian H.
using HermitianOperator = std::function<CVector(const CVector&)>;

struct KrylovOptions {
  int subspace = 30;
  /// Substeps are sized so that norm_bound * dt stays below this.
  double max_phase = 10.0;
  double tolerance = 1e-10;
  int max_halvings = 30;
};

struct KrylovReport {
  int substeps = 0;
  int matvecs = 0;
  double residual = 0.0;  ///< accumulated a-posteriori error estimate
};

/// exp(-i H t) v by Lanczos with adaptive substeps. `norm_bound` is any
/// upper bound on ||H||. Throws ConvergenceError when a substep cannot
/// reach the tolerance.
CVector krylov_expm_apply(const HermitianOperator& op, double norm_bound,
                          double t, const CVector& v,
                          const KrylovOptions& options = {},
                          KrylovReport* report = nullptr);

}  // namespace elastoq
