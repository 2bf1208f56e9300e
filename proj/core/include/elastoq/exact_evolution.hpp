#pragma once

#include <string>

#include "elastoq/hamiltonian.hpp"
#include "elastoq/krylov.hpp"

namespace elastoq {

enum class OracleKind { dense, krylov, automatic };

std::string to_string(OracleKind kind);
/// "dense", "krylov" or "auto".
OracleKind oracle_from_string(const std::string& name);

/// Largest full dimension evaluated densely.
inline constexpr Index kDenseDimensionCap = 4096;

/// exp(-i H t) from a Hermitian eigendecomposition of H on the 9-component
/// sector; the padding sector is left unchanged.
class ExactPropagator {
 public:
  explicit ExactPropagator(const HamiltonianModel& model);

  Index dimension() const { return dim_; }
  CVector apply(double t, const CVector& psi) const;
  /// Full dimension x dimension matrix.
  CMatrix matrix(double t) const;
  const RVector& eigenvalues() const { return evals_; }

 private:
  Index dim_;
  Index sector_;
  RVector evals_;
  CMatrix evecs_;
};

struct ExactResult {
  CVector state;
  OracleKind method = OracleKind::dense;
  double residual = 0.0;  ///< Krylov error estimate, 0 for dense
  int substeps = 0;
};

/// Resolves `automatic` to dense when dimension <= 4096.
OracleKind resolve_oracle(const HamiltonianModel& model, OracleKind requested);

ExactResult exact_evolve(const HamiltonianModel& model, double T,
                         const CVector& psi,
                         OracleKind oracle = OracleKind::automatic,
                         const KrylovOptions& options = {});

}  // namespace elastoq
