#pragma once

#include <string>

#include "elastoq/circuit_builder.hpp"
#include "elastoq/hamiltonian.hpp"

namespace elastoq {

struct DefectEstimate {
  double value = 0.0;
  /// False for the random-probe lower bound used above dimension 4096.
  bool exact = true;
  std::string method;  ///< "svd" or "probe-lower-bound"
};

/// ||A|| as sqrt(lambda_max(A^dagger A)).
double spectral_norm(const CMatrix& a);

/// ||U(tau) - exp(-i H tau)|| for one step of the scheme. Exact for dimension
/// <= 4096, otherwise the maximum of ||(U - e^{-iH tau}) v|| over 32 random
/// unit vectors (seeded), reported as a lower bound.
DefectEstimate empirical_trotter_error(const HamiltonianModel& model,
                                       double tau, Scheme scheme,
                                       std::uint64_t seed = 7);

}  // namespace elastoq
