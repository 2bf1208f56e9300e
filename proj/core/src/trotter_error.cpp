#include "elastoq/trotter_error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "elastoq/exact_evolution.hpp"
#include "elastoq/simulator.hpp"

namespace elastoq {

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const CMatrix g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

DefectEstimate empirical_trotter_error(const HamiltonianModel& model,
                                       double tau, Scheme scheme,
                                       std::uint64_t seed) {
  DefectEstimate d;
  if (tau == 0.0) {
    d.method = "svd";
    return d;
  }
  const Index dim = model.dimension();
  auto step = [&](const CVector& v) {
    CVector w = v;
    apply_block_fast_in_place(model, scheme, tau, w);
    return w;
  };
  if (dim <= kDenseDimensionCap) {
    const ExactPropagator prop(model);
    const CMatrix diff = dense_matrix(dim, step) - prop.matrix(tau);
    d.value = spectral_norm(diff);
    d.method = "svd";
    return d;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  d.exact = false;
  d.method = "probe-lower-bound";
  for (int probe = 0; probe < 32; ++probe) {
    CVector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = cplx(gauss(rng), gauss(rng));
    v.normalize();
    const CVector exact = exact_evolve(model, tau, v, OracleKind::krylov).state;
    d.value = std::max(d.value, (step(v) - exact).norm());
  }
  return d;
}

}  // namespace elastoq
