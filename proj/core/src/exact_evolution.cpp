#include "elastoq/exact_evolution.hpp"

namespace elastoq {

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::dense:
      return "dense";
    case OracleKind::krylov:
      return "krylov";
    case OracleKind::automatic:
      return "auto";
  }
  return "auto";
}

OracleKind oracle_from_string(const std::string& name) {
  if (name == "dense") return OracleKind::dense;
  if (name == "krylov") return OracleKind::krylov;
  if (name == "auto") return OracleKind::automatic;
  throw ParameterError("unknown oracle '" + name +
                       "' (expected dense, krylov or auto)");
}

ExactPropagator::ExactPropagator(const HamiltonianModel& model)
    : dim_(model.dimension()),
      sector_(kPhysicalComponents * model.shape().volume()) {
  if (dim_ > kDenseDimensionCap) {
    throw CapacityError("dense propagator capped at dimension " +
                        std::to_string(kDenseDimensionCap) + " (model has " +
                        std::to_string(dim_) + ")");
  }
  const CMatrix h = materialize_sparse_H(model).toDense()
                        .topLeftCorner(sector_, sector_);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw Error("eigensolver failed on the Hamiltonian");
  }
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

CVector ExactPropagator::apply(double t, const CVector& psi) const {
  if (psi.size() != dim_) {
    throw ShapeError("ExactPropagator: expected vector length " +
                     std::to_string(dim_));
  }
  CVector out = psi;
  CVector c = evecs_.adjoint() * psi.head(sector_);
  for (Index i = 0; i < c.size(); ++i) {
    c(i) *= std::exp(cplx(0.0, -evals_(i) * t));
  }
  out.head(sector_) = evecs_ * c;
  return out;
}

CMatrix ExactPropagator::matrix(double t) const {
  CMatrix u = CMatrix::Identity(dim_, dim_);
  CVector phase(evals_.size());
  for (Index i = 0; i < phase.size(); ++i) {
    phase(i) = std::exp(cplx(0.0, -evals_(i) * t));
  }
  u.topLeftCorner(sector_, sector_) =
      evecs_ * phase.asDiagonal() * evecs_.adjoint();
  return u;
}

OracleKind resolve_oracle(const HamiltonianModel& model, OracleKind requested) {
  if (requested != OracleKind::automatic) return requested;
  return model.dimension() <= kDenseDimensionCap ? OracleKind::dense
                                                 : OracleKind::krylov;
}

ExactResult exact_evolve(const HamiltonianModel& model, double T,
                         const CVector& psi, OracleKind oracle,
                         const KrylovOptions& options) {
  if (psi.size() != model.dimension()) {
    throw ShapeError("exact_evolve: expected vector length " +
                     std::to_string(model.dimension()) + ", got " +
                     std::to_string(psi.size()));
  }
  ExactResult r;
  r.method = resolve_oracle(model, oracle);
  if (r.method == OracleKind::dense) {
    r.state = ExactPropagator(model).apply(T, psi);
    return r;
  }
  KrylovReport rep;
  r.state = krylov_expm_apply(
      [&model](const CVector& v) { return apply_H(model, v); },
      hamiltonian_norm_bound(model), T, psi, options, &rep);
  r.residual = rep.residual;
  r.substeps = rep.substeps;
  return r;
}

}  // namespace elastoq
