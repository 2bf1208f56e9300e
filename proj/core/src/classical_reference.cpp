#include "elastoq/classical_reference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "elastoq/krylov.hpp"
#include "elastoq/trotter_error.hpp"

namespace elastoq {

namespace {

std::span<const cplx> cslice(const CVector& v, Index c, Index vol) {
  return {v.data() + c * vol, static_cast<std::size_t>(vol)};
}

void require_size(const CVector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + ": expected vector length " +
                     std::to_string(expected) + ", got " +
                     std::to_string(v.size()));
  }
}

}  // namespace

ElasticCoupling::ElasticCoupling(const HamiltonianModel& model)
    : shape_(model.shape()), norm_bound_(hamiltonian_norm_bound(model)) {
  const MaterialParams& p = model.params();
  Eigen::SelfAdjointEigenSolver<Matrix6> es(build_compliance(p));
  const Matrix6 s_inv_sqrt = es.eigenvectors() *
                             es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().transpose();
  for (Axis a : kAxes) {
    g_[axis_index(a)] = coupling_selection(a) * s_inv_sqrt / std::sqrt(p.rho());
  }
}

CVector ElasticCoupling::apply_L(const CVector& r) const {
  require_size(r, r_size(), "apply_L");
  const Index vol = shape_.volume();
  CVector q = CVector::Zero(q_size());
  CVector tmp(vol);
  const cplx scale = 1.0 / (2.0 * shape_.h());
  for (Axis a : kAxes) {
    const auto& g = g_[axis_index(a)];
    for (int d = 0; d < 6; ++d) {
      if (g.col(d).isZero(0.0)) continue;
      tmp.setZero();
      kernels::difference_accumulate(shape_.n(), shape_.axis_bit_offset(a),
                                     cslice(r, d, vol),
                                     {tmp.data(), static_cast<std::size_t>(vol)},
                                     scale);
      for (int c = 0; c < 3; ++c) {
        if (g(c, d) != 0.0) q.segment(c * vol, vol) += g(c, d) * tmp;
      }
    }
  }
  return q;
}

CVector ElasticCoupling::apply_L_adjoint(const CVector& q) const {
  require_size(q, q_size(), "apply_L_adjoint");
  const Index vol = shape_.volume();
  CVector r = CVector::Zero(r_size());
  CVector tmp(vol);
  // D is real antisymmetric, so (G (x) D)^* = -G^T (x) D.
  const cplx scale = -1.0 / (2.0 * shape_.h());
  for (Axis a : kAxes) {
    const auto& g = g_[axis_index(a)];
    for (int c = 0; c < 3; ++c) {
      if (g.row(c).isZero(0.0)) continue;
      tmp.setZero();
      kernels::difference_accumulate(shape_.n(), shape_.axis_bit_offset(a),
                                     cslice(q, c, vol),
                                     {tmp.data(), static_cast<std::size_t>(vol)},
                                     scale);
      for (int d = 0; d < 6; ++d) {
        if (g(c, d) != 0.0) r.segment(d * vol, vol) += g(c, d) * tmp;
      }
    }
  }
  return r;
}

std::int64_t ElasticCoupling::madds_L() const {
  std::int64_t m = 0;
  for (const auto& g : g_) {
    for (int d = 0; d < 6; ++d) {
      if (!g.col(d).isZero(0.0)) ++m;
    }
    m += (g.array() != 0.0).count();
  }
  return m;
}

std::int64_t ElasticCoupling::madds_L_adjoint() const {
  std::int64_t m = 0;
  for (const auto& g : g_) {
    for (int c = 0; c < 3; ++c) {
      if (!g.row(c).isZero(0.0)) ++m;
    }
    m += (g.array() != 0.0).count();
  }
  return m;
}

CVector DenseCoupling::apply_L(const CVector& r) const {
  require_size(r, r_size(), "apply_L");
  return l_ * r;
}

CVector DenseCoupling::apply_L_adjoint(const CVector& q) const {
  require_size(q, q_size(), "apply_L_adjoint");
  return l_.adjoint() * q;
}

CVector PhysicalState::stacked() const {
  CVector z(q.size() + r.size());
  z << q, r;
  return z;
}

PhysicalState PhysicalState::from_stacked(const CVector& z, Index q_size) {
  return {z.head(q_size), z.tail(z.size() - q_size)};
}

PhysicalState sector_state(const HamiltonianModel& model, const CVector& psi) {
  require_size(psi, model.dimension(), "sector_state");
  const Index vol = model.shape().volume();
  return {psi.head(3 * vol), psi.segment(3 * vol, 6 * vol)};
}

CVector embed_sector(const HamiltonianModel& model, const PhysicalState& s) {
  const Index vol = model.shape().volume();
  require_size(s.q, 3 * vol, "embed_sector");
  require_size(s.r, 6 * vol, "embed_sector");
  CVector psi = CVector::Zero(model.dimension());
  psi.head(3 * vol) = s.q;
  psi.segment(3 * vol, 6 * vol) = s.r;
  return psi;
}

PhysicalState leapfrog_step(const CouplingOperator& op,
                            const PhysicalState& state, double tau) {
  PhysicalState s = state;
  s.q += (0.5 * tau) * op.apply_L(s.r);
  s.r -= tau * op.apply_L_adjoint(s.q);
  s.q += (0.5 * tau) * op.apply_L(s.r);
  return s;
}

PhysicalState leapfrog(const CouplingOperator& op, const PhysicalState& state,
                       double tau, std::int64_t steps) {
  PhysicalState s = state;
  for (std::int64_t m = 0; m < steps; ++m) s = leapfrog_step(op, s, tau);
  return s;
}

namespace {

// Eigenvalues of the Gram matrix on the smaller side of L.
Eigen::VectorXd gram_eigenvalues(const CouplingOperator& op) {
  const Index small = std::min(op.q_size(), op.r_size());
  CMatrix gram(small, small);
  CVector e = CVector::Zero(small);
  for (Index c = 0; c < small; ++c) {
    e(c) = 1.0;
    gram.col(c) = op.q_size() <= op.r_size()
                      ? op.apply_L(op.apply_L_adjoint(e))
                      : op.apply_L_adjoint(op.apply_L(e));
    e(c) = 0.0;
  }
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

Eigen::VectorXd singular_values_L(const CouplingOperator& op, Index dense_cap) {
  if (std::min(op.q_size(), op.r_size()) > dense_cap) {
    throw CapacityError("singular values of L capped at smaller side " +
                        std::to_string(dense_cap));
  }
  return gram_eigenvalues(op).cwiseMax(0.0).cwiseSqrt();
}

NormEstimate estimate_L_norm(const CouplingOperator& op, double rel_tol,
                             int max_iter, Index dense_cap) {
  NormEstimate est;
  if (std::min(op.q_size(), op.r_size()) <= dense_cap) {
    est.value = std::sqrt(std::max(0.0, gram_eigenvalues(op).maxCoeff()));
    est.method = "dense-svd";
    return est;
  }
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  CVector v(op.r_size());
  for (Index i = 0; i < v.size(); ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v.normalize();
  double lambda = 0.0;
  est.converged = false;
  est.method = "power-iteration";
  for (int it = 1; it <= max_iter; ++it) {
    CVector w = op.apply_L_adjoint(op.apply_L(v));
    const double next = v.dot(w).real();
    const double wn = w.norm();
    est.iterations = it;
    if (wn == 0.0) {
      lambda = 0.0;
      est.converged = true;
      break;
    }
    v = w / wn;
    if (it > 1 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      est.converged = true;
      break;
    }
    lambda = next;
  }
  est.value = std::sqrt(std::max(0.0, lambda));
  return est;
}

double c_eta(double eta) {
  if (!(eta >= 0.0 && eta < 2.0)) {
    throw ParameterError("stability margin 'eta' must be in [0, 2)");
  }
  return 1.0 / std::sqrt(1.0 - eta * eta / 4.0);
}

Eigen::Matrix2d m_sigma(double sigma, double tau) {
  const double x = tau * sigma;
  Eigen::Matrix2d m;
  m << 1.0 - x * x / 2.0, x * (1.0 - x * x / 4.0), -x, 1.0 - x * x / 2.0;
  return m;
}

LeapfrogConfig::LeapfrogConfig(double tau, double eta, double T, double norm_L)
    : tau_(tau), eta_(eta), T_(T), norm_L_(norm_L) {
  if (!(tau > 0.0)) throw ParameterError("leapfrog 'tau' must be > 0");
  if (!(eta > 0.0 && eta < 2.0)) {
    throw ParameterError("leapfrog 'eta' must be in (0, 2)");
  }
  if (!(T > 0.0)) throw ParameterError("leapfrog 'T' must be > 0");
  if (!(norm_L >= 0.0)) throw ParameterError("'norm_L' must be >= 0");
  if (tau * norm_L > eta * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "leapfrog stability violated: tau*||L|| = " << tau * norm_L
       << " exceeds eta = " << eta;
    throw ParameterError(os.str());
  }
}

std::int64_t LeapfrogConfig::steps() const {
  const double m = T_ / tau_;
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-9 * std::max(1.0, r)) {
    throw ParameterError("leapfrog 'tau' must divide 'T' into whole steps");
  }
  return static_cast<std::int64_t>(r);
}

CMatrix dense_generator(const CouplingOperator& op, Index cap) {
  const Index nq = op.q_size();
  const Index dim = nq + op.r_size();
  if (dim > cap) {
    throw CapacityError("dense generator capped at dimension " +
                        std::to_string(cap));
  }
  CMatrix k = CMatrix::Zero(dim, dim);
  CVector e;
  for (Index c = 0; c < op.r_size(); ++c) {
    e = CVector::Unit(op.r_size(), c);
    k.block(0, nq + c, nq, 1) = op.apply_L(e);
  }
  for (Index c = 0; c < nq; ++c) {
    e = CVector::Unit(nq, c);
    k.block(nq, c, op.r_size(), 1) = -op.apply_L_adjoint(e);
  }
  return k;
}

CMatrix dense_leapfrog_matrix(const CouplingOperator& op, double tau,
                              Index cap) {
  const Index nq = op.q_size();
  const Index dim = nq + op.r_size();
  if (dim > cap) {
    throw CapacityError("dense leapfrog matrix capped at dimension " +
                        std::to_string(cap));
  }
  CMatrix m(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    const PhysicalState s =
        PhysicalState::from_stacked(CVector::Unit(dim, c), nq);
    m.col(c) = leapfrog_step(op, s, tau).stacked();
  }
  return m;
}

CVector exact_classical_flow(const CouplingOperator& op, double T,
                             const CVector& z, double norm_bound) {
  const Index dim = op.q_size() + op.r_size();
  require_size(z, dim, "exact_classical_flow");
  if (dim <= kClassicalDenseCap) {
    const CMatrix k = dense_generator(op) * cplx(T);
    return k.exp() * z;
  }
  const Index nq = op.q_size();
  // exp(T K) = exp(-i (iK) T) with iK Hermitian.
  HermitianOperator ik = [&op, nq](const CVector& v) {
    const PhysicalState s = PhysicalState::from_stacked(v, nq);
    PhysicalState out{op.apply_L(s.r), -op.apply_L_adjoint(s.q)};
    return CVector(cplx(0.0, 1.0) * out.stacked());
  };
  return krylov_expm_apply(ik, norm_bound, T, z);
}

namespace {

Certificate finish(std::string name, double measured, double bound,
                   std::string method) {
  Certificate c;
  c.name = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.margin = bound - measured;
  c.holds = measured <= bound;
  c.method = std::move(method);
  return c;
}

// Orthonormal probes: the full basis for small dimension, else 32 seeded
// random columns.
CMatrix probe_set(Index dim, std::uint64_t seed) {
  if (dim <= 1024) return CMatrix::Identity(dim, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CMatrix g(dim, 32);
  for (Index i = 0; i < g.size(); ++i) g(i) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(dim, 32);
}

}  // namespace

Certificate power_bound_certificate(const CouplingOperator& op,
                                    const LeapfrogConfig& config,
                                    std::int64_t m_max, PowerMethod method) {
  const double bound = c_eta(config.eta()) + 1e-8;
  if (method == PowerMethod::singular) {
    Eigen::VectorXd sv = singular_values_L(op);
    std::sort(sv.begin(), sv.end());
    double growth = 1.0;
    double last = -1.0;
    for (double sigma : sv) {
      if (sigma - last <= 1e-13 * std::max(1.0, sigma)) continue;
      last = sigma;
      const Eigen::Matrix2d step = m_sigma(sigma, config.tau());
      Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
      for (std::int64_t m = 1; m <= m_max; ++m) {
        power = (step * power).eval();
        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(power);
        growth = std::max(growth, svd.singularValues()(0));
      }
    }
    return finish("power-bound", growth, bound, "singular");
  }
  const Index nq = op.q_size();
  const Index dim = nq + op.r_size();
  CMatrix p = probe_set(dim, 99);
  const bool full = p.cols() == dim;
  double growth = 1.0;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    for (Index c = 0; c < p.cols(); ++c) {
      p.col(c) = leapfrog_step(op, PhysicalState::from_stacked(p.col(c), nq),
                               config.tau())
                     .stacked();
    }
    growth = std::max(growth, spectral_norm(p));
  }
  return finish("power-bound", growth, bound, full ? "dense" : "probe");
}

Certificate local_error_certificate(const CouplingOperator& op, double tau,
                                    double norm_L) {
  if (tau * norm_L > 1.0 + 1e-12) {
    throw ParameterError("local error certificate requires tau*||L|| <= 1");
  }
  const CMatrix k = dense_generator(op) * cplx(tau);
  const CMatrix diff = CMatrix(k.exp()) - dense_leapfrog_matrix(op, tau);
  return finish("local-error", spectral_norm(diff),
                0.5 * std::pow(tau * norm_L, 3), "dense");
}

Certificate global_error_certificate(const CouplingOperator& op,
                                     const LeapfrogConfig& config) {
  const double tl = config.tau() * config.norm_L();
  if (tl > std::min(1.0, config.eta()) * (1.0 + 1e-12)) {
    throw ParameterError(
        "global error certificate requires tau*||L|| <= min(1, eta)");
  }
  const std::int64_t steps = config.steps();
  const double bound = 0.5 * c_eta(config.eta()) * config.T() * config.tau() *
                       config.tau() * std::pow(config.norm_L(), 3);
  const Index nq = op.q_size();
  const Index dim = nq + op.r_size();
  if (dim <= kClassicalDenseCap) {
    const CMatrix exact = CMatrix(dense_generator(op) * cplx(config.T())).exp();
    const CMatrix step = dense_leapfrog_matrix(op, config.tau());
    CMatrix power = CMatrix::Identity(dim, dim);
    for (std::int64_t m = 0; m < steps; ++m) power = (step * power).eval();
    return finish("global-error", spectral_norm(exact - power), bound, "dense");
  }
  const CMatrix p = probe_set(dim, 101);
  double worst = 0.0;
  for (Index c = 0; c < p.cols(); ++c) {
    const CVector z = p.col(c);
    const CVector exact =
        exact_classical_flow(op, config.T(), z, 1.01 * config.norm_L() + 1e-12);
    const CVector lf = leapfrog(op, PhysicalState::from_stacked(z, nq),
                                config.tau(), steps)
                           .stacked();
    worst = std::max(worst, (exact - lf).norm());
  }
  return finish("global-error", worst, bound, "probe");
}

ClassicalCost cost_model(const ElasticCoupling& op, double norm_L, double T,
                         double epsilon, double eta) {
  if (!(T > 0.0)) throw ParameterError("simulation time 'T' must be > 0");
  if (!(epsilon > 0.0)) throw ParameterError("target error 'epsilon' must be > 0");
  if (!(norm_L > 0.0)) throw ParameterError("'norm_L' must be > 0");
  ClassicalCost c;
  c.T = T;
  c.epsilon = epsilon;
  c.eta = eta;
  c.norm_L = norm_L;
  c.norm_L_bound = op.norm_bound();
  const double ce = c_eta(eta);
  c.tau_stability = eta / norm_L;
  c.tau_accuracy = std::sqrt(2.0 * epsilon / (ce * T * std::pow(norm_L, 3)));
  c.tau_max = std::min(c.tau_stability, c.tau_accuracy);
  c.stability_limited = c.tau_stability <= c.tau_accuracy;
  c.m_cl = static_cast<std::int64_t>(std::ceil(T / c.tau_max));
  c.madds_per_point = 2 * op.madds_L() + op.madds_L_adjoint() + 12;
  c.grid_points = op.shape().volume();
  c.arithmetic_ops = static_cast<double>(c.m_cl) *
                     static_cast<double>(c.madds_per_point) *
                     static_cast<double>(c.grid_points);
  c.memory_complex = 9 * c.grid_points;
  return c;
}

std::string to_record(const Certificate& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "certificate=" << c.name << '\n'
     << "measured=" << c.measured << '\n'
     << "bound=" << c.bound << '\n'
     << "margin=" << c.margin << '\n'
     << "holds=" << (c.holds ? "true" : "false") << '\n'
     << "method=" << c.method << '\n';
  return os.str();
}

std::string to_record(const ClassicalCost& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "T=" << c.T << '\n'
     << "epsilon=" << c.epsilon << '\n'
     << "eta=" << c.eta << '\n'
     << "norm_L=" << c.norm_L << '\n'
     << "norm_L_bound=" << c.norm_L_bound << '\n'
     << "tau_stability=" << c.tau_stability << '\n'
     << "tau_accuracy=" << c.tau_accuracy << '\n'
     << "tau_max=" << c.tau_max << '\n'
     << "stability_limited=" << (c.stability_limited ? "true" : "false") << '\n'
     << "m_cl=" << c.m_cl << '\n'
     << "madds_per_point=" << c.madds_per_point << '\n'
     << "grid_points=" << c.grid_points << '\n'
     << "arithmetic_ops=" << c.arithmetic_ops << '\n'
     << "memory_complex=" << c.memory_complex << '\n';
  return os.str();
}

}  // namespace elastoq
