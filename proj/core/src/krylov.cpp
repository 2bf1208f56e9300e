#include "elastoq/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace elastoq {

namespace {

// exp(-i T dt) e_1 for the leading m x m block of a real tridiagonal T.
CVector tridiagonal_expm_e1(const RVector& alpha, const RVector& beta, int m,
                            double dt) {
  RMatrix t = RMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha(i);
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(t);
  const RMatrix& q = es.eigenvectors();
  CVector phase(m);
  for (int i = 0; i < m; ++i) {
    phase(i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * dt)) * q(0, i);
  }
  return q.cast<cplx>() * phase;
}

struct Substep {
  CVector result;
  double error = 0.0;
  int matvecs = 0;
  bool converged = false;
};

Substep lanczos_substep(const HermitianOperator& op, const CVector& w,
                        double dt, double tol, int max_dim) {
  Substep out;
  const double beta0 = w.norm();
  if (beta0 == 0.0) {
    out.result = w;
    out.converged = true;
    return out;
  }
  std::vector<CVector> basis;
  basis.push_back(w / beta0);
  RVector alpha = RVector::Zero(max_dim);
  RVector beta = RVector::Zero(max_dim);
  const double breakdown = 1e-14;

  for (int j = 0; j < max_dim; ++j) {
    CVector r = op(basis[j]);
    ++out.matvecs;
    alpha(j) = basis[j].dot(r).real();
    // Full reorthogonalisation, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const CVector& b : basis) r -= b.dot(r) * b;
    }
    const double next = r.norm();
    const int m = j + 1;
    const CVector y = tridiagonal_expm_e1(alpha, beta, m, dt);
    const double err = beta0 * next * std::abs(y(m - 1));
    if (next < breakdown * std::max(1.0, std::abs(alpha(j))) || err <= tol) {
      out.result = CVector::Zero(w.size());
      for (int i = 0; i < m; ++i) out.result += (beta0 * y(i)) * basis[i];
      out.error = next < breakdown ? 0.0 : err;
      out.converged = true;
      return out;
    }
    if (m == max_dim) {
      out.error = err;
      return out;
    }
    beta(j) = next;
    basis.push_back(r / next);
  }
  return out;
}

}  // namespace

CVector krylov_expm_apply(const HermitianOperator& op, double norm_bound,
                          double t, const CVector& v,
                          const KrylovOptions& options, KrylovReport* report) {
  if (options.subspace < 2) {
    throw ParameterError("Krylov 'subspace' must be >= 2");
  }
  if (!(options.tolerance > 0.0)) {
    throw ParameterError("Krylov 'tolerance' must be > 0");
  }
  KrylovReport local;
  CVector w = v;
  if (t == 0.0) {
    if (report) *report = local;
    return w;
  }
  const double total = std::abs(t);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  double dt = norm_bound > 0.0 ? std::min(total, options.max_phase / norm_bound)
                               : total;
  double done = 0.0;
  while (done < total) {
    double step = std::min(dt, total - done);
    int halvings = 0;
    for (;;) {
      const double budget = options.tolerance * step / total;
      Substep s = lanczos_substep(op, w, sign * step, budget,
                                  options.subspace);
      local.matvecs += s.matvecs;
      if (s.converged) {
        w = std::move(s.result);
        local.residual += s.error;
        break;
      }
      if (++halvings > options.max_halvings) {
        throw ConvergenceError(
            "Krylov expm did not converge (residual estimate " +
                std::to_string(s.error) + " at substep " +
                std::to_string(step) + ")",
            s.error);
      }
      step *= 0.5;
      dt = step;
    }
    done += step;
    ++local.substeps;
  }
  if (report) *report = local;
  return w;
}

}  // namespace elastoq
