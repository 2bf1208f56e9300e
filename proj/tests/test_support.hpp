#pragma once

#include <random>

#include "elastoq/common.hpp"

namespace elastoq::testkit {

inline CVector random_state(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

inline CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m(i) = cplx(g(rng), g(rng));
  return m;
}

/// Largest singular value via a full SVD.
inline double svd_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace elastoq::testkit

#include <Eigen/SparseCore>

namespace elastoq::testkit {

/// Largest singular value of a real sparse matrix. Exact when M^T M is
/// diagonal (the case for products of ladder matrices), otherwise dense SVD.
inline double sparse_norm(const Eigen::SparseMatrix<double>& m) {
  const Eigen::SparseMatrix<double> g = Eigen::SparseMatrix<double>(m.transpose()) * m;
  double top = 0.0;
  bool diagonal = true;
  for (Index c = 0; c < g.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(g, c); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) diagonal = false;
      if (it.row() == it.col()) top = std::max(top, it.value());
    }
  }
  if (diagonal) return std::sqrt(top);
  return svd_norm(Eigen::MatrixXd(m).cast<cplx>());
}

}  // namespace elastoq::testkit
