#include "elastoq/elastic_media.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace elastoq {

Axis axis_from_number(int number) {
  if (number < 1 || number > 3) {
    throw ParameterError("axis must be 1, 2 or 3 (got " +
                         std::to_string(number) + ")");
  }
  return static_cast<Axis>(number - 1);
}

MaterialParams::MaterialParams(double rho, double youngs_modulus,
                               double poisson_ratio)
    : rho_(rho), E_(youngs_modulus), nu_(poisson_ratio) {
  auto fail = [](const char* field, const char* rule, double value) {
    std::ostringstream os;
    os << "invalid material parameter '" << field << "' = " << value
       << " (requires " << rule << ")";
    throw ParameterError(os.str());
  };
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho", "rho > 0", rho);
  if (!(youngs_modulus > 0.0) || !std::isfinite(youngs_modulus))
    fail("E", "E > 0", youngs_modulus);
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5))
    fail("nu", "-1 < nu < 1/2", poisson_ratio);
}

Matrix6 build_compliance(const MaterialParams& params) {
  const double nu = params.nu();
  Matrix6 s = Matrix6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s(i, j) = (i == j) ? 1.0 : -nu;
    s(3 + i, 3 + i) = 1.0 + nu;
  }
  return s / params.E();
}

double compliance_inverse_norm(const MaterialParams& params) {
  return params.nu() >= 0.0 ? params.E() / (1.0 - 2.0 * params.nu())
                            : params.E() / (1.0 + params.nu());
}

Eigen::Matrix<double, 3, 6> coupling_selection(Axis axis) {
  Eigen::Matrix<double, 3, 6> c = Eigen::Matrix<double, 3, 6>::Zero();
  switch (axis) {
    case Axis::x:
      c(0, 0) = c(1, 3) = c(2, 4) = 1.0;
      break;
    case Axis::y:
      c(0, 3) = c(1, 1) = c(2, 5) = 1.0;
      break;
    case Axis::z:
      c(0, 4) = c(1, 5) = c(2, 2) = 1.0;
      break;
  }
  return c;
}

Matrix16 CellMatrices::coupling(Axis axis) const {
  return b_inv_sqrt * a_axis[axis_index(axis)] * b_inv_sqrt;
}

CellMatrices build_cell_matrices(const MaterialParams& params) {
  CellMatrices cell{params, {}, Matrix16::Zero(), Matrix16::Zero(),
                    Matrix16::Zero()};
  for (Axis a : kAxes) {
    Matrix16 m = Matrix16::Zero();
    const auto c = coupling_selection(a);
    m.block<3, 6>(0, 3) = c;
    m.block<6, 3>(3, 0) = c.transpose();
    cell.a_axis[axis_index(a)] = m;
  }

  cell.b_cell.setIdentity();
  cell.b_cell.topLeftCorner<3, 3>() *= params.rho();
  cell.b_cell.block<6, 6>(3, 3) = build_compliance(params);

  Eigen::SelfAdjointEigenSolver<Matrix16> es(cell.b_cell);
  if (es.info() != Eigen::Success) {
    throw Error("eigensolver failed on B_cell");
  }
  const Vector16 w = es.eigenvalues();
  if (w.minCoeff() <= 0.0) {
    throw Error("B_cell is not positive definite");
  }
  const Matrix16& u = es.eigenvectors();
  cell.b_sqrt = u * w.cwiseSqrt().asDiagonal() * u.transpose();
  cell.b_inv_sqrt = u * w.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
  // Remove rounding asymmetry so downstream Hermiticity checks are exact.
  cell.b_sqrt = 0.5 * (cell.b_sqrt + cell.b_sqrt.transpose()).eval();
  cell.b_inv_sqrt = 0.5 * (cell.b_inv_sqrt + cell.b_inv_sqrt.transpose()).eval();
  return cell;
}

Matrix16c AxisEigenSystem::projector(int j) const {
  return basis.col(j) * basis.col(j).adjoint();
}

std::vector<std::pair<int, int>> AxisEigenSystem::clusters() const {
  const double scale = std::max(1.0, lambdas.cwiseAbs().maxCoeff());
  std::vector<std::pair<int, int>> out;
  int first = 0;
  for (int j = 1; j <= kStateComponents; ++j) {
    if (j == kStateComponents ||
        lambdas(j) - lambdas(j - 1) >= kDegeneracyThreshold * scale) {
      out.emplace_back(first, j);
      first = j;
    }
  }
  return out;
}

namespace {

void orthonormalize_columns(Matrix16c& v, int first, int last) {
  for (int c = first; c < last; ++c) {
    for (int p = first; p < c; ++p) {
      const cplx overlap = v.col(p).dot(v.col(c));
      v.col(c) -= overlap * v.col(p);
    }
    v.col(c).normalize();
  }
}

void fix_phase(Eigen::Ref<Eigen::Matrix<cplx, 16, 1>> col) {
  const double peak = col.cwiseAbs().maxCoeff();
  int pick = 0;
  for (int i = 0; i < kStateComponents; ++i) {
    if (std::abs(col(i)) >= peak - 1e-12) {
      pick = i;
      break;
    }
  }
  const cplx z = col(pick);
  col *= std::conj(z) / std::abs(z);
  col(pick) = std::abs(col(pick));
}

void canonicalize(AxisEigenSystem& sys) {
  for (auto [first, last] : sys.clusters()) {
    orthonormalize_columns(sys.basis, first, last);
  }
  for (int j = 0; j < kStateComponents; ++j) fix_phase(sys.basis.col(j));
}

}  // namespace

AxisEigenSystem eigendecompose_axis(const CellMatrices& cell, Axis axis) {
  const Matrix16 m = cell.coupling(axis);
  Eigen::SelfAdjointEigenSolver<Matrix16> es(m);
  if (es.info() != Eigen::Success) {
    throw Error("eigensolver failed on axis coupling matrix");
  }
  std::array<int, kStateComponents> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a) < es.eigenvalues()(b);
  });

  AxisEigenSystem sys;
  sys.axis = axis;
  for (int j = 0; j < kStateComponents; ++j) {
    sys.lambdas(j) = es.eigenvalues()(order[j]);
    sys.basis.col(j) = es.eigenvectors().col(order[j]).cast<cplx>();
  }
  canonicalize(sys);
  return sys;
}

AxisEigenSystem with_random_cluster_basis(const AxisEigenSystem& sys,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  AxisEigenSystem out = sys;
  for (auto [first, last] : sys.clusters()) {
    const int size = last - first;
    if (size < 2) continue;
    CMatrix g(size, size);
    for (Index i = 0; i < g.size(); ++i) g(i) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<CMatrix> qr(g);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(size, size);
    out.basis.middleCols(first, size) = sys.basis.middleCols(first, size) * q;
  }
  return out;
}

double trace_norm(const Eigen::Ref<const CMatrix>& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double operator_norm(const Eigen::Ref<const CMatrix>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace elastoq
