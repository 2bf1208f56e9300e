#include <gtest/gtest.h>

#include <random>

#include "elastoq/elastic_media.hpp"
#include "test_support.hpp"

using namespace elastoq;

namespace {

const MaterialParams kUnit(1.0, 1.0, 0.0);
const MaterialParams kRock(1.0, 0.646, 0.255);

std::vector<MaterialParams> media() {
  return {kUnit, kRock, MaterialParams(4.0, 1.0, 0.0),
          MaterialParams(2.5, 3.0, 0.499), MaterialParams(0.7, 2.0, -0.5),
          MaterialParams(1.3, 0.2, 0.3)};
}

double numeric_inverse_norm(const MaterialParams& p) {
  const Matrix6 inv = build_compliance(p).inverse();
  Eigen::SelfAdjointEigenSolver<Matrix6> es(inv);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(MaterialParams, RejectsOutOfRangeAndNamesField) {
  auto message = [](double rho, double e, double nu) {
    try {
      MaterialParams(rho, e, nu);
    } catch (const ParameterError& err) {
      return std::string(err.what());
    }
    return std::string();
  };
  EXPECT_NE(message(0.0, 1.0, 0.0).find("'rho'"), std::string::npos);
  EXPECT_NE(message(1.0, -2.0, 0.0).find("'E'"), std::string::npos);
  EXPECT_NE(message(1.0, 1.0, 0.5).find("'nu'"), std::string::npos);
  EXPECT_NE(message(1.0, 1.0, -1.0).find("'nu'"), std::string::npos);
  EXPECT_NO_THROW(MaterialParams(1.0, 1.0, 0.4999));
}

TEST(Compliance, IdentityForUnitMedium) {
  EXPECT_EQ(build_compliance(kUnit), Matrix6::Identity());
}

TEST(Compliance, RockEntries) {
  const Matrix6 s = build_compliance(kRock);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s(i, i), 1.0 / 0.646, 1e-15);
    EXPECT_NEAR(s(3 + i, 3 + i), 1.255 / 0.646, 1e-15);
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_NEAR(s(i, j), -0.255 / 0.646, 1e-15);
    }
  }
  EXPECT_TRUE(Eigen::Matrix3d(s.block<3, 3>(0, 3)).isZero(0.0));
  EXPECT_TRUE(Eigen::Matrix3d(s.block<3, 3>(3, 3)).isDiagonal(0.0));
}

TEST(Compliance, NearIncompressibleSmallestEigenvalue) {
  Eigen::SelfAdjointEigenSolver<Matrix6> es(
      build_compliance(MaterialParams(1.0, 1.0, 0.499)));
  EXPECT_NEAR(es.eigenvalues()(0), 0.002, 1e-12);
}

TEST(Compliance, SpectrumMatchesClosedForm) {
  for (const MaterialParams& p : media()) {
    Eigen::SelfAdjointEigenSolver<Matrix6> es(build_compliance(p));
    std::vector<double> expect(5, (1.0 + p.nu()) / p.E());
    expect.push_back((1.0 - 2.0 * p.nu()) / p.E());
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 6; ++i) {
      EXPECT_NEAR(es.eigenvalues()(i), expect[static_cast<std::size_t>(i)], 1e-12);
    }
  }
}

TEST(Compliance, InverseNormClosedFormMatchesNumeric) {
  EXPECT_DOUBLE_EQ(compliance_inverse_norm(kUnit), 1.0);
  EXPECT_NEAR(compliance_inverse_norm(kRock), 1.318367, 1e-6);
  EXPECT_DOUBLE_EQ(compliance_inverse_norm(MaterialParams(1.0, 2.0, -0.5)), 4.0);
  for (const MaterialParams& p : media()) {
    const double closed = compliance_inverse_norm(p);
    EXPECT_NEAR(closed, numeric_inverse_norm(p), 1e-10 * closed);
  }
}

TEST(CellMatrices, AxisMatricesHaveSixUnitEntries) {
  const CellMatrices cell = build_cell_matrices(kRock);
  for (Axis a : kAxes) {
    const Matrix16& m = cell.a_axis[axis_index(a)];
    EXPECT_EQ((m.array() != 0.0).count(), 6);
    EXPECT_EQ((m.array() == 1.0).count(), 6);
    EXPECT_EQ(m, m.transpose());
    EXPECT_TRUE(m.bottomRows(7).isZero(0.0));
    EXPECT_TRUE(Eigen::Matrix3d(m.topLeftCorner<3, 3>()).isZero(0.0));
  }
}

TEST(CellMatrices, SelectionMatchesDerivativeLayout) {
  // Row i of the divergence operator: d/dx hits (xx, xy, xz), etc.
  const int x_cols[3] = {0, 3, 4}, y_cols[3] = {3, 1, 5}, z_cols[3] = {4, 5, 2};
  const int* cols[3] = {x_cols, y_cols, z_cols};
  for (Axis a : kAxes) {
    const auto c = coupling_selection(a);
    for (int r = 0; r < 3; ++r) {
      EXPECT_EQ(c.row(r).sum(), 1.0);
      EXPECT_EQ(c(r, cols[axis_index(a)][r]), 1.0);
    }
  }
}

TEST(CellMatrices, UnitMediumIsIdentity) {
  const CellMatrices cell = build_cell_matrices(kUnit);
  EXPECT_TRUE(cell.b_cell.isIdentity(0.0));
  EXPECT_TRUE(cell.b_inv_sqrt.isIdentity(1e-15));
}

TEST(CellMatrices, DenseMediumInverseSqrt) {
  const CellMatrices cell = build_cell_matrices(MaterialParams(4.0, 1.0, 0.0));
  const Eigen::Matrix3d top = cell.b_inv_sqrt.topLeftCorner<3, 3>();
  EXPECT_LT((top - 0.5 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CellMatrices, InverseSqrtAndSymmetry) {
  for (const MaterialParams& p : media()) {
    const CellMatrices cell = build_cell_matrices(p);
    const Matrix16 prod = cell.b_inv_sqrt * cell.b_inv_sqrt * cell.b_cell;
    EXPECT_LT((prod - Matrix16::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((cell.b_sqrt * cell.b_sqrt - cell.b_cell).cwiseAbs().maxCoeff(), 1e-12);
    for (const Matrix16* m : {&cell.b_cell, &cell.b_inv_sqrt}) {
      EXPECT_LT((*m - m->transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
    const Matrix6 s = build_compliance(p);
    EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (Axis a : kAxes) {
      const Matrix16 m = cell.coupling(a);
      EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Eigensystem, DiagonalisesAndIsUnitary) {
  for (const MaterialParams& p : media()) {
    const CellMatrices cell = build_cell_matrices(p);
    for (Axis a : kAxes) {
      const AxisEigenSystem sys = eigendecompose_axis(cell, a);
      const Matrix16c& v = sys.basis;
      const Matrix16c d = v.adjoint() * cell.coupling(a).cast<cplx>() * v;
      EXPECT_LT((d - Matrix16c(sys.lambdas.cast<cplx>().asDiagonal()))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-10);
      EXPECT_LT((v.adjoint() * v - Matrix16c::Identity()).cwiseAbs().maxCoeff(),
                1e-12);
      for (int j = 1; j < 16; ++j) EXPECT_LE(sys.lambdas(j - 1), sys.lambdas(j));
      EXPECT_GE((sys.lambdas.array().abs() < 1e-12).count(), 7);
      EXPECT_NEAR(sys.lambdas.sum(), 0.0, 1e-12);
    }
  }
}

TEST(Eigensystem, UnitMediumSymmetricSpectrumWithTenZeros) {
  const CellMatrices cell = build_cell_matrices(kUnit);
  for (Axis a : kAxes) {
    const AxisEigenSystem sys = eigendecompose_axis(cell, a);
    EXPECT_EQ((sys.lambdas.array().abs() < 1e-12).count(), 10);
    for (int j = 0; j < 16; ++j) {
      EXPECT_NEAR(sys.lambdas(j), -sys.lambdas(15 - j), 1e-12);
    }
  }
}

TEST(Eigensystem, PhaseConventionAndDeterminism) {
  const CellMatrices cell = build_cell_matrices(kRock);
  for (Axis a : kAxes) {
    const AxisEigenSystem s1 = eigendecompose_axis(cell, a);
    const AxisEigenSystem s2 = eigendecompose_axis(cell, a);
    EXPECT_EQ(s1.basis, s2.basis);
    for (int j = 0; j < 16; ++j) {
      const double top = s1.basis.col(j).cwiseAbs().maxCoeff();
      int peak = 0;
      while (std::abs(s1.basis(peak, j)) < top - 1e-12) ++peak;
      EXPECT_EQ(s1.basis(peak, j).imag(), 0.0);
      EXPECT_GT(s1.basis(peak, j).real(), 0.0);
    }
  }
}

TEST(Eigensystem, ProjectorsResolveIdentity) {
  for (const MaterialParams& p : media()) {
    const CellMatrices cell = build_cell_matrices(p);
    for (Axis a : kAxes) {
      const AxisEigenSystem sys = eigendecompose_axis(cell, a);
      Matrix16c sum = Matrix16c::Zero();
      for (int j = 0; j < 16; ++j) sum += sys.projector(j);
      EXPECT_LT((sum - Matrix16c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Eigensystem, ClustersGroupDegenerateValues) {
  const AxisEigenSystem sys =
      eigendecompose_axis(build_cell_matrices(kRock), Axis::y);
  int total = 0;
  bool has_zero_cluster = false;
  for (auto [first, last] : sys.clusters()) {
    total += last - first;
    for (int j = first + 1; j < last; ++j) {
      EXPECT_NEAR(sys.lambdas(j), sys.lambdas(first), 1e-9);
    }
    if (std::abs(sys.lambdas(first)) < 1e-12) {
      has_zero_cluster = true;
      EXPECT_GE(last - first, 7);
    }
  }
  EXPECT_EQ(total, 16);
  EXPECT_TRUE(has_zero_cluster);
}

TEST(Eigensystem, RandomClusterBasisKeepsSpectralProjectors) {
  const CellMatrices cell = build_cell_matrices(kRock);
  const AxisEigenSystem sys = eigendecompose_axis(cell, Axis::z);
  const AxisEigenSystem rot = with_random_cluster_basis(sys, 2024);
  EXPECT_LT((rot.basis.adjoint() * rot.basis - Matrix16c::Identity())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  for (auto [first, last] : sys.clusters()) {
    Matrix16c p0 = Matrix16c::Zero(), p1 = Matrix16c::Zero();
    for (int j = first; j < last; ++j) {
      p0 += sys.projector(j);
      p1 += rot.projector(j);
    }
    EXPECT_LT((p0 - p1).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_GT((rot.basis - sys.basis).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(NormBounds, CouplingNormsBoundedByMedium) {
  for (const MaterialParams& p : media()) {
    const CellMatrices cell = build_cell_matrices(p);
    const double v = std::sqrt(compliance_inverse_norm(p) / p.rho());
    for (Axis a : kAxes) {
      const CMatrix m = cell.coupling(a).cast<cplx>();
      const AxisEigenSystem sys = eigendecompose_axis(cell, a);
      EXPECT_LE(operator_norm(m), v * (1.0 + 1e-12));
      const double tn = trace_norm(m);
      EXPECT_NEAR(sys.lambdas.cwiseAbs().sum(), tn, 1e-10);
      EXPECT_LE(tn, 6.0 * v * (1.0 + 1e-12));
      EXPECT_LE(trace_norm(m * m), 6.0 * v * v * (1.0 + 1e-12));
    }
  }
}

TEST(NormBounds, BlockMatrixIdentities) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix g = testkit::random_matrix(3, 6, rng);
    CMatrix f = CMatrix::Zero(9, 9);
    f.topRightCorner(3, 6) = g;
    f.bottomLeftCorner(6, 3) = g.adjoint();
    const double gn = operator_norm(g), gan = operator_norm(g.adjoint());
    EXPECT_LE(operator_norm(f), std::max(gn, gan) + 1e-10);
    EXPECT_NEAR(trace_norm(f), trace_norm(g) + trace_norm(g.adjoint()), 1e-10);
    EXPECT_NEAR(trace_norm(f * f), 2.0 * trace_norm(g.adjoint() * g), 1e-10);
  }
}

TEST(Axis, NumberRoundTrip) {
  for (Axis a : kAxes) EXPECT_EQ(axis_from_number(axis_number(a)), a);
  EXPECT_THROW(axis_from_number(0), ParameterError);
  EXPECT_THROW(axis_from_number(4), ParameterError);
}
