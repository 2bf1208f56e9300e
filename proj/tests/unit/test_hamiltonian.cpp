#include <gtest/gtest.h>

#include <random>

#include "elastoq/hamiltonian.hpp"
#include "test_support.hpp"

using namespace elastoq;

namespace {

const MaterialParams kUnit(1.0, 1.0, 0.0);
const MaterialParams kRock(1.0, 0.646, 0.255);

// i sum_a (B^{-1/2} A_a B^{-1/2}) (x) D_a assembled densely from the cell
// matrices and an explicit central-difference stencil.
CMatrix kron_oracle(const LatticeShape& shape, const MaterialParams& p) {
  const CellMatrices cell = build_cell_matrices(p);
  const Index vol = shape.volume();
  const Index N = shape.points_per_axis();
  CMatrix h = CMatrix::Zero(16 * vol, 16 * vol);
  for (Axis a : kAxes) {
    RMatrix d = RMatrix::Zero(vol, vol);
    const Index stride = Index{1} << shape.axis_bit_offset(a);
    for (Index s = 0; s < vol; ++s) {
      const Index j = (s / stride) % N;
      if (j + 1 < N) d(s, s + stride) += 1.0 / (2.0 * shape.h());
      if (j > 0) d(s, s - stride) -= 1.0 / (2.0 * shape.h());
    }
    const Matrix16 m = cell.coupling(a);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c)
        if (m(r, c) != 0.0)
          h.block(r * vol, c * vol, vol, vol) += cplx(0.0, m(r, c)) * d.cast<cplx>();
  }
  return h;
}

}  // namespace

TEST(Model, CountsAndDimensions) {
  const HamiltonianModel model(LatticeShape(3, 1.0), kRock);
  EXPECT_EQ(model.qubits(), 13);
  EXPECT_EQ(model.dimension(), Index{1} << 13);
  EXPECT_EQ(model.term_count(), 144);
  const auto keys = model.terms();
  ASSERT_EQ(keys.size(), 144u);
  EXPECT_EQ(keys.front(), (TermKey{Axis::x, 0, 1}));
  EXPECT_EQ(keys[1], (TermKey{Axis::x, 0, 2}));
  EXPECT_EQ(keys.back(), (TermKey{Axis::z, 15, 3}));
}

TEST(ApplyH, MatchesKroneckerOracle) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 2; ++n) {
    for (const MaterialParams& p : {kUnit, kRock, MaterialParams(2.0, 3.0, -0.3)}) {
      const LatticeShape shape(n, 0.8);
      const HamiltonianModel model(shape, p);
      const CMatrix h = kron_oracle(shape, p);
      for (int t = 0; t < 5; ++t) {
        const CVector v = testkit::random_state(model.dimension(), rng);
        EXPECT_LT((apply_H(model, v) - h * v).cwiseAbs().maxCoeff(), 1e-12);
      }
      const CMatrix sparse_dense = materialize_sparse_H(model).toDense();
      EXPECT_LT((sparse_dense - h).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ApplyH, SparseAgreesAtLargerLattice) {
  std::mt19937_64 rng(2);
  const HamiltonianModel model(LatticeShape(3, 1.0), kRock);
  const CSparse h = materialize_sparse_H(model);
  for (int t = 0; t < 3; ++t) {
    const CVector v = testkit::random_state(model.dimension(), rng);
    EXPECT_LT((apply_H(model, v) - h * v).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ApplyH, PaddingSectorIsAnnihilated) {
  std::mt19937_64 rng(3);
  const HamiltonianModel model(LatticeShape(2, 1.0), kRock);
  CVector v = testkit::random_state(model.dimension(), rng);
  v.head(9 * model.shape().volume()).setZero();
  EXPECT_LT(apply_H(model, v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ApplyH, RejectsWrongLength) {
  const HamiltonianModel model(LatticeShape(1, 1.0), kUnit);
  EXPECT_THROW(apply_H(model, CVector::Zero(64)), ShapeError);
}

TEST(SparseH, HermitianTracelessSymmetricSpectrum) {
  for (const MaterialParams& p : {kUnit, kRock}) {
    const HamiltonianModel model(LatticeShape(1, 1.0), p);
    const CMatrix h = materialize_sparse_H(model).toDense();
    ASSERT_EQ(h.rows(), 128);
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(std::abs(h.trace()), 0.0, 1e-13);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector w = es.eigenvalues();
    for (Index i = 0; i < w.size(); ++i) {
      EXPECT_NEAR(w(i), -w(w.size() - 1 - i), 1e-10);
    }
  }
}

TEST(SparseH, NormWithinBound) {
  for (int n = 1; n <= 2; ++n) {
    for (const MaterialParams& p : {kUnit, kRock, MaterialParams(0.5, 2.0, 0.45)}) {
      const HamiltonianModel model(LatticeShape(n, 0.6), p);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(materialize_sparse_H(model).toDense());
      EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(),
                hamiltonian_norm_bound(model) * (1.0 + 1e-12));
    }
  }
}

TEST(Terms, SumReproducesHamiltonian) {
  for (int n = 1; n <= 2; ++n) {
    const HamiltonianModel model(LatticeShape(n, 1.1), kRock);
    CSparse sum(model.dimension(), model.dimension());
    for (const TermKey& key : model.terms()) sum += materialize_term(model, key);
    const CMatrix diff = CMatrix(sum.toDense()) - materialize_sparse_H(model).toDense();
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Terms, EachTermHermitian) {
  const HamiltonianModel model(LatticeShape(1, 1.0), kRock);
  for (const TermKey& key : model.terms()) {
    const CMatrix t = materialize_term(model, key).toDense();
    EXPECT_LT((t - t.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Terms, Angle) {
  const HamiltonianModel model(LatticeShape(2, 1.0), kRock);
  for (const TermKey& key : model.terms()) {
    EXPECT_EQ(term_angle(model, key, 0.0), 0.0);
    const double lambda = model.eigensystem(key.axis).lambdas(key.j);
    EXPECT_DOUBLE_EQ(term_angle(model, key, 0.1), lambda * 0.1 / 2.0);
    if (std::abs(lambda) < 1e-13) EXPECT_NEAR(term_angle(model, key, 5.0), 0.0, 1e-12);
  }
  // lambda = 1.2, tau = 0.1, h = 1
  EXPECT_NEAR(1.2 * 0.1 / (2.0 * 1.0), 0.06, 1e-15);
}

TEST(Bounds, ZeroStep) {
  const HamiltonianModel model(LatticeShape(2, 1.0), kRock);
  EXPECT_EQ(bound_first_order_norm(model, 0.0), 0.0);
  EXPECT_EQ(bound_first_order_commutator(model, 0.0), 0.0);
  const SecondOrderBound b = bound_second_order(model, 0.0);
  EXPECT_EQ(b.bound, 0.0);
  EXPECT_TRUE(b.applicable);
  EXPECT_THROW(bound_first_order_norm(model, -0.1), ParameterError);
}

TEST(Bounds, NumericExamples) {
  EXPECT_NEAR(bound_first_order_norm(HamiltonianModel(LatticeShape(5, 1.0), kRock), 0.1),
              40.5 * 0.01 * (0.646 / 0.49) * 25.0, 1e-12);
  EXPECT_NEAR(bound_first_order_norm(HamiltonianModel(LatticeShape(5, 1.0), kRock), 0.1),
              13.348, 1e-3);
  EXPECT_DOUBLE_EQ(
      bound_first_order_commutator(HamiltonianModel(LatticeShape(2, 1.0), kUnit), 0.5),
      5.0625);
  const SecondOrderBound small =
      bound_second_order(HamiltonianModel(LatticeShape(1, 1.0), kUnit), 1e-4);
  EXPECT_NEAR(small.bound, 2.0 * 1440.0 * 1440.0 * 1440.0 * 1e-12, 1e-15);
  EXPECT_TRUE(small.applicable);
  EXPECT_FALSE(
      bound_second_order(HamiltonianModel(LatticeShape(5, 1.0), kUnit), 0.1).applicable);
}

TEST(Bounds, ScaleWithStep) {
  const HamiltonianModel model(LatticeShape(3, 0.7), kRock);
  EXPECT_NEAR(bound_first_order_norm(model, 0.2) / bound_first_order_norm(model, 0.1),
              4.0, 1e-12);
  EXPECT_NEAR(bound_first_order_commutator(model, 0.2) /
                  bound_first_order_commutator(model, 0.1),
              4.0, 1e-12);
  EXPECT_NEAR(bound_second_order(model, 0.2).bound / bound_second_order(model, 0.1).bound,
              8.0, 1e-12);
  // The commutator bound improves on the norm bound for every n > 1.
  EXPECT_LT(bound_first_order_commutator(model, 0.1), bound_first_order_norm(model, 0.1));
}

TEST(Cnot, StepCounts) {
  EXPECT_EQ(u1_step_cnot(5), 11178);
  EXPECT_EQ(u2_step_cnot(5), 22356);
  EXPECT_EQ(qubit_count(5), 19);
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(u1_step_cnot(n), 432 * n * n + 378);
    EXPECT_EQ(u2_step_cnot(n), 2 * u1_step_cnot(n));
    EXPECT_EQ(u1_itemized_cnot(n), 432 * n * n + 864 * n + 378);
  }
  EXPECT_EQ(cnot_ladder(1), 0);
  EXPECT_EQ(cnot_ladder(4), 6);
  EXPECT_EQ(cnot_controlled_rz(1), 27);
}

TEST(Cnot, TermwiseSum) {
  for (int n = 1; n <= 6; ++n) {
    std::int64_t per_term = 0;
    for (int k = 1; k <= n; ++k) per_term += cnot_ladder(k) + cnot_controlled_rz(k);
    EXPECT_EQ(48 * per_term / n, 48 * (9 * n + 18));
    EXPECT_EQ(u1_itemized_cnot(n), 48 * per_term + 6 * kBasisChangeCnot);
  }
}

TEST(Budget, CommutatorCountMatchesClosedForm) {
  const HamiltonianModel model(LatticeShape(3, 1.0), kUnit);
  const ErrorBudget b = steps_and_cost(model, 10.0, 0.1, BoundKind::first_commutator);
  EXPECT_EQ(b.per_step_cnot, 432 * 9 + 378);
  EXPECT_EQ(b.total_cnot, b.m * b.per_step_cnot);
  EXPECT_EQ(b.m, static_cast<std::int64_t>(std::ceil(9.0 / 4.0 * 14.0 * 100.0 / 0.1)));
  const double closed = 9.0 * 100.0 / (2.0 * 0.1) * (1080.0 * 27 - 216.0 * 9 + 945.0 * 3 - 189.0);
  EXPECT_NEAR(b.closed_form_cnot, closed, 1e-6 * closed);
  EXPECT_GE(static_cast<double>(b.total_cnot), b.closed_form_cnot - 1e-6 * closed);
  EXPECT_LE(static_cast<double>(b.total_cnot) - b.closed_form_cnot,
            b.ceiling_slack + 1e-6 * closed);
  EXPECT_LT(b.ceiling_slack, static_cast<double>(b.per_step_cnot));
  EXPECT_EQ(b.qubits, 13);
}

TEST(Budget, AllSchemesMatchClosedForm) {
  for (int n = 1; n <= 5; ++n) {
    const HamiltonianModel model(LatticeShape(n, 1.0), kRock);
    for (BoundKind kind : {BoundKind::first_norm, BoundKind::first_commutator,
                           BoundKind::second}) {
      const ErrorBudget b = steps_and_cost(model, 10.0, 0.01, kind);
      EXPECT_EQ(b.p, kind == BoundKind::second ? 3 : 2);
      EXPECT_EQ(b.m, static_cast<std::int64_t>(std::ceil(b.m_exact)));
      const double rel = std::abs(b.m_exact * b.per_step_cnot - b.closed_form_cnot);
      EXPECT_LE(rel, 1e-9 * b.closed_form_cnot) << to_string(kind) << " n=" << n;
      EXPECT_NEAR(b.total_cnot - b.closed_form_cnot, b.ceiling_slack, 1e-6 * b.closed_form_cnot);
    }
  }
}

TEST(Budget, SecondOrderApplicability) {
  const HamiltonianModel model(LatticeShape(1, 1.0), kUnit);
  const ErrorBudget b = steps_and_cost(model, 1.0, 1e-6, BoundKind::second);
  const double tau = 1.0 / static_cast<double>(b.m);
  EXPECT_EQ(b.applicable, bound_second_order(model, tau).applicable);
  EXPECT_TRUE(steps_and_cost(model, 1.0, 1e-6, BoundKind::first_norm).applicable);
}

TEST(Budget, RejectsBadInputs) {
  const HamiltonianModel model(LatticeShape(1, 1.0), kUnit);
  EXPECT_THROW(steps_and_cost(model, 0.0, 0.1, BoundKind::first_norm), ParameterError);
  EXPECT_THROW(steps_and_cost(model, 1.0, 0.0, BoundKind::first_norm), ParameterError);
  EXPECT_THROW(bound_kind_from_string("third"), ParameterError);
  for (BoundKind k : {BoundKind::first_norm, BoundKind::first_commutator, BoundKind::second})
    EXPECT_EQ(bound_kind_from_string(to_string(k)), k);
}

TEST(Budget, RecordIsFlat) {
  const HamiltonianModel model(LatticeShape(5, 1.0), kRock);
  const std::string rec =
      to_record(steps_and_cost(model, 10.0, 0.1, BoundKind::first_commutator));
  EXPECT_NE(rec.find("per_step_cnot=11178\n"), std::string::npos);
  EXPECT_NE(rec.find("qubits=19\n"), std::string::npos);
}
