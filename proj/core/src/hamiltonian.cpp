#include "elastoq/hamiltonian.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace elastoq {

namespace {

std::array<AxisEigenSystem, 3> decompose_all(const CellMatrices& cell) {
  return {eigendecompose_axis(cell, Axis::x), eigendecompose_axis(cell, Axis::y),
          eigendecompose_axis(cell, Axis::z)};
}

void require_nonnegative_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ParameterError("step size 'tau' must be >= 0");
  }
}

}  // namespace

HamiltonianModel::HamiltonianModel(const LatticeShape& shape,
                                   const MaterialParams& params)
    : HamiltonianModel(shape, build_cell_matrices(params),
                       decompose_all(build_cell_matrices(params))) {}

HamiltonianModel::HamiltonianModel(
    const LatticeShape& shape, const CellMatrices& cell,
    const std::array<AxisEigenSystem, 3>& eigensystems)
    : shape_(shape), cell_(cell), eigen_(eigensystems) {
  for (Axis a : kAxes) {
    const Matrix16 m = cell_.coupling(a);
    coupling_[axis_index(a)] = 0.5 * (m + m.transpose());
  }
}

double HamiltonianModel::compliance_inverse_norm() const {
  return elastoq::compliance_inverse_norm(cell_.params);
}

std::vector<TermKey> HamiltonianModel::terms() const {
  std::vector<TermKey> keys;
  keys.reserve(static_cast<std::size_t>(term_count()));
  for (Axis a : kAxes) {
    for (int j = 0; j < kStateComponents; ++j) {
      for (int k = 1; k <= shape_.n(); ++k) keys.push_back({a, j, k});
    }
  }
  return keys;
}

CVector apply_H(const HamiltonianModel& model, const CVector& v) {
  if (v.size() != model.dimension()) {
    throw ShapeError("apply_H: expected vector length " +
                     std::to_string(model.dimension()) + ", got " +
                     std::to_string(v.size()));
  }
  const LatticeShape& shape = model.shape();
  const Index vol = shape.volume();
  const std::span<const cplx> in(v.data(), static_cast<std::size_t>(v.size()));

  CVector out = CVector::Zero(v.size());
  CVector diff(v.size());
  const cplx scale = 1.0 / (2.0 * shape.h());
  for (Axis a : kAxes) {
    diff.setZero();
    kernels::difference_accumulate(
        shape.n(), shape.axis_bit_offset(a), in,
        std::span<cplx>(diff.data(), static_cast<std::size_t>(diff.size())),
        scale);
    // Columns are state-register components; only the 9 physical ones couple.
    Eigen::Map<const CMatrix> d(diff.data(), vol, kStateComponents);
    Eigen::Map<CMatrix> o(out.data(), vol, kStateComponents);
    const Eigen::MatrixXd m =
        model.coupling(a).topLeftCorner<kPhysicalComponents, kPhysicalComponents>();
    o.leftCols(kPhysicalComponents).noalias() +=
        cplx(0.0, 1.0) * (d.leftCols(kPhysicalComponents) * m.transpose());
  }
  return out;
}

namespace {

template <class Block>
CSparse kron_with_ladders(const Block& left, int max_n,
                          const HamiltonianModel& model, Axis axis,
                          const std::vector<int>& levels, cplx factor) {
  const LatticeShape& shape = model.shape();
  const Index vol = shape.volume();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int k : levels) {
    const RSparse s = materialize_sparse(LadderTerm{axis, k}, shape, max_n);
    for (int c = 0; c < kStateComponents; ++c) {
      for (int d = 0; d < kStateComponents; ++d) {
        const cplx w = left(c, d);
        if (w == cplx{}) continue;
        for (Index col = 0; col < s.outerSize(); ++col) {
          for (RSparse::InnerIterator it(s, col); it; ++it) {
            trip.emplace_back(c * vol + it.row(), d * vol + it.col(),
                              factor * w * it.value());
          }
        }
      }
    }
  }
  CSparse m(model.dimension(), model.dimension());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

CSparse materialize_sparse_H(const HamiltonianModel& model, int max_n) {
  const LatticeShape& shape = model.shape();
  std::vector<int> levels;
  for (int k = 1; k <= shape.n(); ++k) levels.push_back(k);
  const cplx factor(0.0, 1.0 / (2.0 * shape.h()));
  CSparse h(model.dimension(), model.dimension());
  for (Axis a : kAxes) {
    h += kron_with_ladders(model.coupling(a), max_n, model, a, levels, factor);
  }
  CSparse adj = CSparse(h.adjoint());
  CSparse sym = 0.5 * (h + adj);
  sym.prune(cplx{});
  return sym;
}

CSparse materialize_term(const HamiltonianModel& model, const TermKey& key,
                         int max_n) {
  const AxisEigenSystem& sys = model.eigensystem(key.axis);
  const Matrix16c p = sys.projector(key.j);
  const cplx factor(0.0, sys.lambdas(key.j) / (2.0 * model.shape().h()));
  return kron_with_ladders(p, max_n, model, key.axis, {key.k}, factor);
}

double term_angle(const HamiltonianModel& model, const TermKey& key,
                  double tau) {
  return model.eigensystem(key.axis).lambdas(key.j) * tau /
         (2.0 * model.shape().h());
}

double hamiltonian_norm_bound(const HamiltonianModel& model) {
  return 3.0 / model.shape().h() *
         std::sqrt(model.compliance_inverse_norm() / model.params().rho());
}

double bound_first_order_norm(const HamiltonianModel& model, double tau) {
  require_nonnegative_tau(tau);
  const double n = model.shape().n();
  const double h = model.shape().h();
  return 81.0 * tau * tau / (2.0 * h * h) * model.compliance_inverse_norm() /
         model.params().rho() * n * n;
}

double bound_first_order_commutator(const HamiltonianModel& model, double tau) {
  require_nonnegative_tau(tau);
  const double n = model.shape().n();
  const double h = model.shape().h();
  return 9.0 * tau * tau / (4.0 * h * h) * model.compliance_inverse_norm() /
         model.params().rho() * (5.0 * n - 1.0);
}

SecondOrderBound bound_second_order(const HamiltonianModel& model, double tau) {
  require_nonnegative_tau(tau);
  const double n = model.shape().n();
  const double h = model.shape().h();
  const double v = std::sqrt(model.compliance_inverse_norm() / model.params().rho());
  const double base = 1440.0 * n * tau * v / h;
  const double cube = base * base * base;
  return {2.0 * cube, cube <= 1.0};
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::first_norm:
      return "first-norm";
    case BoundKind::first_commutator:
      return "first-commutator";
    case BoundKind::second:
      return "second";
  }
  return "unknown";
}

BoundKind bound_kind_from_string(const std::string& name) {
  if (name == "first-norm") return BoundKind::first_norm;
  if (name == "first-commutator") return BoundKind::first_commutator;
  if (name == "second") return BoundKind::second;
  throw ParameterError("unknown bound scheme '" + name +
                       "' (expected first-norm, first-commutator or second)");
}

std::int64_t cnot_ladder(int k) { return 2 * (k - 1); }

std::int64_t cnot_controlled_rz(int k) { return 16 * (k + 3) - 40 + 3; }

std::int64_t u1_step_cnot(int n) {
  const std::int64_t nn = n;
  return 432 * nn * nn + 378;
}

std::int64_t u2_step_cnot(int n) { return 2 * u1_step_cnot(n); }

std::int64_t u1_itemized_cnot(int n) {
  std::int64_t total = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int j = 0; j < kStateComponents; ++j) {
      for (int k = 1; k <= n; ++k) total += cnot_ladder(k) + cnot_controlled_rz(k);
    }
    total += 2 * kBasisChangeCnot;
  }
  return total;
}

ErrorBudget steps_and_cost(const HamiltonianModel& model, double T,
                           double epsilon, BoundKind kind) {
  if (!(T > 0.0)) throw ParameterError("simulation time 'T' must be > 0");
  if (!(epsilon > 0.0)) throw ParameterError("target error 'epsilon' must be > 0");

  ErrorBudget b;
  b.kind = kind;
  b.n = model.shape().n();
  b.h = model.shape().h();
  b.T = T;
  b.epsilon = epsilon;
  b.rho = model.params().rho();
  b.E = model.params().E();
  b.nu = model.params().nu();
  b.qubits = model.qubits();

  const double n = b.n;
  const double sinv = model.compliance_inverse_norm();
  const double v2 = sinv / b.rho;
  switch (kind) {
    case BoundKind::first_norm:
      b.p = 2;
      b.C = bound_first_order_norm(model, 1.0);
      b.per_step_cnot = u1_step_cnot(b.n);
      b.itemized_step_cnot = u1_itemized_cnot(b.n);
      b.closed_form_cnot = 81.0 * T * T / (b.h * b.h * epsilon) * v2 * n * n *
                       (216.0 * n * n + 189.0);
      break;
    case BoundKind::first_commutator:
      b.p = 2;
      b.C = bound_first_order_commutator(model, 1.0);
      b.per_step_cnot = u1_step_cnot(b.n);
      b.itemized_step_cnot = u1_itemized_cnot(b.n);
      b.closed_form_cnot = 9.0 * T * T / (2.0 * b.h * b.h * epsilon) * v2 *
                       (1080.0 * n * n * n - 216.0 * n * n + 945.0 * n - 189.0);
      break;
    case BoundKind::second:
      b.p = 3;
      b.C = bound_second_order(model, 1.0).bound;
      b.per_step_cnot = u2_step_cnot(b.n);
      b.itemized_step_cnot = 2 * u1_itemized_cnot(b.n);
      b.closed_form_cnot = std::pow(2880.0, 1.5) * std::pow(T, 1.5) /
                       (std::pow(b.h, 1.5) * std::sqrt(epsilon)) *
                       std::pow(v2, 0.75) * std::pow(n, 1.5) *
                       (432.0 * n * n + 378.0);
      break;
  }

  b.m_exact = std::pow(b.C * std::pow(T, b.p) / epsilon, 1.0 / (b.p - 1));
  const double m = std::ceil(b.m_exact);
  if (!(m < 9.0e15)) {
    throw ParameterError("step count overflow: (C T^p / epsilon)^(1/(p-1)) = " +
                         std::to_string(b.m_exact));
  }
  b.m = std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
  b.total_cnot = b.m * b.per_step_cnot;
  if (kind == BoundKind::second) {
    b.applicable = bound_second_order(model, T / static_cast<double>(b.m)).applicable;
  }
  b.ceiling_slack = (static_cast<double>(b.m) - b.m_exact) *
                    static_cast<double>(b.per_step_cnot);
  return b;
}

std::string to_record(const ErrorBudget& b) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "scheme=" << to_string(b.kind) << '\n'
     << "n=" << b.n << '\n'
     << "h=" << b.h << '\n'
     << "T=" << b.T << '\n'
     << "epsilon=" << b.epsilon << '\n'
     << "rho=" << b.rho << '\n'
     << "E=" << b.E << '\n'
     << "nu=" << b.nu << '\n'
     << "C=" << b.C << '\n'
     << "p=" << b.p << '\n'
     << "applicable=" << (b.applicable ? "true" : "false") << '\n'
     << "m_exact=" << b.m_exact << '\n'
     << "m=" << b.m << '\n'
     << "qubits=" << b.qubits << '\n'
     << "per_step_cnot=" << b.per_step_cnot << '\n'
     << "itemized_step_cnot=" << b.itemized_step_cnot << '\n'
     << "total_cnot=" << b.total_cnot << '\n'
     << "closed_form_cnot=" << b.closed_form_cnot << '\n'
     << "ceiling_slack=" << b.ceiling_slack << '\n';
  return os.str();
}

}  // namespace elastoq
