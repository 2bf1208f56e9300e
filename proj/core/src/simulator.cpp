#include "elastoq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace elastoq {

StateVector::StateVector(int qubits) : StateVector(qubits, CVector()) {
  amps_ = CVector::Zero(Index{1} << qubits);
  amps_(0) = 1.0;
}

StateVector::StateVector(int qubits, CVector amplitudes)
    : qubits_(qubits), amps_(std::move(amplitudes)) {
  if (qubits < 1 || qubits > 34) {
    throw ParameterError("state vector 'qubits' must be in 1..34");
  }
  if (amps_.size() != 0 && amps_.size() != (Index{1} << qubits)) {
    throw ShapeError("state vector of " + std::to_string(qubits) +
                     " qubits needs " + std::to_string(Index{1} << qubits) +
                     " amplitudes, got " + std::to_string(amps_.size()));
  }
}

StateVector StateVector::basis(int qubits, Index index) {
  StateVector s(qubits);
  if (index < 0 || index >= s.dimension()) {
    throw ShapeError("basis index out of range");
  }
  s.amps_.setZero();
  s.amps_(index) = 1.0;
  return s;
}

namespace {

struct Kernel {
  CVector& a;
  int qubits;
  const std::vector<Matrix16c>& unitaries;

  Index bit(int q) const { return Index{1} << (qubits - q); }
  Index dim() const { return a.size(); }

  template <class F>
  void pairs(int q, F&& f) const {
    const Index b = bit(q);
    for (Index i = 0; i < dim(); ++i) {
      if (!(i & b)) f(i, i | b);
    }
  }

  void operator()(const Hadamard& g) const {
    const double s = 1.0 / std::sqrt(2.0);
    pairs(g.target, [&](Index i0, Index i1) {
      const cplx x = a[i0], y = a[i1];
      a[i0] = s * (x + y);
      a[i1] = s * (x - y);
    });
  }

  void operator()(const PhaseS& g) const {
    const cplx ph = g.adjoint ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    const Index b = bit(g.target);
    for (Index i = 0; i < dim(); ++i) {
      if (i & b) a[i] *= ph;
    }
  }

  void operator()(const Cnot& g) const {
    const Index c = bit(g.control);
    pairs(g.target, [&](Index i0, Index i1) {
      if (i0 & c) std::swap(a[i0], a[i1]);
    });
  }

  void controlled_rz(double angle, Index mask, Index value, int target) const {
    const cplx lo = std::exp(cplx(0.0, -0.5 * angle));
    const cplx hi = std::exp(cplx(0.0, 0.5 * angle));
    pairs(target, [&](Index i0, Index i1) {
      if ((i0 & mask) == value) {
        a[i0] *= lo;
        a[i1] *= hi;
      }
    });
  }

  void operator()(const MultiControlledRz& g) const {
    Index mask = 0;
    for (int c : g.controls) mask |= bit(c);
    controlled_rz(g.angle, mask, mask, g.target);
  }

  void operator()(const PatternControlledRz& g) const {
    Index mask = 0, value = 0;
    for (int q = 1; q <= kStateQubits; ++q) {
      mask |= bit(q);
      if ((g.pattern >> (kStateQubits - q)) & 1) value |= bit(q);
    }
    for (int c : g.extra_controls) {
      mask |= bit(c);
      value |= bit(c);
    }
    controlled_rz(g.angle, mask, value, g.target);
  }

  void operator()(const FourQubitUnitary& g) const {
    const Matrix16c& u = unitaries[static_cast<std::size_t>(g.unitary_ref)];
    const Index rows = dim() / kStateComponents;
    Eigen::Map<CMatrix> x(a.data(), rows, kStateComponents);
    // Row s holds the 16 register amplitudes of spatial index s.
    if (g.adjoint) {
      x = (x * u.conjugate()).eval();
    } else {
      x = (x * u.transpose()).eval();
    }
  }
};

}  // namespace

void validate_program(const GateProgram& program) {
  if (program.qubits < kStateQubits) {
    throw ParameterError("gate program needs at least 4 qubits");
  }
  for (std::size_t i = 0; i < program.unitaries.size(); ++i) {
    const Matrix16c& u = program.unitaries[i];
    const double dev =
        (u.adjoint() * u - Matrix16c::Identity()).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-10)) {
      throw ParameterError("unitary payload " + std::to_string(i) +
                           " is not unitary (deviation " + std::to_string(dev) +
                           ")");
    }
  }
  for (std::size_t i = 0; i < program.gates.size(); ++i) {
    const Gate& g = program.gates[i];
    const std::vector<int> qs = gate_qubits(g);
    std::set<int> seen;
    for (int q : qs) {
      if (q < 1 || q > program.qubits) {
        throw ParameterError("gate " + std::to_string(i) + " uses qubit " +
                             std::to_string(q) + " outside 1.." +
                             std::to_string(program.qubits));
      }
      if (!seen.insert(q).second) {
        throw ParameterError("gate " + std::to_string(i) + " uses qubit " +
                             std::to_string(q) + " twice");
      }
    }
    if (const auto* p = std::get_if<PatternControlledRz>(&g)) {
      if (p->pattern < 0 || p->pattern >= kStateComponents) {
        throw ParameterError("gate " + std::to_string(i) +
                             " has pattern outside 0..15");
      }
    }
    if (const auto* u = std::get_if<FourQubitUnitary>(&g)) {
      if (u->unitary_ref < 0 ||
          u->unitary_ref >= static_cast<int>(program.unitaries.size())) {
        throw ParameterError("gate " + std::to_string(i) +
                             " references a missing unitary");
      }
    }
  }
}

void simulate_in_place(const GateProgram& program, CVector& amplitudes) {
  Kernel k{amplitudes, program.qubits, program.unitaries};
  for (const Gate& g : program.gates) std::visit(k, g);
}

StateVector simulate(const GateProgram& program, const StateVector& psi) {
  if (psi.qubits() != program.qubits) {
    throw ShapeError("program acts on " + std::to_string(program.qubits) +
                     " qubits, state has " + std::to_string(psi.qubits()));
  }
  validate_program(program);
  StateVector out = psi;
  simulate_in_place(program, out.amplitudes());
  return out;
}

namespace {

void sweep_fast(const HamiltonianModel& model, double tau, bool reversed,
                CVector& amps) {
  const LatticeShape& shape = model.shape();
  const Index vol = shape.volume();
  const int n = shape.n();
  Eigen::Map<CMatrix> x(amps.data(), vol, kStateComponents);
  for (int ai = 0; ai < 3; ++ai) {
    const Axis axis = kAxes[reversed ? 2 - ai : ai];
    const AxisEigenSystem& sys = model.eigensystem(axis);
    const int offset = shape.axis_bit_offset(axis);
    x = (x * sys.basis.conjugate()).eval();
    for (int ji = 0; ji < kStateComponents; ++ji) {
      const int j = reversed ? kStateComponents - 1 - ji : ji;
      if (std::abs(sys.lambdas(j)) < kZeroAngleThreshold) continue;
      const double theta = term_angle(model, TermKey{axis, j, 1}, tau);
      std::span<cplx> slice(amps.data() + j * vol, static_cast<std::size_t>(vol));
      for (int i = 0; i < n; ++i) {
        kernels::ladder_rotate(reversed ? n - i : i + 1, offset, theta, slice);
      }
    }
    x = (x * sys.basis.transpose()).eval();
  }
}

}  // namespace

void apply_block_fast_in_place(const HamiltonianModel& model, Scheme scheme,
                               double tau, CVector& amplitudes) {
  if (amplitudes.size() != model.dimension()) {
    throw ShapeError("apply_block_fast: expected " +
                     std::to_string(model.dimension()) + " amplitudes, got " +
                     std::to_string(amplitudes.size()));
  }
  if (scheme == Scheme::u1) {
    sweep_fast(model, tau, false, amplitudes);
  } else {
    sweep_fast(model, 0.5 * tau, false, amplitudes);
    sweep_fast(model, 0.5 * tau, true, amplitudes);
  }
}

StateVector apply_block_fast(const HamiltonianModel& model, Scheme scheme,
                             double tau, const StateVector& psi) {
  if (psi.qubits() != model.qubits()) {
    throw ShapeError("apply_block_fast: model has " +
                     std::to_string(model.qubits()) + " qubits, state has " +
                     std::to_string(psi.qubits()));
  }
  StateVector out = psi;
  apply_block_fast_in_place(model, scheme, tau, out.amplitudes());
  return out;
}

CMatrix dense_matrix(Index dim,
                     const std::function<CVector(const CVector&)>& f) {
  if (dim > 4096) {
    throw CapacityError("dense matrix capped at dimension 4096 (requested " +
                        std::to_string(dim) + ")");
  }
  CMatrix m(dim, dim);
  CVector e = CVector::Zero(dim);
  for (Index c = 0; c < dim; ++c) {
    e(c) = 1.0;
    m.col(c) = f(e);
    e(c) = 0.0;
  }
  return m;
}

}  // namespace elastoq
