#pragma once

#include <span>

#include <Eigen/SparseCore>

#include "elastoq/common.hpp"

namespace elastoq {

/// Uniform grid with N = 2^n points per axis and spacing h.
class LatticeShape {
 public:
  LatticeShape(int n, double h);

  int n() const { return n_; }
  double h() const { return h_; }
  Index points_per_axis() const { return Index{1} << n_; }
  /// N^3
  Index volume() const { return Index{1} << (3 * n_); }
  /// Bit position of the least significant qubit of an axis block. The x axis
  /// is the most significant spatial block, z the least.
  int axis_bit_offset(Axis a) const { return (2 - axis_index(a)) * n_; }

  friend bool operator==(const LatticeShape&, const LatticeShape&) = default;

 private:
  int n_;
  double h_;
};

/// One MPO ladder term S_k along an axis; k = 1 is the least significant
/// qubit of the axis block.
struct LadderTerm {
  Axis axis = Axis::x;
  int k = 1;
};

/// S_k^cell v on a single axis of 2^n points.
CVector apply_s_cell(int k, int n, const CVector& v);

/// Central difference (q_{j+1} - q_{j-1}) / 2h with q_{-1} = q_N = 0,
/// evaluated as (1/2h) sum_k S_k^cell.
CVector apply_d_cell(const LatticeShape& shape, const CVector& v);

/// S_k^(alpha) on a spatial vector of length N^3 (index j_x j_y j_z, z fastest).
CVector apply_s_axis(const LadderTerm& term, const LatticeShape& shape,
                     const CVector& v);

/// D^(alpha) = (1/2h) sum_k S_k^(alpha) on a spatial vector of length N^3.
CVector apply_d_axis(Axis axis, const LatticeShape& shape, const CVector& v);

inline constexpr int kDefaultMaterializeCap = 5;

using RSparse = Eigen::SparseMatrix<double>;

/// Dense-index sparse forms for oracles. Throw CapacityError when n exceeds
/// max_n.
RSparse materialize_sparse(const LadderTerm& term, const LatticeShape& shape,
                           int max_n = kDefaultMaterializeCap);
RSparse materialize_d_axis(Axis axis, const LatticeShape& shape,
                           int max_n = kDefaultMaterializeCap);
RSparse materialize_d_cell(const LatticeShape& shape);

/// Matrix-free kernels over contiguous amplitude buffers. `bit_offset` is the
/// position of the axis block's lowest qubit inside the buffer index, so the
/// same kernel serves spatial vectors and full state-register vectors.
namespace kernels {

/// out += scale * S_k v
void ladder_accumulate(int k, int bit_offset, std::span<const cplx> in,
                       std::span<cplx> out, cplx scale);

/// data <- exp(theta * S_k) data, a real rotation on each coupled index pair.
void ladder_rotate(int k, int bit_offset, double theta, std::span<cplx> data);

/// out += scale * (q_{j+1} - q_{j-1}) along the axis block of n qubits.
void difference_accumulate(int n, int bit_offset, std::span<const cplx> in,
                           std::span<cplx> out, cplx scale);

}  // namespace kernels

}  // namespace elastoq
