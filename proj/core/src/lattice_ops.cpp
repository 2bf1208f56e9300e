#include "elastoq/lattice_ops.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace elastoq {

LatticeShape::LatticeShape(int n, double h) : n_(n), h_(h) {
  if (n < 1 || n > 20) {
    throw ParameterError("lattice 'n' must be in 1..20 (got " +
                         std::to_string(n) + ")");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ParameterError("lattice 'h' must be positive (got " +
                         std::to_string(h) + ")");
  }
}

namespace kernels {

namespace {

// Calls f(a, b) for every pair coupled by S_k: a has bit pattern 1 0..0 and
// b has 0 1..1 on the k low bits of the axis block; S_k e_a = e_b and
// S_k e_b = -e_a.
template <class F>
void for_each_ladder_pair(int k, int bit_offset, Index len, F&& f) {
  const Index block = Index{1} << (bit_offset + k);
  const Index inner = Index{1} << bit_offset;
  const Index a_bits = Index{1} << (bit_offset + k - 1);
  const Index b_bits = ((Index{1} << (k - 1)) - 1) << bit_offset;
  for (Index hi = 0; hi < len; hi += block) {
    for (Index lo = 0; lo < inner; ++lo) {
      const Index base = hi + lo;
      f(base | a_bits, base | b_bits);
    }
  }
}

void check_k(int k, int bit_offset, Index len) {
  if (k < 1 || (Index{1} << (bit_offset + k)) > len) {
    throw ShapeError("ladder level k=" + std::to_string(k) +
                     " out of range for buffer of length " +
                     std::to_string(len));
  }
}

}  // namespace

void ladder_accumulate(int k, int bit_offset, std::span<const cplx> in,
                       std::span<cplx> out, cplx scale) {
  const Index len = static_cast<Index>(in.size());
  check_k(k, bit_offset, len);
  for_each_ladder_pair(k, bit_offset, len, [&](Index a, Index b) {
    out[b] += scale * in[a];
    out[a] -= scale * in[b];
  });
}

void ladder_rotate(int k, int bit_offset, double theta, std::span<cplx> data) {
  const Index len = static_cast<Index>(data.size());
  check_k(k, bit_offset, len);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for_each_ladder_pair(k, bit_offset, len, [&](Index a, Index b) {
    const cplx va = data[a];
    const cplx vb = data[b];
    data[a] = c * va - s * vb;
    data[b] = s * va + c * vb;
  });
}

void difference_accumulate(int n, int bit_offset, std::span<const cplx> in,
                           std::span<cplx> out, cplx scale) {
  const Index len = static_cast<Index>(in.size());
  const Index stride = Index{1} << bit_offset;
  const Index npts = Index{1} << n;
  const Index block = stride * npts;
  for (Index hi = 0; hi < len; hi += block) {
    for (Index lo = 0; lo < stride; ++lo) {
      const Index base = hi + lo;
      for (Index j = 0; j < npts; ++j) {
        const cplx next = (j + 1 < npts) ? in[base + (j + 1) * stride] : cplx{};
        const cplx prev = (j > 0) ? in[base + (j - 1) * stride] : cplx{};
        out[base + j * stride] += scale * (next - prev);
      }
    }
  }
}

}  // namespace kernels

namespace {

void require_length(const CVector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw ShapeError(std::string(what) + ": expected vector length " +
                     std::to_string(expected) + ", got " +
                     std::to_string(v.size()));
  }
}

std::span<const cplx> view(const CVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<cplx> view(CVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_level(int k, int n) {
  if (k < 1 || k > n) {
    throw ParameterError("ladder level 'k' must be in 1.." + std::to_string(n) +
                         " (got " + std::to_string(k) + ")");
  }
}

}  // namespace

CVector apply_s_cell(int k, int n, const CVector& v) {
  check_level(k, n);
  require_length(v, Index{1} << n, "apply_s_cell");
  CVector out = CVector::Zero(v.size());
  kernels::ladder_accumulate(k, 0, view(v), view(out), 1.0);
  return out;
}

CVector apply_d_cell(const LatticeShape& shape, const CVector& v) {
  require_length(v, shape.points_per_axis(), "apply_d_cell");
  CVector out = CVector::Zero(v.size());
  const cplx scale = 1.0 / (2.0 * shape.h());
  for (int k = 1; k <= shape.n(); ++k) {
    kernels::ladder_accumulate(k, 0, view(v), view(out), scale);
  }
  return out;
}

CVector apply_s_axis(const LadderTerm& term, const LatticeShape& shape,
                     const CVector& v) {
  check_level(term.k, shape.n());
  require_length(v, shape.volume(), "apply_s_axis");
  CVector out = CVector::Zero(v.size());
  kernels::ladder_accumulate(term.k, shape.axis_bit_offset(term.axis), view(v),
                             view(out), 1.0);
  return out;
}

CVector apply_d_axis(Axis axis, const LatticeShape& shape, const CVector& v) {
  require_length(v, shape.volume(), "apply_d_axis");
  CVector out = CVector::Zero(v.size());
  const cplx scale = 1.0 / (2.0 * shape.h());
  for (int k = 1; k <= shape.n(); ++k) {
    kernels::ladder_accumulate(k, shape.axis_bit_offset(axis), view(v),
                               view(out), scale);
  }
  return out;
}

namespace {

void check_cap(const LatticeShape& shape, int max_n) {
  if (shape.n() > max_n) {
    throw CapacityError("materialisation capped at n=" + std::to_string(max_n) +
                        " (requested n=" + std::to_string(shape.n()) + ")");
  }
}

void add_ladder_triplets(int k, int bit_offset, Index len, double scale,
                         std::vector<Eigen::Triplet<double>>& t) {
  const Index block = Index{1} << (bit_offset + k);
  const Index inner = Index{1} << bit_offset;
  const Index a_bits = Index{1} << (bit_offset + k - 1);
  const Index b_bits = ((Index{1} << (k - 1)) - 1) << bit_offset;
  for (Index hi = 0; hi < len; hi += block) {
    for (Index lo = 0; lo < inner; ++lo) {
      const Index a = hi + lo + a_bits;
      const Index b = hi + lo + b_bits;
      t.emplace_back(b, a, scale);
      t.emplace_back(a, b, -scale);
    }
  }
}

}  // namespace

RSparse materialize_sparse(const LadderTerm& term, const LatticeShape& shape,
                           int max_n) {
  check_cap(shape, max_n);
  check_level(term.k, shape.n());
  const Index dim = shape.volume();
  std::vector<Eigen::Triplet<double>> t;
  add_ladder_triplets(term.k, shape.axis_bit_offset(term.axis), dim, 1.0, t);
  RSparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

RSparse materialize_d_axis(Axis axis, const LatticeShape& shape, int max_n) {
  check_cap(shape, max_n);
  const Index dim = shape.volume();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 1; k <= shape.n(); ++k) {
    add_ladder_triplets(k, shape.axis_bit_offset(axis), dim,
                        1.0 / (2.0 * shape.h()), t);
  }
  RSparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

RSparse materialize_d_cell(const LatticeShape& shape) {
  const Index dim = shape.points_per_axis();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 1; k <= shape.n(); ++k) {
    add_ladder_triplets(k, 0, dim, 1.0 / (2.0 * shape.h()), t);
  }
  RSparse m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace elastoq
