#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "vcplab/config.hpp"

namespace vcplab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Index = Eigen::Index;

inline Index dim_of(int num_qubits) { return Index{1} << num_qubits; }

inline int qubits_of_dim(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim) throw DimensionError("dimension is not a power of two");
  return n;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Matrix kron_power(const Matrix& a, int copies) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < copies; ++i) out = kron(out, a);
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_residual(const Matrix& u) {
  if (u.rows() != u.cols()) throw DimensionError("matrix is not square");
  return max_abs_diff(u.adjoint() * u, Matrix::Identity(u.rows(), u.cols()));
}

inline Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 pauli_y() { Mat2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }
inline Mat2 hadamard() {
  Mat2 m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

// Bell state |Phi+> over 2N qubits: system on the first N, reference on the last N.
inline Vector bell_vector(int n) {
  const Index d = dim_of(n);
  Vector v = Vector::Zero(d * d);
  for (Index k = 0; k < d; ++k) v(k * d + k) = 1.0;
  return v / std::sqrt(static_cast<double>(d));
}

// In-place kernels on column-major operators over n qubits.
// Qubit 0 is the most significant bit of the basis index.
namespace ops {

inline Index bit(int n, int q) { return Index{1} << (n - 1 - q); }

inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// m <- U m with U acting on qubit q.
inline void left_1q(Matrix& m, int n, int q, const Mat2& u) {
  const Index h = bit(n, q), d = m.rows(), cols = m.cols();
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  cplx* p = m.data();
  for (Index c = 0; c < cols; ++c) {
    cplx* col = p + c * d;
    for (Index base = 0; base < d; base += 2 * h) {
      for (Index r = base; r < base + h; ++r) {
        const cplx a = col[r], b = col[r + h];
        col[r] = cmul(u00, a) + cmul(u01, b);
        col[r + h] = cmul(u10, a) + cmul(u11, b);
      }
    }
  }
}

// m <- m U^dagger with U acting on qubit q.
inline void right_adj_1q(Matrix& m, int n, int q, const Mat2& u) {
  const Index h = bit(n, q), d = m.rows(), cols = m.cols();
  const cplx v00 = std::conj(u(0, 0)), v01 = std::conj(u(0, 1));
  const cplx v10 = std::conj(u(1, 0)), v11 = std::conj(u(1, 1));
  cplx* p = m.data();
  for (Index base = 0; base < cols; base += 2 * h) {
    for (Index c = base; c < base + h; ++c) {
      cplx* x = p + c * d;
      cplx* y = p + (c + h) * d;
      for (Index r = 0; r < d; ++r) {
        const cplx a = x[r], b = y[r];
        x[r] = cmul(a, v00) + cmul(b, v01);
        y[r] = cmul(a, v10) + cmul(b, v11);
      }
    }
  }
}

inline void conjugate_1q(Matrix& m, int n, int q, const Mat2& u) {
  left_1q(m, n, q, u);
  right_adj_1q(m, n, q, u);
}

// Offsets of the local basis states of `targets` inside the full index; targets[0] is the
// most significant local bit.
inline std::vector<Index> local_offsets(int n, std::span<const int> targets) {
  const int k = static_cast<int>(targets.size());
  std::vector<Index> off(std::size_t{1} << k, 0);
  for (std::size_t j = 0; j < off.size(); ++j)
    for (int t = 0; t < k; ++t)
      if ((j >> (k - 1 - t)) & 1U) off[j] += bit(n, targets[t]);
  return off;
}

inline Index target_mask(int n, std::span<const int> targets) {
  Index mask = 0;
  for (int t : targets) mask |= bit(n, t);
  return mask;
}

inline void left_kq(Matrix& m, int n, std::span<const int> targets, const Matrix& u) {
  const auto off = local_offsets(n, targets);
  const Index mask = target_mask(n, targets), d = m.rows(), k = static_cast<Index>(off.size());
  Vector in(k), out(k);
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index base = 0; base < d; ++base) {
      if (base & mask) continue;
      for (Index j = 0; j < k; ++j) in(j) = m(base + off[j], c);
      out.noalias() = u * in;
      for (Index j = 0; j < k; ++j) m(base + off[j], c) = out(j);
    }
  }
}

inline void right_adj_kq(Matrix& m, int n, std::span<const int> targets, const Matrix& u) {
  const auto off = local_offsets(n, targets);
  const Index mask = target_mask(n, targets), d = m.cols(), k = static_cast<Index>(off.size());
  const Matrix ut = u.adjoint();
  Eigen::RowVectorXcd in(k), out(k);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index base = 0; base < d; ++base) {
      if (base & mask) continue;
      for (Index j = 0; j < k; ++j) in(j) = m(r, base + off[j]);
      out.noalias() = in * ut;
      for (Index j = 0; j < k; ++j) m(r, base + off[j]) = out(j);
    }
  }
}

// Full-index permutation induced by a local permutation `perm` (local j -> perm[j]) on targets.
inline std::vector<Index> lift_permutation(int n, std::span<const int> targets,
                                           std::span<const Index> perm) {
  const auto off = local_offsets(n, targets);
  const Index mask = target_mask(n, targets), d = dim_of(n);
  std::vector<Index> full(static_cast<std::size_t>(d));
  for (Index base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (std::size_t j = 0; j < off.size(); ++j) full[base + off[j]] = base + off[perm[j]];
  }
  return full;
}

// m <- P m where P|i> = |pi(i)>.
inline void left_perm(Matrix& m, std::span<const Index> pi) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) out.row(pi[i]) = m.row(i);
  m.swap(out);
}

// m <- m P^dagger, i.e. column i moves to column pi(i).
inline void right_adj_perm(Matrix& m, std::span<const Index> pi) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.cols(); ++i) out.col(pi[i]) = m.col(i);
  m.swap(out);
}

// m <- m S where S swaps qubits a and b.
inline void right_swap(Matrix& m, int n, int a, int b) {
  const Index ba = bit(n, a), bb = bit(n, b);
  for (Index c = 0; c < m.cols(); ++c) {
    if ((c & ba) && !(c & bb)) m.col(c).swap(m.col(c ^ ba ^ bb));
  }
}

// m <- S m where S swaps qubits a and b.
inline void left_swap(Matrix& m, int n, int a, int b) {
  const Index ba = bit(n, a), bb = bit(n, b);
  for (Index r = 0; r < m.rows(); ++r) {
    if ((r & ba) && !(r & bb)) m.row(r).swap(m.row(r ^ ba ^ bb));
  }
}

// m <- P m P^dagger for P = X^x Z^z given as full-index masks (global phase cancels).
inline Matrix pauli_conjugate(const Matrix& m, Index xmask, Index zmask) {
  Matrix out(m.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    const Index cs = c ^ xmask;
    const bool sc = std::popcount(static_cast<std::uint64_t>(cs & zmask)) & 1U;
    for (Index r = 0; r < m.rows(); ++r) {
      const Index rs = r ^ xmask;
      const bool sr = std::popcount(static_cast<std::uint64_t>(rs & zmask)) & 1U;
      out(r, c) = (sr != sc) ? -m(rs, cs) : m(rs, cs);
    }
  }
  return out;
}

// Single-qubit Pauli channel {pI, pX, pY, pZ} on qubit q, applied in place.
inline void pauli_channel_1q(Matrix& m, int n, int q, double pi, double px, double py, double pz) {
  const Index h = bit(n, q), d = m.rows();
  const double s = pi + pz, t = px + py, u = pi - pz, v = px - py;
  cplx* p = m.data();
  for (Index cb = 0; cb < d; cb += 2 * h) {
    for (Index c = cb; c < cb + h; ++c) {
      cplx* c0 = p + c * d;
      cplx* c1 = p + (c + h) * d;
      for (Index rb = 0; rb < d; rb += 2 * h) {
        for (Index r = rb; r < rb + h; ++r) {
          const cplx a = c0[r], b = c1[r], cc = c0[r + h], dd = c1[r + h];
          c0[r] = s * a + t * dd;
          c1[r + h] = s * dd + t * a;
          c1[r] = u * b + v * cc;
          c0[r + h] = u * cc + v * b;
        }
      }
    }
  }
}

}  // namespace ops
}  // namespace vcplab
