#pragma once

#include <cstdint>
#include <random>

#include "vcplab/gadgets.hpp"

namespace vcplab {

// Haar-random 2x2 unitary: QR of a complex Ginibre matrix with the phases of R divided out.
inline Mat2 haar_unitary_2(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat2 z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat2> qr(z);
  Mat2 q = qr.householderQ();
  const Mat2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 2; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

inline Matrix haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Index d = dim_of(n);
  Matrix z(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

inline Vector haar_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(dim_of(n));
  for (Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

// Random mixed state: normalized G G^dagger for a Ginibre G.
inline Matrix random_density_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Index d = dim_of(n);
  Matrix z(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Matrix rho = z * z.adjoint();
  rho /= rho.trace().real();
  return (rho + rho.adjoint()) / 2.0;
}

// D cycles of: Haar single-qubit gates on every qubit (noiseless), then a brickwork CNOT layer
// with pairs (0,1),(2,3),... on even cycles and (1,2),(3,4),... on odd cycles. Each CNOT is
// followed by single-qubit depolarizing noise of rate p on both of its qubits.
inline Circuit build_random_circuit(int n, int depth, double p, std::uint64_t seed) {
  if (n < 2 || depth < 0) throw InvalidArgument("random circuit needs n >= 2 and depth >= 0");
  std::mt19937_64 rng(seed);
  const PauliChannel noise = depolarizing(1, p);
  Circuit c;
  c.reserve(static_cast<std::size_t>(depth));
  for (int t = 0; t < depth; ++t) {
    NoisyLayer layer;
    for (int q = 0; q < n; ++q) layer.ops.push_back({GateOp::single(q, haar_unitary_2(rng)), std::nullopt});
    for (int a = t % 2; a + 1 < n; a += 2) {
      NoisyGate g{GateOp::cnot(a, a + 1), std::nullopt};
      if (p > 0.0) g.noise = noise;
      layer.ops.push_back(std::move(g));
    }
    c.push_back(std::move(layer));
  }
  return c;
}

}  // namespace vcplab
