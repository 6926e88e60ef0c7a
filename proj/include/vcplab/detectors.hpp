#pragma once

#include <vector>

#include "vcplab/densesim.hpp"

namespace vcplab {

// Completely positive map given by standard Kraus operators (not necessarily trace preserving).
class CPMap {
 public:
  CPMap(int n, std::vector<Matrix> kraus) : n_(n), kraus_(std::move(kraus)) {
    for (const auto& k : kraus_)
      if (k.rows() != dim_of(n) || k.cols() != dim_of(n)) throw DimensionError("Kraus operator size mismatch");
  }

  int num_qubits() const { return n_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
  }

  // (map (x) id)(|Phi+><Phi+|)
  Matrix choi() const {
    const Index d = dim_of(n_);
    Matrix out = Matrix::Zero(d * d, d * d);
    for (const auto& k : kraus_) {
      const Vector v = kron(k, Matrix::Identity(d, d)) * bell_vector(n_);
      out += v * v.adjoint();
    }
    return out;
  }

 private:
  int n_;
  std::vector<Matrix> kraus_;
};

enum class Parity { Even, Odd };

inline void check_involution(const Matrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("involution must be square");
  if (max_abs_diff(g * g, Matrix::Identity(g.rows(), g.cols())) > Tolerances::involution)
    throw InvalidArgument("operator is not an involution");
  if (unitarity_residual(g) > Tolerances::unitary) throw InvalidArgument("involution is not unitary");
}

// K_{i,+/-} = (K_i +/- G K_i G) / 2.
inline CPMap coherent_detector(const KrausChannel& noise, const Matrix& g, bool plus) {
  check_involution(g);
  if (g.rows() != dim_of(noise.num_qubits())) throw DimensionError("involution size mismatch");
  const double sign = plus ? 1.0 : -1.0;
  std::vector<Matrix> out;
  for (const auto& k : noise.standard_operators()) out.push_back((k + sign * g * k * g) / 2.0);
  return CPMap(noise.num_qubits(), std::move(out));
}

// Two separately measured probes: Pi_s K_i Pi_s' with s' = s for even parity and s' = -s for odd.
inline CPMap incoherent_detector(const KrausChannel& noise, const Matrix& g, Parity parity, bool plus) {
  check_involution(g);
  const Index d = dim_of(noise.num_qubits());
  if (g.rows() != d) throw DimensionError("involution size mismatch");
  const Matrix pp = (Matrix::Identity(d, d) + g) / 2.0;
  const Matrix pm = (Matrix::Identity(d, d) - g) / 2.0;
  const Matrix& out_proj = plus ? pp : pm;
  const Matrix& in_proj = (parity == Parity::Even) == plus ? pp : pm;
  std::vector<Matrix> out;
  for (const auto& k : noise.standard_operators()) out.push_back(out_proj * k * in_proj);
  return CPMap(noise.num_qubits(), std::move(out));
}

}  // namespace vcplab
