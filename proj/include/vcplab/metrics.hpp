#pragma once

#include <numeric>

#include "vcplab/densesim.hpp"
#include "vcplab/gadgets.hpp"
#include "vcplab/pauli.hpp"

namespace vcplab {

// Fidelity witness quoted for entanglement activation: 0.5 for one qubit, 0.25 for two.
inline double separability_threshold(int n) { return 1.0 / static_cast<double>(dim_of(n)); }

inline double entangled_fidelity(const DensityOperator& choi) {
  const int n = choi.num_qubits() / 2;
  const Vector phi = bell_vector(n);
  return (phi.adjoint() * choi.matrix() * phi)(0, 0).real();
}

inline double entangled_fidelity(const KrausChannel& c) { return entangled_fidelity(choi_state(c)); }
inline double entangled_fidelity(const PauliChannel& c) { return entangled_fidelity(choi_state(c)); }

inline double coherent_information(const DensityOperator& choi) {
  const int n = choi.num_qubits() / 2;
  std::vector<int> sys(n);
  std::iota(sys.begin(), sys.end(), 0);
  return von_neumann_entropy(partial_trace(choi, sys)) - von_neumann_entropy(choi);
}

inline double coherent_information(const KrausChannel& c) { return coherent_information(choi_state(c)); }
inline double coherent_information(const PauliChannel& c) { return coherent_information(choi_state(c)); }

struct Infidelity {
  double value;
  bool out_of_range;  // value outside [0, 1]; reported raw
};

inline Infidelity virtual_infidelity(const VirtualState& v, const Vector& psi) {
  if (psi.size() != v.numerator().rows()) throw DimensionError("reference state size mismatch");
  if (v.degenerate()) throw DegenerateEstimator("virtual state denominator underflow");
  const Vector u = psi / psi.norm();
  const double f = (u.adjoint() * v.numerator() * u)(0, 0).real() / v.denominator();
  const double inf = 1.0 - f;
  return {inf, inf < 0.0 || inf > 1.0};
}

}  // namespace vcplab
