#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vcplab/config.hpp"
#include "vcplab/linalg.hpp"

namespace vcplab {

class DensityOperator {
 public:
  DensityOperator() = default;

  explicit DensityOperator(Matrix m, std::vector<std::string> labels = {},
                           double hermitian_tol = Tolerances::hermitian)
      : matrix_(std::move(m)), labels_(std::move(labels)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("density operator must be square");
    num_qubits_ = qubits_of_dim(matrix_.rows());
    if (hermiticity_residual(matrix_) > hermitian_tol)
      throw InvalidArgument("density operator is not Hermitian");
    if (!labels_.empty() && static_cast<int>(labels_.size()) != num_qubits_)
      throw DimensionError("label count does not match qubit count");
  }

  static DensityOperator pure(const Vector& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) throw InvalidArgument("zero state vector");
    const Vector v = psi / norm;
    return DensityOperator(v * v.adjoint());
  }

  static DensityOperator basis(int n, Index k) {
    Vector v = Vector::Zero(dim_of(n));
    if (k < 0 || k >= v.size()) throw DimensionError("basis index out of range");
    v(k) = 1.0;
    return pure(v);
  }

  static DensityOperator maximally_mixed(int n) {
    const Index d = dim_of(n);
    return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
  }

  static DensityOperator plus() {
    Vector v(2);
    v << 1.0, 1.0;
    return pure(v);
  }

  int num_qubits() const { return num_qubits_; }
  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double trace() const { return matrix_.trace().real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_physical(double tol = Tolerances::psd) const {
    return std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
  }

  Matrix hermitian_part() const { return (matrix_ + matrix_.adjoint()) / 2.0; }

  DensityOperator tensor(const DensityOperator& other) const {
    std::vector<std::string> labels;
    if (!labels_.empty() && !other.labels_.empty()) {
      labels = labels_;
      labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
    }
    return DensityOperator(kron(matrix_, other.matrix_), std::move(labels));
  }

 private:
  int num_qubits_ = 0;
  Matrix matrix_;
  std::vector<std::string> labels_;
};

// Register labels in the canonical order: control, ancilla copies, main.
inline std::vector<std::string> gadget_labels(int n, int copies, bool with_control = true) {
  std::vector<std::string> out;
  if (with_control) out.emplace_back("control");
  for (int c = 0; c + 1 < copies; ++c)
    for (int k = 0; k < n; ++k) out.push_back("ancilla_" + std::to_string(c) + "[" + std::to_string(k) + "]");
  for (int k = 0; k < n; ++k) out.push_back("main[" + std::to_string(k) + "]");
  return out;
}

struct KrausTerm {
  double weight;
  Matrix op;
};

// Normalized Kraus representation: channel(rho) = sum_i p_i E_i rho E_i^dagger, Tr(E_i^dagger E_i) = 2^N.
class KrausChannel {
 public:
  KrausChannel(int n, std::vector<KrausTerm> terms) : num_qubits_(n), terms_(std::move(terms)) {
    const Index d = dim_of(n);
    if (terms_.empty()) throw InvalidChannel("channel has no Kraus terms");
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& t : terms_) {
      if (t.op.rows() != d || t.op.cols() != d) throw DimensionError("Kraus operator size mismatch");
      if (!(t.weight >= 0.0)) throw InvalidChannel("negative Kraus weight");
      if (std::abs((t.op.adjoint() * t.op).trace().real() - static_cast<double>(d)) > Tolerances::kraus)
        throw InvalidChannel("Kraus operator is not in the normalized representation");
      sum += t.weight * t.op.adjoint() * t.op;
    }
    if (max_abs_diff(sum, Matrix::Identity(d, d)) > Tolerances::kraus)
      throw InvalidChannel("Kraus set is not trace preserving");
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const KrausTerm& a, const KrausTerm& b) { return a.weight > b.weight; });
  }

  // From standard Kraus operators K_i (sum K_i^dagger K_i = I).
  static KrausChannel from_operators(int n, const std::vector<Matrix>& kraus) {
    const double d = static_cast<double>(dim_of(n));
    std::vector<KrausTerm> terms;
    for (const auto& k : kraus) {
      const double norm = (k.adjoint() * k).trace().real();
      if (norm <= 0.0) continue;
      terms.push_back({norm / d, k * std::sqrt(d / norm)});
    }
    return KrausChannel(n, std::move(terms));
  }

  static KrausChannel identity(int n) {
    const Index d = dim_of(n);
    return KrausChannel(n, {{1.0, Matrix::Identity(d, d)}});
  }

  static KrausChannel unitary(const Matrix& u) {
    if (unitarity_residual(u) > Tolerances::unitary) throw InvalidArgument("matrix is not unitary");
    return KrausChannel(qubits_of_dim(u.rows()), {{1.0, u}});
  }

  static KrausChannel amplitude_damping(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("damping rate out of range");
    Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    return from_operators(1, {k0, k1});
  }

  int num_qubits() const { return num_qubits_; }
  const std::vector<KrausTerm>& terms() const { return terms_; }

  std::vector<Matrix> standard_operators() const {
    std::vector<Matrix> out;
    for (const auto& t : terms_) out.push_back(std::sqrt(t.weight) * t.op);
    return out;
  }

  // max |Tr(E_i E_j^dagger)/2^N - delta_ij|; zero for Pauli channels.
  double orthogonality_residual() const {
    const double d = static_cast<double>(dim_of(num_qubits_));
    double worst = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      for (std::size_t j = 0; j < terms_.size(); ++j) {
        const cplx v = (terms_[i].op * terms_[j].op.adjoint()).trace() / d;
        worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  }

 private:
  int num_qubits_;
  std::vector<KrausTerm> terms_;
};

struct GateOp {
  enum class Kind { SingleQubit, Unitary, Cnot, Cswap, ControlledPermutation };

  Kind kind = Kind::Unitary;
  std::vector<int> targets;
  Matrix matrix;                  // dense unitary; empty for permutation kinds
  std::vector<Index> permutation;  // local basis map j -> permutation[j]; empty for dense kinds

  static GateOp single(int q, const Mat2& u) {
    GateOp g{Kind::SingleQubit, {q}, Matrix(u), {}};
    g.validate();
    return g;
  }

  static GateOp unitary(std::vector<int> targets, Matrix u) {
    GateOp g{Kind::Unitary, std::move(targets), std::move(u), {}};
    g.validate();
    return g;
  }

  static GateOp cnot(int control, int target) {
    GateOp g{Kind::Cnot, {control, target}, {}, {0, 1, 3, 2}};
    g.validate();
    return g;
  }

  static GateOp cswap(int control, int a, int b) {
    GateOp g{Kind::Cswap, {control, a, b}, {}, {0, 1, 2, 3, 4, 6, 5, 7}};
    g.validate();
    return g;
  }

  // Controlled cyclic shift of `registers`: when the control is set, the content of
  // register r moves to register r+1 (mod M).
  static GateOp controlled_cycle(int control, const std::vector<std::vector<int>>& registers) {
    const int m = static_cast<int>(registers.size());
    if (m < 2) throw InvalidArgument("cycle needs at least two registers");
    const int n = static_cast<int>(registers[0].size());
    std::vector<int> targets{control};
    for (const auto& r : registers) {
      if (static_cast<int>(r.size()) != n) throw DimensionError("registers differ in size");
      targets.insert(targets.end(), r.begin(), r.end());
    }
    const int k = 1 + m * n;
    const Index reg_dim = dim_of(n);
    std::vector<Index> perm(std::size_t{1} << k);
    for (Index j = 0; j < static_cast<Index>(perm.size()); ++j) {
      const bool ctrl = (j >> (k - 1)) & 1;
      if (!ctrl) {
        perm[j] = j;
        continue;
      }
      Index out = Index{1} << (k - 1);
      for (int r = 0; r < m; ++r) {
        const Index content = (j >> ((m - 1 - r) * n)) & (reg_dim - 1);
        const int dest = (r + 1) % m;
        out |= content << ((m - 1 - dest) * n);
      }
      perm[j] = out;
    }
    GateOp g{Kind::ControlledPermutation, std::move(targets), {}, std::move(perm)};
    g.validate();
    return g;
  }

  bool is_permutation() const { return !permutation.empty(); }

  Matrix dense() const {
    if (!is_permutation()) return matrix;
    const Index d = static_cast<Index>(permutation.size());
    Matrix u = Matrix::Zero(d, d);
    for (Index j = 0; j < d; ++j) u(permutation[j], j) = 1.0;
    return u;
  }

  void validate() const {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i] < 0) throw DimensionError("negative qubit index");
      for (std::size_t j = i + 1; j < targets.size(); ++j)
        if (targets[i] == targets[j]) throw InvalidArgument("gate targets are not distinct");
    }
    const Index d = dim_of(static_cast<int>(targets.size()));
    if (is_permutation()) {
      if (static_cast<Index>(permutation.size()) != d) throw DimensionError("permutation size mismatch");
      std::vector<bool> seen(permutation.size(), false);
      for (Index p : permutation) {
        if (p < 0 || p >= d || seen[p]) throw InvalidArgument("not a permutation");
        seen[p] = true;
      }
      return;
    }
    if (matrix.rows() != d || matrix.cols() != d) throw DimensionError("gate matrix size mismatch");
    if (unitarity_residual(matrix) > Tolerances::unitary) throw InvalidArgument("gate matrix is not unitary");
  }
};

namespace ops {

inline void check_targets(int n, std::span<const int> targets) {
  for (int t : targets)
    if (t < 0 || t >= n) throw DimensionError("qubit index out of range");
}

inline bool is_involution(std::span<const Index> pi) {
  for (std::size_t i = 0; i < pi.size(); ++i)
    if (pi[pi[i]] != static_cast<Index>(i)) return false;
  return true;
}

// m <- G m G^dagger with every target shifted by `offset`.
inline void conjugate(Matrix& m, int n, const GateOp& g, int offset = 0) {
  std::vector<int> t(g.targets);
  for (int& q : t) q += offset;
  check_targets(n, t);
  if (g.kind == GateOp::Kind::SingleQubit) {
    conjugate_1q(m, n, t[0], g.matrix);
    return;
  }
  if (!g.is_permutation()) {
    left_kq(m, n, t, g.matrix);
    right_adj_kq(m, n, t, g.matrix);
    return;
  }
  const auto pi = lift_permutation(n, t, g.permutation);
  if (is_involution(pi)) {
    for (Index i = 0; i < m.rows(); ++i)
      if (pi[i] > i) m.row(i).swap(m.row(pi[i]));
    for (Index i = 0; i < m.cols(); ++i)
      if (pi[i] > i) m.col(i).swap(m.col(pi[i]));
    return;
  }
  left_perm(m, pi);
  right_adj_perm(m, pi);
}

// m <- m G^dagger (one-sided), used for signed-operator propagation.
inline void right_adjoint(Matrix& m, int n, const GateOp& g, int offset = 0) {
  std::vector<int> t(g.targets);
  for (int& q : t) q += offset;
  check_targets(n, t);
  if (!g.is_permutation()) {
    right_adj_kq(m, n, t, g.matrix);
    return;
  }
  right_adj_perm(m, lift_permutation(n, t, g.permutation));
}

inline void apply_kraus(Matrix& m, int n, const KrausChannel& ch, std::span<const int> targets) {
  check_targets(n, targets);
  if (static_cast<int>(targets.size()) != ch.num_qubits())
    throw DimensionError("channel qubit count does not match targets");
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  for (const auto& term : ch.terms()) {
    if (term.weight == 0.0) continue;
    Matrix tmp = m;
    left_kq(tmp, n, targets, term.op);
    right_adj_kq(tmp, n, targets, term.op);
    acc += term.weight * tmp;
  }
  m.swap(acc);
}

}  // namespace ops

inline DensityOperator apply_unitary(const DensityOperator& state, const GateOp& gate) {
  gate.validate();
  Matrix m = state.matrix();
  ops::conjugate(m, state.num_qubits(), gate);
  return DensityOperator(std::move(m), state.labels());
}

inline DensityOperator apply_channel(const DensityOperator& state, const KrausChannel& channel,
                                     const std::vector<int>& targets) {
  Matrix m = state.matrix();
  ops::apply_kraus(m, state.num_qubits(), channel, targets);
  return DensityOperator(std::move(m), state.labels());
}

inline Matrix partial_trace(const Matrix& m, int n, const std::vector<int>& keep) {
  if (keep.empty()) throw InvalidArgument("partial trace needs a nonempty keep set");
  ops::check_targets(n, keep);
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  if (traced.size() + keep.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("keep set has repeated qubits");
  const auto ko = ops::local_offsets(n, keep);
  const auto to = ops::local_offsets(n, traced);
  const Index dk = static_cast<Index>(ko.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index j = 0; j < dk; ++j)
    for (Index i = 0; i < dk; ++i) {
      cplx s = 0.0;
      for (Index t : to) s += m(ko[i] + t, ko[j] + t);
      out(i, j) = s;
    }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& state, const std::vector<int>& keep) {
  std::vector<std::string> labels;
  if (!state.labels().empty())
    for (int q : keep) labels.push_back(state.labels()[q]);
  return DensityOperator(partial_trace(state.matrix(), state.num_qubits(), keep), std::move(labels),
                         Tolerances::virtual_hermitian);
}

inline double expectation(const DensityOperator& state, const Matrix& observable,
                          const std::vector<int>& targets) {
  if (observable.rows() != dim_of(static_cast<int>(targets.size())) || observable.cols() != observable.rows())
    throw DimensionError("observable size does not match targets");
  if (hermiticity_residual(observable) > Tolerances::hermitian)
    throw InvalidArgument("observable is not Hermitian");
  const Matrix reduced = partial_trace(state.matrix(), state.num_qubits(), targets);
  const cplx v = (observable * reduced).trace();
  if (std::abs(v.imag()) > Tolerances::imaginary_part)
    throw InvalidArgument("expectation has a significant imaginary part");
  return v.real();
}

inline double expectation(const DensityOperator& state, const Matrix& observable) {
  std::vector<int> all(state.num_qubits());
  std::iota(all.begin(), all.end(), 0);
  return expectation(state, observable, all);
}

inline double von_neumann_entropy(const DensityOperator& state) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(state.hermitian_part(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l < -Tolerances::psd) throw InvalidArgument("state has a negative eigenvalue");
    if (l < Tolerances::entropy_clamp) continue;
    s -= l * std::log2(l);
  }
  return s;
}

inline DensityOperator choi_state(const KrausChannel& channel) {
  const int n = channel.num_qubits();
  const Vector phi = bell_vector(n);
  Matrix m = phi * phi.adjoint();
  std::vector<int> sys(n);
  std::iota(sys.begin(), sys.end(), 0);
  ops::apply_kraus(m, 2 * n, channel, sys);
  return DensityOperator(std::move(m));
}

}  // namespace vcplab
