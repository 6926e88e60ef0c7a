#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "vcplab/densesim.hpp"
#include "vcplab/pauli.hpp"

namespace vcplab {

// A gate followed by its noise: a one-qubit channel applied to each target, or a joint channel
// over all targets.
struct NoisyGate {
  GateOp gate;
  std::optional<PauliChannel> noise;
};

struct NoisyLayer {
  std::vector<NoisyGate> ops;
};

using Circuit = std::vector<NoisyLayer>;

struct GadgetNoise {
  PauliChannel cswap_noise = PauliChannel::identity(1);
  bool enabled = false;
  bool on_opening = true;
  bool on_closing = true;

  static GadgetNoise none() { return {}; }
  static GadgetNoise depolarizing(double rate) {
    GadgetNoise g;
    g.cswap_noise = vcplab::depolarizing(1, rate);
    g.enabled = rate > 0.0;
    return g;
  }
};

inline int circuit_width(const Circuit& c) {
  int n = 0;
  for (const auto& layer : c)
    for (const auto& op : layer.ops)
      for (int t : op.gate.targets) n = std::max(n, t + 1);
  return n;
}

namespace ops {

inline void apply_noisy_gate(Matrix& m, int n, const NoisyGate& g, int offset = 0) {
  conjugate(m, n, g.gate, offset);
  if (!g.noise) return;
  std::vector<int> t(g.gate.targets);
  for (int& q : t) q += offset;
  if (g.noise->num_qubits() == 1) {
    for (int q : t) apply_pauli_channel(m, n, *g.noise, std::span<const int>(&q, 1));
  } else {
    apply_pauli_channel(m, n, *g.noise, t);
  }
}

inline void apply_circuit(Matrix& m, int n, const Circuit& c, int offset = 0) {
  for (const auto& layer : c)
    for (const auto& op : layer.ops) apply_noisy_gate(m, n, op, offset);
}

}  // namespace ops

inline DensityOperator simulate(const Circuit& c, const DensityOperator& input) {
  if (circuit_width(c) > input.num_qubits()) throw DimensionError("circuit wider than state");
  Matrix m = input.matrix();
  ops::apply_circuit(m, input.num_qubits(), c);
  return DensityOperator(std::move(m), input.labels(), Tolerances::virtual_hermitian);
}

// Noise-free state-vector evolution.
inline Vector ideal_output(const Circuit& c, const Vector& psi) {
  const int n = qubits_of_dim(psi.size());
  if (circuit_width(c) > n) throw DimensionError("circuit wider than state");
  Matrix v = psi;
  for (const auto& layer : c)
    for (const auto& op : layer.ops) {
      const GateOp& g = op.gate;
      if (g.kind == GateOp::Kind::SingleQubit) {
        ops::left_1q(v, n, g.targets[0], g.matrix);
      } else if (g.is_permutation()) {
        ops::left_perm(v, ops::lift_permutation(n, g.targets, g.permutation));
      } else {
        ops::left_kq(v, n, g.targets, g.matrix);
      }
    }
  return v.col(0);
}

// Unnormalized Hermitian operator with denominator Tr(numerator).
class VirtualState {
 public:
  explicit VirtualState(Matrix numerator) : numerator_(std::move(numerator)) {
    if (numerator_.rows() != numerator_.cols()) throw DimensionError("numerator must be square");
    num_qubits_ = qubits_of_dim(numerator_.rows());
    if (hermiticity_residual(numerator_) > Tolerances::virtual_hermitian)
      throw InvalidArgument("virtual numerator is not Hermitian");
  }

  static VirtualState from_state(const DensityOperator& rho) { return VirtualState(rho.matrix()); }

  int num_qubits() const { return num_qubits_; }
  const Matrix& numerator() const { return numerator_; }
  double denominator() const { return numerator_.trace().real(); }
  bool degenerate() const { return std::abs(denominator()) < Tolerances::degenerate_denominator; }

  double numerator_expectation(const Matrix& o) const {
    if (o.rows() != numerator_.rows() || o.cols() != numerator_.cols())
      throw DimensionError("observable size mismatch");
    return (o * numerator_).trace().real();
  }

  std::optional<double> estimate(const Matrix& o) const {
    if (degenerate()) return std::nullopt;
    return numerator_expectation(o) / denominator();
  }

  Matrix normalized() const {
    if (degenerate()) throw DegenerateEstimator("virtual state denominator underflow");
    return numerator_ / denominator();
  }

 private:
  int num_qubits_ = 0;
  Matrix numerator_;
};

// Ancilla preparation and measurement for the generalized gadget.
struct AncillaSpec {
  std::optional<Matrix> sigma;       // default: maximally mixed
  std::optional<Matrix> observable;  // default: identity
};

namespace detail {

struct SwapStep {
  int reg_a;
  int reg_b;
  int qubit;
  bool noisy;
};

struct LayerStep {
  const NoisyGate* op;
};

using Step = std::variant<SwapStep, LayerStep>;

// Opening controlled M-cycle, transversal layer, closing inverse cycle. Each controlled cycle is
// a sequence of qubit-wise CSWAPs between adjacent registers; any CSWAP noise sits right after
// its CSWAP.
inline std::vector<Step> build_program(int n, int m, const Circuit& block, const GadgetNoise& noise,
                                       bool opening) {
  std::vector<Step> prog;
  if (opening)
    for (int j = 0; j + 1 < m; ++j)
      for (int k = 0; k < n; ++k) prog.push_back(SwapStep{j, j + 1, k, noise.enabled && noise.on_opening});
  for (const auto& layer : block)
    for (const auto& op : layer.ops) prog.push_back(LayerStep{&op});
  for (int j = m - 2; j >= 0; --j)
    for (int k = 0; k < n; ++k) prog.push_back(SwapStep{j, j + 1, k, noise.enabled && noise.on_closing});
  return prog;
}

inline void check_gadget_args(int n, int m, const Circuit& block, const AncillaSpec& anc) {
  if (m < 2) throw InvalidArgument("purification order must be at least 2");
  if (circuit_width(block) > n) throw DimensionError("layer acts outside the main register");
  const Index d = dim_of(n);
  if (anc.sigma) {
    if (anc.sigma->rows() != d || anc.sigma->cols() != d) throw DimensionError("ancilla state size mismatch");
    if (!DensityOperator(*anc.sigma).is_physical()) throw InvalidArgument("ancilla state is not physical");
  }
  if (anc.observable) {
    if (anc.observable->rows() != d || anc.observable->cols() != d)
      throw DimensionError("ancilla observable size mismatch");
    if (hermiticity_residual(*anc.observable) > Tolerances::hermitian)
      throw InvalidArgument("ancilla observable is not Hermitian");
  }
}

inline Matrix ancilla_sigma(int n, const AncillaSpec& anc) {
  const Index d = dim_of(n);
  return anc.sigma ? *anc.sigma : Matrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

// Control off-diagonal block B = rho_{01} over (ancillas, main). A controlled gate G maps
// B -> B G^dagger; a Pauli channel on the control maps B -> (pI - pZ) B + (pX - pY) B^dagger.
inline Matrix run_block(const Matrix& main_in, int n, int m, const Circuit& block, const GadgetNoise& noise,
                        const AncillaSpec& anc, bool opening) {
  check_gadget_args(n, m, block, anc);
  if (main_in.rows() != dim_of(n)) throw DimensionError("input register does not match layer");
  const int total = m * n;
  Matrix b = 0.5 * kron(kron_power(ancilla_sigma(n, anc), m - 1), main_in);
  const auto& cn = noise.cswap_noise;
  const double cu = cn.probability(PauliString::parse("I")) - cn.probability(PauliString::parse("Z"));
  const double cv = cn.probability(PauliString::parse("X")) - cn.probability(PauliString::parse("Y"));
  for (const Step& step : build_program(n, m, block, noise, opening)) {
    if (const auto* s = std::get_if<SwapStep>(&step)) {
      const int qa = s->reg_a * n + s->qubit, qb = s->reg_b * n + s->qubit;
      ops::right_swap(b, total, qa, qb);
      if (s->noisy) {
        if (cv != 0.0) {
          Matrix bd = b.adjoint();
          b = cu * b + cv * bd;
        } else if (cu != 1.0) {
          b *= cu;
        }
        ops::apply_pauli_channel(b, total, cn, std::span<const int>(&qa, 1));
        ops::apply_pauli_channel(b, total, cn, std::span<const int>(&qb, 1));
      }
    } else {
      const NoisyGate& op = *std::get<LayerStep>(step).op;
      for (int r = 0; r < m; ++r) ops::apply_noisy_gate(b, total, op, r * n);
    }
  }
  return b;
}

// Tr_anc[(S^{(x)(M-1)} (x) I) (B + B^dagger)].
inline Matrix contract_block(const Matrix& b, int n, int m, const AncillaSpec& anc) {
  const int total = m * n;
  Matrix y = b + b.adjoint();
  if (anc.observable) {
    for (int r = 0; r + 1 < m; ++r) {
      std::vector<int> t(n);
      std::iota(t.begin(), t.end(), r * n);
      ops::left_kq(y, total, t, *anc.observable);
    }
  }
  std::vector<int> keep(n);
  std::iota(keep.begin(), keep.end(), (m - 1) * n);
  return partial_trace(y, total, keep);
}

}  // namespace detail

// Literal simulation of the full register: control, M-1 ancilla copies, main, then `reference`
// untouched qubits appended after main. Returns the full operator.
inline Matrix run_full_register(const Matrix& main_in, int n, int m, const Circuit& block,
                                const GadgetNoise& noise, const AncillaSpec& anc = {}, bool opening = true,
                                int reference = 0) {
  detail::check_gadget_args(n, m, block, anc);
  if (main_in.rows() != dim_of(n + reference)) throw DimensionError("input register size mismatch");
  const int total = 1 + m * n + reference;
  const Matrix plus = DensityOperator::plus().matrix();
  Matrix rho = kron(kron(plus, kron_power(detail::ancilla_sigma(n, anc), m - 1)), main_in);
  const int ctrl = 0;
  for (const auto& step : detail::build_program(n, m, block, noise, opening)) {
    if (const auto* s = std::get_if<detail::SwapStep>(&step)) {
      const int qa = 1 + s->reg_a * n + s->qubit, qb = 1 + s->reg_b * n + s->qubit;
      ops::conjugate(rho, total, GateOp::cswap(ctrl, qa, qb));
      if (s->noisy)
        for (int q : {ctrl, qa, qb}) ops::apply_pauli_channel(rho, total, noise.cswap_noise, std::span<const int>(&q, 1));
    } else {
      const NoisyGate& op = *std::get<detail::LayerStep>(step).op;
      for (int r = 0; r < m; ++r) ops::apply_noisy_gate(rho, total, op, 1 + r * n);
    }
  }
  return rho;
}

// Tr_{control, ancillas}[(X (x) S^{(x)(M-1)} (x) I) rho_full].
inline Matrix contract_full_register(const Matrix& rho, int n, int m, const AncillaSpec& anc = {},
                                     int reference = 0) {
  const int total = 1 + m * n + reference;
  Matrix y = rho;
  ops::left_1q(y, total, 0, pauli_x());
  if (anc.observable) {
    for (int r = 0; r + 1 < m; ++r) {
      std::vector<int> t(n);
      std::iota(t.begin(), t.end(), 1 + r * n);
      ops::left_kq(y, total, t, *anc.observable);
    }
  }
  std::vector<int> keep(n + reference);
  std::iota(keep.begin(), keep.end(), 1 + (m - 1) * n);
  return partial_trace(y, total, keep);
}

struct PostSelectedOutput {
  Matrix output;  // unnormalized main (+ reference) operator on the control-+ branch
  double success_probability;
};

// Project the control on |+> and trace out the ancillas.
inline PostSelectedOutput post_select_plus(const Matrix& rho, int n, int m, int reference = 0) {
  const int total = 1 + m * n + reference;
  Matrix y = rho;
  const Mat2 h = hadamard();
  ops::conjugate_1q(y, total, 0, h);
  std::vector<int> keep{0};
  for (int q = 1 + (m - 1) * n; q < total; ++q) keep.push_back(q);
  const Matrix red = partial_trace(y, total, keep);
  const Index half = red.rows() / 2;
  Matrix out = red.topLeftCorner(half, half);
  return {out, out.trace().real()};
}

inline VirtualState generalized_gadget(const VirtualState& input, const Circuit& layer, const AncillaSpec& anc,
                                       int m = 2, const GadgetNoise& noise = {}, bool opening = true) {
  const int n = input.num_qubits();
  const Matrix b = detail::run_block(input.numerator(), n, m, layer, noise, anc, opening);
  return VirtualState(detail::contract_block(b, n, m, anc));
}

inline VirtualState vcp_virtual_apply(const VirtualState& input, const Circuit& layer, int m,
                                      const GadgetNoise& noise = {}) {
  return generalized_gadget(input, layer, {}, m, noise, true);
}

// Block sizes as even as possible; the first D mod L blocks get one extra layer.
inline std::vector<std::size_t> even_partition(std::size_t depth, std::size_t blocks) {
  if (blocks == 0 || blocks > depth) throw InvalidArgument("block count must be in [1, depth]");
  std::vector<std::size_t> out(blocks, depth / blocks);
  for (std::size_t i = 0; i < depth % blocks; ++i) ++out[i];
  return out;
}

inline VirtualState vcp_layered_run(const Circuit& circuit, const std::vector<std::size_t>& partition, int m,
                                    const GadgetNoise& noise, const VirtualState& input) {
  if (partition.empty()) throw InvalidArgument("empty partition");
  const std::size_t covered = std::accumulate(partition.begin(), partition.end(), std::size_t{0});
  if (covered != circuit.size()) throw InvalidArgument("partition does not cover the circuit");
  VirtualState state = input;
  std::size_t start = 0;
  for (std::size_t len : partition) {
    if (len == 0) throw InvalidArgument("empty block in partition");
    const Circuit block(circuit.begin() + static_cast<std::ptrdiff_t>(start),
                        circuit.begin() + static_cast<std::ptrdiff_t>(start + len));
    state = vcp_virtual_apply(state, block, m, noise);
    start += len;
  }
  return state;
}

struct VspResult {
  std::optional<double> estimate;
  VirtualState state;
};

// Two copies of the noisy output, one (optionally noisy) CSWAP layer, X on the control.
inline VspResult vsp_estimate(const Circuit& circuit, const DensityOperator& input, const GadgetNoise& noise,
                              const Matrix& observable) {
  const DensityOperator rho = simulate(circuit, input);
  AncillaSpec anc;
  anc.sigma = rho.matrix();
  GadgetNoise closing = noise;
  closing.on_closing = noise.enabled;
  const Matrix b = detail::run_block(rho.matrix(), rho.num_qubits(), 2, {}, closing, anc, false);
  VirtualState v(detail::contract_block(b, rho.num_qubits(), 2, anc));
  return {v.estimate(observable), v};
}

struct AncillaConditionReport {
  Matrix matrix;                // Tr(E_i U sigma U^dagger E_j^dagger S)
  double max_offdiagonal = 0.0;
  double identity_deviation = 0.0;       // target delta_ij
  double full_removal_deviation = 0.0;   // target delta_i0 delta_j0
  double verification_deviation = 0.0;   // target p_i delta_ij
};

inline AncillaConditionReport ancilla_condition_matrix(const Matrix& sigma, const Matrix& s,
                                                       const KrausChannel& kraus, const Matrix& u) {
  const Index d = dim_of(kraus.num_qubits());
  if (sigma.rows() != d || s.rows() != d || u.rows() != d) throw DimensionError("shape mismatch");
  const auto& terms = kraus.terms();
  const Index k = static_cast<Index>(terms.size());
  const Matrix rotated = u * sigma * u.adjoint();
  AncillaConditionReport r;
  r.matrix = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      const cplx v = (terms[i].op * rotated * terms[j].op.adjoint() * s).trace();
      r.matrix(i, j) = v;
      const double id = i == j ? 1.0 : 0.0;
      const double full = (i == 0 && j == 0) ? 1.0 : 0.0;
      const double ver = i == j ? terms[i].weight : 0.0;
      if (i != j) r.max_offdiagonal = std::max(r.max_offdiagonal, std::abs(v));
      r.identity_deviation = std::max(r.identity_deviation, std::abs(v - id));
      r.full_removal_deviation = std::max(r.full_removal_deviation, std::abs(v - full));
      r.verification_deviation = std::max(r.verification_deviation, std::abs(v - ver));
    }
  return r;
}

}  // namespace vcplab
