#pragma once

#include <bit>
#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vcplab/densesim.hpp"

namespace vcplab {

// N-qubit Pauli operator X^x Z^z per qubit, phase dropped. Bit q of each mask is qubit q,
// which is the q-th character of the label.
class PauliString {
 public:
  PauliString() = default;
  PauliString(int n, std::uint64_t x, std::uint64_t z) : n_(n), x_(x), z_(z) {
    if (n < 0 || n > 32) throw InvalidArgument("Pauli string length out of range");
    const std::uint64_t mask = n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n));
    if ((x & ~mask) || (z & ~mask)) throw InvalidArgument("Pauli mask exceeds qubit count");
  }

  static PauliString identity(int n) { return {n, 0, 0}; }

  static PauliString single(int n, int q, char p) {
    if (q < 0 || q >= n) throw DimensionError("qubit index out of range");
    const std::uint64_t b = std::uint64_t{1} << q;
    switch (p) {
      case 'I': return {n, 0, 0};
      case 'X': return {n, b, 0};
      case 'Y': return {n, b, b};
      case 'Z': return {n, 0, b};
      default: throw InvalidArgument(std::string("unknown Pauli letter: ") + p);
    }
  }

  static PauliString parse(std::string_view label) {
    const int n = static_cast<int>(label.size());
    std::uint64_t x = 0, z = 0;
    for (int q = 0; q < n; ++q) {
      const PauliString s = single(n, q, label[q]);
      x |= s.x_;
      z |= s.z_;
    }
    return {n, x, z};
  }

  int num_qubits() const { return n_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }

  char letter(int q) const {
    const bool x = (x_ >> q) & 1U, z = (z_ >> q) & 1U;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  std::string label() const {
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) s[q] = letter(q);
    return s;
  }

  bool commutes_with(const PauliString& o) const {
    check_same(o);
    return ((std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_)) & 1) == 0;
  }

  PauliString operator*(const PauliString& o) const {
    check_same(o);
    return {n_, x_ ^ o.x_, z_ ^ o.z_};
  }

  // Tensor product: this on the first qubits, o on the following ones.
  PauliString concat(const PauliString& o) const {
    return {n_ + o.n_, x_ | (o.x_ << n_), z_ | (o.z_ << n_)};
  }

  Matrix matrix() const {
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < n_; ++q) {
      switch (letter(q)) {
        case 'I': m = kron(m, Matrix::Identity(2, 2)); break;
        case 'X': m = kron(m, Matrix(pauli_x())); break;
        case 'Y': m = kron(m, Matrix(pauli_y())); break;
        default: m = kron(m, Matrix(pauli_z())); break;
      }
    }
    return m;
  }

  // Masks in the full-index convention of ops:: for a register of n_total qubits.
  std::pair<Index, Index> full_masks(int n_total, std::span<const int> targets) const {
    if (static_cast<int>(targets.size()) != n_) throw DimensionError("target count mismatch");
    Index xm = 0, zm = 0;
    for (int q = 0; q < n_; ++q) {
      if ((x_ >> q) & 1U) xm |= ops::bit(n_total, targets[q]);
      if ((z_ >> q) & 1U) zm |= ops::bit(n_total, targets[q]);
    }
    return {xm, zm};
  }

  auto operator<=>(const PauliString&) const = default;

 private:
  void check_same(const PauliString& o) const {
    if (n_ != o.n_) throw DimensionError("Pauli strings differ in length");
  }

  int n_ = 0;
  std::uint64_t x_ = 0, z_ = 0;
};

inline std::vector<PauliString> all_paulis(int n) {
  if (n > 8) throw InvalidArgument("too many qubits to enumerate Paulis");
  std::vector<PauliString> out;
  const std::uint64_t d = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < d; ++x)
    for (std::uint64_t z = 0; z < d; ++z) out.emplace_back(n, x, z);
  return out;
}

class PauliChannel {
 public:
  using Map = std::map<PauliString, double>;

  PauliChannel() : probs_{{PauliString(), 1.0}} {}

  PauliChannel(int n, Map probs, double sum_tol = Tolerances::probability_sum) : n_(n) {
    double total = 0.0;
    for (const auto& [p, w] : probs) {
      if (p.num_qubits() != n) throw DimensionError("Pauli label length does not match channel");
      if (!(w >= 0.0)) throw InvalidChannel("negative or NaN Pauli probability");
      total += w;
      if (w > 0.0) probs_.emplace(p, w);
    }
    if (std::abs(total - 1.0) > sum_tol) throw InvalidChannel("Pauli probabilities do not sum to 1");
  }

  static PauliChannel identity(int n) { return PauliChannel(n, {{PauliString::identity(n), 1.0}}); }

  // Lines of `<label> <probability>`; blank lines and '#' comments are skipped.
  static PauliChannel parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    Map probs;
    int n = -1;
    while (std::getline(in, line)) {
      if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
      std::istringstream ls(line);
      std::string label;
      double w = 0.0;
      if (!(ls >> label)) continue;
      if (!(ls >> w)) throw InvalidArgument("missing probability for Pauli " + label);
      std::string extra;
      if (ls >> extra) throw InvalidArgument("trailing text after probability for " + label);
      const PauliString p = PauliString::parse(label);
      if (n >= 0 && p.num_qubits() != n) throw DimensionError("inconsistent Pauli label lengths");
      n = p.num_qubits();
      if (!probs.emplace(p, w).second) throw InvalidArgument("duplicate Pauli " + label);
    }
    if (n < 0) throw InvalidArgument("empty Pauli channel description");
    return PauliChannel(n, std::move(probs));
  }

  std::string serialize() const {
    std::string out;
    char buf[64];
    for (const auto& [p, w] : probs_) {
      std::snprintf(buf, sizeof buf, " %.17g\n", w);
      out += p.label() + buf;
    }
    return out;
  }

  int num_qubits() const { return n_; }
  const Map& probabilities() const { return probs_; }

  double probability(const PauliString& p) const {
    const auto it = probs_.find(p);
    return it == probs_.end() ? 0.0 : it->second;
  }

  double identity_weight() const { return probability(PauliString::identity(n_)); }

  bool is_identity_dominant() const {
    const double p0 = identity_weight();
    for (const auto& [p, w] : probs_)
      if (!p.is_identity() && w >= p0) return false;
    return true;
  }

 private:
  int n_ = 0;
  Map probs_;
};

inline double max_abs_diff(const PauliChannel& a, const PauliChannel& b) {
  if (a.num_qubits() != b.num_qubits()) throw DimensionError("channels differ in size");
  double worst = 0.0;
  for (const auto& [p, w] : a.probabilities()) worst = std::max(worst, std::abs(w - b.probability(p)));
  for (const auto& [p, w] : b.probabilities()) worst = std::max(worst, std::abs(w - a.probability(p)));
  return worst;
}

inline double p_m(const PauliChannel& c, int m) {
  if (m < 1) throw InvalidArgument("purification order must be at least 1");
  double s = 0.0;
  for (const auto& [p, w] : c.probabilities()) s += std::pow(w, m);
  return s;
}

inline PauliChannel purify(const PauliChannel& c, int m) {
  if (m < 1) throw InvalidArgument("purification order must be at least 1");
  if (m == 1) return c;
  const double pm = p_m(c, m);
  PauliChannel::Map out;
  for (const auto& [p, w] : c.probabilities()) out.emplace(p, std::pow(w, m) / pm);
  return PauliChannel(c.num_qubits(), std::move(out), 1e-12);
}

inline PauliChannel depolarizing(int n, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("depolarizing probability out of range");
  const double each = prob / std::pow(4.0, n);
  PauliChannel::Map out;
  for (const auto& p : all_paulis(n)) out.emplace(p, p.is_identity() ? 1.0 - prob * (1.0 - std::pow(4.0, -n)) : each);
  return PauliChannel(n, std::move(out));
}

inline PauliChannel tensor(const PauliChannel& a, const PauliChannel& b) {
  PauliChannel::Map out;
  for (const auto& [pa, wa] : a.probabilities())
    for (const auto& [pb, wb] : b.probabilities()) out.emplace(pa.concat(pb), wa * wb);
  return PauliChannel(a.num_qubits() + b.num_qubits(), std::move(out), 1e-11);
}

// `first` then `second`.
inline PauliChannel compose(const PauliChannel& first, const PauliChannel& second) {
  if (first.num_qubits() != second.num_qubits()) throw DimensionError("channels differ in size");
  PauliChannel::Map out;
  for (const auto& [pa, wa] : first.probabilities())
    for (const auto& [pb, wb] : second.probabilities()) out[pa * pb] += wa * wb;
  return PauliChannel(first.num_qubits(), std::move(out), 1e-11);
}

struct PostSelection {
  PauliChannel channel;
  double success_probability;
};

// (E + P_M E^(M)) / (1 + P_M) with p_+ = (1 + P_M)/2.
inline PostSelection post_selected(const PauliChannel& c, int m) {
  if (m < 2) throw InvalidArgument("post-selection needs M >= 2");
  const double pm = p_m(c, m);
  PauliChannel::Map out;
  for (const auto& [p, w] : c.probabilities()) out.emplace(p, (w + std::pow(w, m)) / (1.0 + pm));
  return {PauliChannel(c.num_qubits(), std::move(out), 1e-12), (1.0 + pm) / 2.0};
}

inline KrausChannel to_kraus(const PauliChannel& c) {
  std::vector<KrausTerm> terms;
  for (const auto& [p, w] : c.probabilities()) terms.push_back({w, p.matrix()});
  return KrausChannel(c.num_qubits(), std::move(terms));
}

// p_Q = sum_i p_i |Tr(Q E_i)|^2 / 4^N.
inline PauliChannel twirl(const KrausChannel& k) {
  const int n = k.num_qubits();
  const double d = static_cast<double>(dim_of(n));
  PauliChannel::Map out;
  for (const auto& q : all_paulis(n)) {
    const Matrix qm = q.matrix();
    double w = 0.0;
    for (const auto& t : k.terms()) w += t.weight * std::norm(qm.cwiseProduct(t.op.transpose()).sum()) / (d * d);
    if (w > 1e-15) out.emplace(q, w);
  }
  return PauliChannel(n, std::move(out), Tolerances::kraus);
}

namespace ops {

inline void apply_pauli_channel(Matrix& m, int n, const PauliChannel& c, std::span<const int> targets) {
  check_targets(n, targets);
  if (static_cast<int>(targets.size()) != c.num_qubits())
    throw DimensionError("channel qubit count does not match targets");
  if (c.num_qubits() == 1) {
    pauli_channel_1q(m, n, targets[0], c.probability(PauliString::parse("I")),
                     c.probability(PauliString::parse("X")), c.probability(PauliString::parse("Y")),
                     c.probability(PauliString::parse("Z")));
    return;
  }
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  for (const auto& [p, w] : c.probabilities()) {
    const auto [xm, zm] = p.full_masks(n, targets);
    acc += w * pauli_conjugate(m, xm, zm);
  }
  m.swap(acc);
}

}  // namespace ops

inline DensityOperator apply_channel(const DensityOperator& state, const PauliChannel& channel,
                                     const std::vector<int>& targets) {
  Matrix m = state.matrix();
  ops::apply_pauli_channel(m, state.num_qubits(), channel, targets);
  return DensityOperator(std::move(m), state.labels());
}

inline DensityOperator choi_state(const PauliChannel& channel) {
  const int n = channel.num_qubits();
  const Vector phi = bell_vector(n);
  Matrix m = phi * phi.adjoint();
  std::vector<int> sys(n);
  std::iota(sys.begin(), sys.end(), 0);
  ops::apply_pauli_channel(m, 2 * n, channel, sys);
  return DensityOperator(std::move(m));
}

}  // namespace vcplab
