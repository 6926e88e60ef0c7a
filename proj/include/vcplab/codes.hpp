#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vcplab/gadgets.hpp"
#include "vcplab/pauli.hpp"

namespace vcplab {

using Syndrome = std::uint64_t;  // bit k is the outcome of generator k

class StabilizerCode {
 public:
  StabilizerCode(std::vector<PauliString> generators, std::map<Syndrome, PauliString> table)
      : generators_(std::move(generators)), table_(std::move(table)) {
    if (generators_.empty()) throw InvalidArgument("code needs at least one generator");
    if (generators_.size() > 32) throw InvalidArgument("too many generators");
    n_ = generators_[0].num_qubits();
    for (const auto& g : generators_) {
      if (g.num_qubits() != n_) throw DimensionError("generators differ in length");
      if (g.is_identity()) throw InvalidArgument("identity generator");
    }
    for (std::size_t i = 0; i < generators_.size(); ++i)
      for (std::size_t j = i + 1; j < generators_.size(); ++j)
        if (!generators_[i].commutes_with(generators_[j])) throw InvalidArgument("generators do not commute");
    projector_ = syndrome_projector(0);
    const double code_dim = static_cast<double>(dim_of(n_)) / std::ldexp(1.0, static_cast<int>(generators_.size()));
    if (std::abs(projector_.trace().real() - code_dim) > 1e-9) throw InvalidArgument("generators are not independent");
    if (max_abs_diff(projector_ * projector_, projector_) > 1e-12) throw InvalidArgument("code projector is not idempotent");
    for (const auto& [s, e] : table_) {
      if (e.num_qubits() != n_) throw DimensionError("correction length mismatch");
      if (syndrome(e) != s) throw InvalidArgument("correction " + e.label() + " does not produce its syndrome");
    }
    if (!table_.count(0)) table_.emplace(0, PauliString::identity(n_));
  }

  // Generator lines and optional `correct <label>` lines; without corrections the table holds a
  // minimum-weight representative per syndrome (ties broken by label order).
  static StabilizerCode parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<PauliString> gens;
    std::vector<PauliString> corrections;
    while (std::getline(in, line)) {
      if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
      std::istringstream ls(line);
      std::string word;
      if (!(ls >> word)) continue;
      if (word == "correct") {
        std::string label;
        if (!(ls >> label)) throw InvalidArgument("missing correction label");
        corrections.push_back(PauliString::parse(label));
      } else {
        gens.push_back(PauliString::parse(word));
      }
    }
    if (gens.empty()) throw InvalidArgument("no generators in code description");
    StabilizerCode probe(gens, {});
    std::map<Syndrome, PauliString> table;
    if (corrections.empty()) {
      table = probe.min_weight_table();
    } else {
      for (const auto& c : corrections)
        if (!table.emplace(probe.syndrome(c), c).second)
          throw InvalidArgument("two corrections share a syndrome");
    }
    return StabilizerCode(std::move(gens), std::move(table));
  }

  int num_qubits() const { return n_; }
  const std::vector<PauliString>& generators() const { return generators_; }
  const Matrix& projector() const { return projector_; }
  const std::map<Syndrome, PauliString>& syndrome_table() const { return table_; }
  int num_generators() const { return static_cast<int>(generators_.size()); }

  Syndrome syndrome(const PauliString& e) const {
    Syndrome s = 0;
    for (std::size_t k = 0; k < generators_.size(); ++k)
      if (!generators_[k].commutes_with(e)) s |= Syndrome{1} << k;
    return s;
  }

  // prod_k (I + (-1)^{s_k} g_k) / 2
  Matrix syndrome_projector(Syndrome s) const {
    const Index d = dim_of(n_);
    Matrix p = Matrix::Identity(d, d);
    for (std::size_t k = 0; k < generators_.size(); ++k) {
      const double sign = ((s >> k) & 1U) ? -1.0 : 1.0;
      p = p * (Matrix::Identity(d, d) + sign * generators_[k].matrix()) / 2.0;
    }
    return p;
  }

  const PauliString& correction(Syndrome s) const {
    const auto it = table_.find(s);
    if (it == table_.end()) throw UnknownSyndrome("syndrome outside the correction table");
    return it->second;
  }

  // Normalized first nonzero column of the code projector.
  Vector code_vector() const {
    for (Index c = 0; c < projector_.cols(); ++c) {
      const double nrm = projector_.col(c).norm();
      if (nrm > 1e-8) return projector_.col(c) / nrm;
    }
    throw InvalidArgument("empty code space");
  }

  Matrix code_state() const {
    const Vector v = code_vector();
    return v * v.adjoint();
  }

 private:
  std::map<Syndrome, PauliString> min_weight_table() const {
    std::vector<PauliString> all = all_paulis(n_);
    std::sort(all.begin(), all.end(), [](const PauliString& a, const PauliString& b) {
      if (a.weight() != b.weight()) return a.weight() < b.weight();
      return a.label() < b.label();
    });
    std::map<Syndrome, PauliString> table;
    for (const auto& p : all) table.emplace(syndrome(p), p);
    return table;
  }

  int n_ = 0;
  std::vector<PauliString> generators_;
  Matrix projector_;
  std::map<Syndrome, PauliString> table_;
};

inline StabilizerCode repetition_code(int n) {
  if (n < 3 || n % 2 == 0) throw InvalidArgument("repetition code needs odd n >= 3");
  std::vector<PauliString> gens;
  for (int i = 0; i + 1 < n; ++i) gens.push_back(PauliString::single(n, i, 'Z') * PauliString::single(n, i + 1, 'Z'));
  StabilizerCode probe(gens, {});
  std::map<Syndrome, PauliString> table;
  for (int q = 0; q < n; ++q) {
    const PauliString x = PauliString::single(n, q, 'X');
    table.emplace(probe.syndrome(x), x);
  }
  return StabilizerCode(std::move(gens), std::move(table));
}

struct KnillLaflammeReport {
  bool pass = false;
  Matrix residual;  // entry (i,j): max |Pi E_j^dagger E_i Pi - delta_ij Pi|
  double max_residual = 0.0;
};

inline KnillLaflammeReport kl_check(const StabilizerCode& code, const std::vector<Matrix>& ops) {
  const Matrix& pi = code.projector();
  const Index k = static_cast<Index>(ops.size());
  KnillLaflammeReport r;
  r.residual = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    if (ops[i].rows() != pi.rows()) throw DimensionError("operator size does not match code");
    for (Index j = 0; j < k; ++j) {
      const Matrix m = pi * ops[j].adjoint() * ops[i] * pi - (i == j ? 1.0 : 0.0) * pi;
      const double v = m.cwiseAbs().maxCoeff();
      r.residual(i, j) = v;
      r.max_residual = std::max(r.max_residual, v);
    }
  }
  r.pass = r.max_residual < Tolerances::knill_laflamme;
  return r;
}

inline KnillLaflammeReport kl_check(const StabilizerCode& code, const std::vector<PauliString>& errors) {
  std::vector<Matrix> ops;
  for (const auto& e : errors) ops.push_back(e.matrix());
  return kl_check(code, ops);
}

struct SyndromeBranch {
  Syndrome syndrome;
  double probability;
  Matrix state;  // unnormalized projected operator
  PauliString correction;
};

// Exhaustive projective branches; branches whose projected operator vanishes are dropped.
inline std::vector<SyndromeBranch> measure_syndrome_and_correct(const Matrix& state, const StabilizerCode& code) {
  if (state.rows() != dim_of(code.num_qubits())) throw DimensionError("state does not match code");
  std::vector<SyndromeBranch> out;
  const Syndrome count = Syndrome{1} << code.num_generators();
  for (Syndrome s = 0; s < count; ++s) {
    const Matrix p = code.syndrome_projector(s);
    Matrix proj = p * state * p;
    if (proj.cwiseAbs().maxCoeff() < 1e-12) continue;
    out.push_back({s, proj.trace().real(), std::move(proj), code.correction(s)});
  }
  return out;
}

struct QecMergeResult {
  Matrix output;
  double sampling_factor;
  std::vector<std::pair<Syndrome, Matrix>> branches;  // per-syndrome contribution before correction
};

// M = 2 gadget with the code state as ancilla. Stabilizers are measured on the ancilla register and
// the syndrome-indexed correction is applied to the main register. With `post_select`, only the
// trivial syndrome is kept and no correction is applied.
inline QecMergeResult qec_merge_run(const Matrix& rho, const StabilizerCode& code, const PauliChannel& noise,
                                    const GadgetNoise& gadget_noise = {}, bool post_select = false) {
  const int n = code.num_qubits();
  if (noise.num_qubits() != n) throw DimensionError("noise does not act on the code register");
  std::vector<PauliString> support;
  for (const auto& [p, w] : noise.probabilities()) support.push_back(p);
  if (!kl_check(code, support).pass) throw InvalidArgument("noise support fails the Knill-Laflamme check");
  for (const auto& p : support) {
    const PauliString& c = code.correction(code.syndrome(p));
    if (c != p) throw UnknownSyndrome("noise term " + p.label() + " is not the tabulated correction");
  }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const Index d = dim_of(n);
  Circuit layer{NoisyLayer{{NoisyGate{GateOp::unitary(all, Matrix::Identity(d, d)), noise}}}};
  AncillaSpec anc;
  anc.sigma = code.code_state();
  const Matrix b = detail::run_block(rho, n, 2, layer, gadget_noise, anc, true);
  const Matrix y = b + b.adjoint();
  std::vector<int> main(n), ancq(n);
  std::iota(main.begin(), main.end(), n);
  std::iota(ancq.begin(), ancq.end(), 0);
  QecMergeResult r;
  r.output = Matrix::Zero(d, d);
  const Syndrome count = Syndrome{1} << code.num_generators();
  for (Syndrome s = 0; s < count; ++s) {
    if (post_select && s != 0) continue;
    Matrix ys = y;
    ops::left_kq(ys, 2 * n, ancq, code.syndrome_projector(s));
    Matrix t = partial_trace(ys, 2 * n, main);
    if (t.cwiseAbs().maxCoeff() < 1e-14) continue;
    r.branches.emplace_back(s, t);
    if (!post_select) {
      const Matrix e = code.correction(s).matrix();
      t = e * t * e.adjoint();
    }
    r.output += t;
  }
  const double ratio = r.output.trace().real() / rho.trace().real();
  r.sampling_factor = 1.0 / (ratio * ratio);
  return r;
}

}  // namespace vcplab
