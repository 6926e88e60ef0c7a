#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vcplab/experiments.hpp"

namespace vcplab {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationOptions {
  int seeds = 20;
  int threads = 1;
  std::uint64_t seed = 2024;
};

namespace validation {

inline std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Reference operators built letter by letter, independent of PauliString::matrix.
inline Matrix pauli_from_label(const std::string& label) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : label) {
    Matrix s = Matrix::Identity(2, 2);
    if (c == 'X') s << 0, 1, 1, 0;
    if (c == 'Y') s << 0, cplx(0, -1), cplx(0, 1), 0;
    if (c == 'Z') s << 1, 0, 0, -1;
    m = kron(m, s);
  }
  return m;
}

inline std::vector<std::string> labels_of(int n) {
  std::vector<std::string> out{""};
  for (int q = 0; q < n; ++q) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(s + c);
    out = next;
  }
  return out;
}

// Identity weight in [0.5, 0.95]; the remainder spread with exponential weights.
inline std::vector<double> random_identity_dominant(int n, std::mt19937_64& rng) {
  const auto labels = labels_of(n);
  std::uniform_real_distribution<double> u(0.5, 0.95);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(labels.size());
  p[0] = u(rng);
  double rest = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) rest += (p[i] = e(rng));
  for (std::size_t i = 1; i < p.size(); ++i) p[i] *= (1.0 - p[0]) / rest;
  return p;
}

inline PauliChannel to_channel(int n, const std::vector<double>& p) {
  const auto labels = labels_of(n);
  PauliChannel::Map m;
  for (std::size_t i = 0; i < labels.size(); ++i) m.emplace(PauliString::parse(labels[i]), p[i]);
  return PauliChannel(n, std::move(m), 1e-12);
}

inline double depolarizing_identity(int n, double P) { return 1.0 - P + P / std::pow(4.0, n); }

}  // namespace validation

inline CriterionResult validate_gadget_oracle(std::uint64_t seed = 11) {
  using namespace validation;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 1);
  double worst_block = 0.0, worst_full = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + pick(rng), m = 2 + pick(rng);
    const auto p = random_identity_dominant(n, rng);
    const auto labels = labels_of(n);
    const Matrix u = haar_unitary(n, rng);
    const Matrix rho = random_density_matrix(n, rng);
    std::uniform_int_distribution<std::size_t> lp(1, labels.size() - 1);
    const Matrix o = pauli_from_label(labels[lp(rng)]);
    const Matrix r1 = u * rho * u.adjoint();
    Matrix num = Matrix::Zero(r1.rows(), r1.cols());
    double den = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Matrix e = pauli_from_label(labels[i]);
      num += std::pow(p[i], m) * e * r1 * e.adjoint();
      den += std::pow(p[i], m);
    }
    const double expected = (o * num).trace().real() / den;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Circuit layer{NoisyLayer{{NoisyGate{GateOp::unitary(all, u), to_channel(n, p)}}}};
    const VirtualState v = vcp_virtual_apply(VirtualState(rho), layer, m);
    worst_block = std::max(worst_block, std::abs(*v.estimate(o) - expected));
    const Matrix full = run_full_register(rho, n, m, layer, {});
    const Matrix c = contract_full_register(full, n, m);
    const double est = (o * c).trace().real() / c.trace().real();
    worst_full = std::max(worst_full, std::abs(est - expected));
  }
  const double worst = std::max(worst_block, worst_full);
  return {"gadget_oracle_equivalence", worst <= 1e-10,
          fmt("100 trials, max |err| block=%.3g full=%.3g (tol 1e-10)", worst_block, worst_full)};
}

inline CriterionResult validate_postselected_channel() {
  using namespace validation;
  double worst_choi = 0.0, worst_p = 0.0;
  for (double P : {0.1, 2.0 / 3.0})
    for (int m : {2, 3}) {
      const std::vector<std::string> labels = labels_of(1);
      std::vector<double> p{depolarizing_identity(1, P), P / 4, P / 4, P / 4};
      double pm = 0.0;
      for (double x : p) pm += std::pow(x, m);
      const Vector phi = bell_vector(1);
      const Matrix bell = phi * phi.adjoint();
      Matrix expected = Matrix::Zero(4, 4);
      for (std::size_t i = 0; i < 4; ++i) {
        const Matrix e = kron(pauli_from_label(labels[i]), Matrix::Identity(2, 2));
        expected += (p[i] + std::pow(p[i], m)) / (1.0 + pm) * e * bell * e.adjoint();
      }
      const Circuit layer{NoisyLayer{{NoisyGate{GateOp::unitary({0}, Matrix::Identity(2, 2)), to_channel(1, p)}}}};
      const Matrix full = run_full_register(bell, 1, m, layer, {}, {}, true, 1);
      const PostSelectedOutput out = post_select_plus(full, 1, m, 1);
      worst_choi = std::max(worst_choi, max_abs_diff(out.output / out.success_probability, expected));
      worst_p = std::max(worst_p, std::abs(out.success_probability - (1.0 + pm) / 2.0));
    }
  return {"postselected_channel_equivalence", worst_choi <= 1e-10 && worst_p <= 1e-12,
          fmt("max Choi diff %.3g (tol 1e-10), max |p+ - (1+P_M)/2| %.3g (tol 1e-12)", worst_choi, worst_p)};
}

inline CriterionResult validate_suppression_ratio() {
  using namespace validation;
  const double P = 0.1;
  const int m = 2;
  bool pass = true;
  std::string detail;
  for (int n : {1, 2}) {
    // Channel side through the library.
    const PauliChannel c = depolarizing(n, P);
    const double before_c = 1.0 - c.identity_weight();
    const double after_c = 1.0 - purify(c, m).identity_weight();
    // State side: M-th power of a noisy pure state.
    const Vector psi = zero_state(n);
    const Index d = dim_of(n);
    const Matrix rho = (1.0 - P) * psi * psi.adjoint() + P / static_cast<double>(d) * Matrix::Identity(d, d);
    const Matrix rm = rho * rho;
    const double before_s = 1.0 - (psi.adjoint() * rho * psi)(0, 0).real();
    const double after_s = 1.0 - (psi.adjoint() * rm * psi)(0, 0).real() / rm.trace().real();
    const double ratio = (before_c / after_c) / (before_s / after_s);
    // Exact arithmetic on the eigenvalue and Pauli weights.
    const double q4 = std::pow(4.0, n), q2 = std::pow(2.0, n);
    const double p0 = 1 - P + P / q4, pe = P / q4, s0 = 1 - P + P / q2, se = P / q2;
    const double sc = (1 - p0) / ((q4 - 1) * pe * pe / (p0 * p0 + (q4 - 1) * pe * pe));
    const double ss = (1 - s0) / ((q2 - 1) * se * se / (s0 * s0 + (q2 - 1) * se * se));
    const double target = std::pow(2.0, n * (m - 1));
    const bool ok = std::abs(ratio - sc / ss) < 1e-9 && std::abs(ratio - target) <= 0.1 * target;
    pass = pass && ok;
    detail += fmt("N=%d ratio=%.4f exact=%.4f target=%g; ", n, ratio, sc / ss, target);
  }
  return {"suppression_factor_ratio", pass, detail + "(tol 10%)"};
}

inline CriterionResult validate_qec_merge(std::uint64_t seed = 5) {
  ExperimentConfig c;
  c.experiment = "qec-merge";
  c.seed = seed;
  c.samples = 10;
  std::map<std::string, double> v;
  for (const auto& r : detail::run_qec_merge(c)) v[r.metric] = r.value;
  const bool pass = std::abs(v["output_scale_expected"] - 0.52) < 1e-12 && v["max_diff_merge"] <= 1e-10 &&
                    std::abs(v["postselect_scale_expected"] - 0.49) < 1e-12 && v["max_diff_postselect"] <= 1e-10 &&
                    std::abs(v["sampling_factor_merge"] - 1.0 / (0.52 * 0.52)) <= 1e-9 &&
                    std::abs(v["sampling_factor_postselect"] - 1.0 / (0.49 * 0.49)) <= 1e-9;
  return {"qec_merge_repetition_code", pass,
          validation::fmt("max diff 0.52*rho %.3g, 0.49*rho %.3g; factors %.10f %.10f (targets %.10f %.10f)",
                          v["max_diff_merge"], v["max_diff_postselect"], v["sampling_factor_merge"],
                          v["sampling_factor_postselect"], 1.0 / (0.52 * 0.52), 1.0 / (0.49 * 0.49))};
}

inline CriterionResult validate_variance_mc(std::uint64_t seed = 7) {
  ExperimentConfig c;
  c.experiment = "variance-mc";
  c.shots = 100000;
  c.seed = seed;
  c.bootstrap = 400;
  std::map<std::string, ResultRow> v;
  for (const auto& r : detail::run_variance_mc(c)) v[r.metric] = r;
  const double k = 1e5;
  const double target = 0.5813 / k;
  const double emp = v["mc_variance_bootstrap"].value, se = v["mc_variance_bootstrap"].stderr_.value_or(0.0);
  const bool pass = std::abs(emp - target) <= 3.0 * se;
  return {"variance_formula_monte_carlo", pass,
          validation::fmt("bootstrap variance %.4g +- %.2g vs 0.5813/K = %.4g (formula %.6f/K, delta %.4g)", emp,
                          se, target, v["variance_formula"].value * k, v["mc_variance_delta"].value)};
}

inline CriterionResult validate_budget() {
  int valid = 0, agree = 0, raw_agree = 0;
  for (int i = 0; i < 50; ++i) {
    const double lam = 0.5 + 4.5 * i / 49.0;
    for (double alpha : {1.0, 5.0})
      for (double nc : {4.0, 255.0})
        for (int d : {80, 240}) {
          const BudgetParams b = BudgetParams::from_lambda(lam, d, alpha, 2, nc, 1.0);
          const OptimalLayers ol = optimal_layers(b);
          if (!ol.closed_form) continue;
          ++valid;
          if (std::abs(*ol.closed_form_checked - ol.numeric) <= 1) ++agree;
          if (std::abs(std::lround(*ol.closed_form) - ol.numeric) <= 1) ++raw_agree;
        }
  }
  const double root = circuit_threshold(2);
  const bool pass = valid >= 100 && agree == valid && std::abs(root - 1.2564) <= 1e-3;
  return {"budget_optimizer", pass,
          validation::fmt("%d valid points, regime-checked closed form within +-1 at %d (unchecked %d); root %.5f",
                          valid, agree, raw_agree, root)};
}

inline CriterionResult validate_fig3b(const ValidationOptions& opt = {}) {
  ExperimentConfig c;
  c.experiment = "fig3b";
  c.N = 4;
  c.D = {240};
  c.p = {0.005};
  c.cswap_noise = false;
  c.layer_depth = 20;
  for (int i = 0; i < opt.seeds; ++i) c.seeds.push_back(opt.seed + i);
  std::map<std::string, ResultRow> v;
  for (const auto& r : run_experiment(c, opt.threads)) v[r.metric] = r;
  const auto& vcp = v["infid_vcp"];
  const auto& vsp = v["infid_vsp"];
  const bool pass = vcp.error.empty() && vsp.error.empty() && vcp.value <= 0.05 && vsp.value >= 0.5;
  return {"fig3b_layered_vcp_vs_vsp", pass,
          validation::fmt("D=240: VCP %.4f (<= 0.05), VSP %.4f (>= 0.5), raw %.4f, %d seeds", vcp.value, vsp.value,
                          v["infid_raw"].value, opt.seeds)};
}

inline CriterionResult validate_fig3cfg(const ValidationOptions& opt = {}) {
  ExperimentConfig c;
  c.experiment = "fig3fg";
  c.N = 4;
  c.D = {80};
  c.p = {0.002, 0.005, 0.01, 0.02};
  c.alpha = 5.0;
  c.L = {1, 2, 3, 4, 5};
  for (int i = 0; i < opt.seeds; ++i) c.seeds.push_back(opt.seed + 1000 + i);
  const auto rows = run_experiment(c, opt.threads);
  bool single_ok = true, ratio_ok = true;
  double peak = 0.0;
  std::string detail;
  for (double p : c.p) {
    double vsp = NAN, vcp1 = NAN, ratio = NAN, lopt = NAN;
    for (const auto& r : rows) {
      if (r.p != p) continue;
      if (r.metric == "infid_vsp") vsp = r.value;
      if (r.metric == "infid_vcp" && r.L == 1) vcp1 = r.value;
      if (r.metric == "ratio_vsp_over_vcp_optimal") ratio = r.value;
      if (r.metric == "L_optimal") lopt = r.value;
    }
    single_ok = single_ok && vcp1 < vsp;
    ratio_ok = ratio_ok && ratio >= 1.0;
    peak = std::max(peak, std::isnan(ratio) ? 0.0 : ratio);
    detail += validation::fmt("p=%g VSP %.4f VCP1 %.4f ratio %.3f (L=%g); ", p, vsp, vcp1, ratio, lopt);
  }
  return {"fig3cfg_cswap_noise_ordering", single_ok && ratio_ok && peak >= 2.0,
          detail + validation::fmt("peak %.3f", peak)};
}

inline CriterionResult validate_fig7() {
  bool pass = true;
  double worst_direct = 0.0, worst_ic = 0.0;
  bool window1 = false, window2 = false;
  for (int n : {1, 2})
    for (int i = 0; i <= 50; ++i) {
      const double P = i * 0.02;
      const PauliChannel c = depolarizing(n, P);
      const PauliChannel pur = post_selected(c, 2).channel;
      const double fd = entangled_fidelity(c), fp = entangled_fidelity(pur);
      if (n == 1) worst_direct = std::max(worst_direct, std::abs(fd - (1.0 - 0.75 * P)));
      const double th = separability_threshold(n);
      if (fd < th && fp >= th) (n == 1 ? window1 : window2) = true;
      worst_ic = std::max(worst_ic, coherent_information(c) - coherent_information(pur));
    }
  const double f23 = entangled_fidelity(post_selected(depolarizing(1, 2.0 / 3.0), 2).channel);
  const double ic_id1 = coherent_information(PauliChannel::identity(1));
  const double ic_id2 = coherent_information(PauliChannel::identity(2));
  const double ic_full = coherent_information(depolarizing(1, 1.0));
  pass = worst_direct <= 1e-12 && std::abs(f23 - 0.5625) <= 1e-10 && window1 && window2 && worst_ic <= 1e-12 &&
         std::abs(ic_id1 - 1.0) <= 1e-12 && std::abs(ic_id2 - 2.0) <= 1e-12 && std::abs(ic_full + 1.0) <= 1e-12;
  return {"fig7_fidelity_and_coherent_information", pass,
          validation::fmt("F_direct err %.2g, F_pur(2/3)=%.12f, windows N1=%d N2=%d, max IC_direct-IC_pur %.2g, "
                          "IC(id)=%.12g,%.12g IC(P=1)=%.12g",
                          worst_direct, f23, window1, window2, worst_ic, ic_id1, ic_id2, ic_full)};
}

inline CriterionResult validate_detectors(std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.experiment = "detectors";
  c.seed = seed;
  c.samples = 20;
  std::map<std::string, double> v;
  for (const auto& r : detail::run_detectors(c)) v[r.metric] = r.value;
  const bool pass = v["coherent_reconstruction_choi_diff"] <= 1e-12 &&
                    std::abs(v["coherent_minus_probability_00"] - 0.09) <= 1e-12 &&
                    v["incoherent_trace_sum_max_deviation"] <= 1e-12;
  return {"detector_algebra", pass,
          validation::fmt("Choi diff %.3g, P(-)=%.15f, incoherent trace deviation %.3g",
                          v["coherent_reconstruction_choi_diff"], v["coherent_minus_probability_00"],
                          v["incoherent_trace_sum_max_deviation"])};
}

struct Criterion {
  std::string name;
  std::function<CriterionResult(const ValidationOptions&)> run;
};

inline std::vector<Criterion> primary_criteria() {
  return {
      {"gadget_oracle_equivalence", [](const ValidationOptions&) { return validate_gadget_oracle(); }},
      {"postselected_channel_equivalence", [](const ValidationOptions&) { return validate_postselected_channel(); }},
      {"suppression_factor_ratio", [](const ValidationOptions&) { return validate_suppression_ratio(); }},
      {"qec_merge_repetition_code", [](const ValidationOptions&) { return validate_qec_merge(); }},
      {"variance_formula_monte_carlo", [](const ValidationOptions&) { return validate_variance_mc(); }},
      {"budget_optimizer", [](const ValidationOptions&) { return validate_budget(); }},
      {"fig3b_layered_vcp_vs_vsp", [](const ValidationOptions& o) { return validate_fig3b(o); }},
      {"fig3cfg_cswap_noise_ordering", [](const ValidationOptions& o) { return validate_fig3cfg(o); }},
      {"fig7_fidelity_and_coherent_information", [](const ValidationOptions&) { return validate_fig7(); }},
      {"detector_algebra", [](const ValidationOptions&) { return validate_detectors(); }},
  };
}

}  // namespace vcplab
