#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "vcplab/config.hpp"
#include "vcplab/densesim.hpp"
#include "vcplab/pauli.hpp"

namespace vcplab {

struct BudgetParams {
  int N = 4;
  int D = 80;
  double p = 0.005;
  double alpha = 5.0;
  int M = 2;
  double n_c = 255.0;
  double n_s = 15.0;

  double lambda() const { return N * D * p; }

  static BudgetParams from_lambda(double lambda, int D, double alpha, int M, double n_c, double n_s, int N = 1) {
    return {N, D, lambda / (N * static_cast<double>(D)), alpha, M, n_c, n_s};
  }

  // Global-depolarizing preset: n_c = 4^N - 1, n_s = 2^N - 1.
  static BudgetParams depolarizing_preset(int N, int D, double p, double alpha = 5.0, int M = 2) {
    return {N, D, p, alpha, M, std::pow(4.0, N) - 1.0, std::pow(2.0, N) - 1.0};
  }

  void validate() const {
    if (N < 1 || D < 1) throw InvalidArgument("N and D must be positive");
    if (!(p >= 0.0) || !(alpha > 0.0)) throw InvalidArgument("p must be non-negative and alpha positive");
    if (M < 2) throw InvalidArgument("M must be at least 2");
    if (!(n_s >= 1.0) || !(n_c >= n_s)) throw InvalidArgument("need n_c >= n_s >= 1");
  }
};

inline double one_minus_exp_neg(double x) { return -std::expm1(-x); }

struct VcpBudget {
  double P_c_cir;
  double P_c_sw;
  double P_c_tot;       // sum, as the headline figure
  double P_c_overlap;   // P_c_cir * P_c_sw
  double P_c_tot_union; // sum minus overlap
};

inline double p_c_cir(const BudgetParams& b, double L) {
  const double lam = b.lambda();
  const double inner = std::pow(b.n_c, 1.0 - b.M) * std::pow(one_minus_exp_neg(lam / L), b.M);
  return 1.0 - std::pow(1.0 - inner, L);
}

inline double p_c_sw(const BudgetParams& b, double L) {
  return one_minus_exp_neg(b.alpha * b.M * L * b.lambda() / b.D);
}

inline VcpBudget vcp_budget(const BudgetParams& b, int L) {
  b.validate();
  if (L < 1) throw InvalidArgument("L must be at least 1");
  const double cir = p_c_cir(b, L), sw = p_c_sw(b, L);
  return {cir, sw, cir + sw, cir * sw, cir + sw - cir * sw};
}

struct OptimalLayers {
  std::optional<double> closed_form;  // absent when the log argument leaves (0, 1)
  int numeric = 1;                    // argmin of P_c,tot over integer L in [1, D]
  std::optional<int> closed_form_checked;  // best of floor/ceil of the closed form and L = 1
  double log_argument = 0.0;
};

inline double total_error(const BudgetParams& b, int L) { return p_c_cir(b, L) + p_c_sw(b, L); }

inline OptimalLayers optimal_layers(const BudgetParams& b) {
  b.validate();
  if (!(b.p > 0.0)) throw InvalidArgument("optimal layers need p > 0");
  OptimalLayers r;
  const double lam = b.lambda();
  r.log_argument = 1.0 - std::pow(b.n_c, (b.M - 1.0) / b.M) *
                             std::pow(one_minus_exp_neg(b.alpha * b.M * lam / b.D), 1.0 / b.M);
  if (r.log_argument > 0.0 && r.log_argument < 1.0) r.closed_form = -lam / std::log(r.log_argument);
  double best = std::numeric_limits<double>::infinity();
  for (int L = 1; L <= b.D; ++L) {
    const double t = total_error(b, L);
    if (t < best) {
      best = t;
      r.numeric = L;
    }
  }
  if (r.closed_form) {
    // Rounded stationary point against the single-layer boundary.
    int pick = 1;
    double pick_err = total_error(b, 1);
    const double lo = std::clamp(std::floor(*r.closed_form), 1.0, static_cast<double>(b.D));
    const double hi = std::clamp(std::ceil(*r.closed_form), 1.0, static_cast<double>(b.D));
    for (double c : {lo, hi}) {
      const int L = static_cast<int>(c);
      const double t = total_error(b, L);
      if (t < pick_err) {
        pick_err = t;
        pick = L;
      }
    }
    r.closed_form_checked = pick;
  }
  return r;
}

// Root of (1 + M x) e^{-x} = 1 on x > 0 by bisection; 1.2564 for M = 2.
inline double circuit_threshold(int M = 2) {
  if (M < 2) throw InvalidArgument("M must be at least 2");
  auto f = [M](double x) { return (1.0 + M * x) * std::exp(-x) - 1.0; };
  double lo = 1e-6, hi = 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct DStar {
  double d_star;
  double d_star_derivative;
  double small_noise_parameter;  // n_c^{M-1} alpha M lambda / D
  bool small_noise;
};

inline DStar d_star_small_noise(const BudgetParams& b) {
  b.validate();
  const double np = b.N * b.p;
  const double d = std::pow(b.alpha * b.M, 1.0 / b.M) * std::pow(b.n_c / np, (b.M - 1.0) / b.M);
  const double param = std::pow(b.n_c, b.M - 1.0) * b.alpha * b.M * b.lambda() / b.D;
  return {d, d * std::pow(b.M - 1.0, -1.0 / b.M), param, param < 0.1};
}

struct VspComparison {
  double P_s_cir = 0.0;
  double P_s_sw = 0.0;
  double P_s_tot = 0.0;
  double P_c_tot = 0.0;
  int L_star = 1;
  std::optional<double> R;       // absent when both error rates vanish
  double R_small_noise = 0.0;    // 0.5 L*^{M-1} (n_c/n_s)^{M-1}
  bool vsp_applicable = true;    // D < ln 2 / p
  bool vcp_applicable = true;    // D / L* < 2 ln 2 / p
};

inline VspComparison compare_vsp(const BudgetParams& b, std::optional<int> L = std::nullopt) {
  b.validate();
  VspComparison r;
  const double lam = b.lambda();
  r.P_s_cir = std::pow(b.n_s, 1.0 - b.M) * std::pow(one_minus_exp_neg(lam), b.M);
  r.P_s_sw = one_minus_exp_neg(b.alpha * b.M * lam / b.D);
  r.P_s_tot = r.P_s_cir + r.P_s_sw;
  r.L_star = L ? *L : (b.p > 0.0 ? optimal_layers(b).numeric : 1);
  r.P_c_tot = total_error(b, r.L_star);
  if (r.P_c_tot > 0.0) r.R = r.P_s_tot / r.P_c_tot;
  r.R_small_noise = 0.5 * std::pow(r.L_star, b.M - 1.0) * std::pow(b.n_c / b.n_s, b.M - 1.0);
  r.vsp_applicable = b.p == 0.0 || b.D < std::log(2.0) / b.p;
  r.vcp_applicable = b.p == 0.0 || static_cast<double>(b.D) / r.L_star < 2.0 * std::log(2.0) / b.p;
  return r;
}

struct VarianceReport {
  double variance;
  double C_em;
  double P_M;
  double shots_for_epsilon;  // 1 / (eps^2 P_M^2)
};

inline VarianceReport variance_and_cost(const PauliChannel& channel, const DensityOperator& rho, const Matrix& o,
                                        int M, double K, double epsilon = 0.01) {
  if (!(K >= 1.0)) throw InvalidArgument("shot count must be at least 1");
  if (channel.num_qubits() != rho.num_qubits()) throw DimensionError("channel and state differ in size");
  const double pm = p_m(channel, M);
  if (pm < Tolerances::degenerate_denominator) throw DegenerateEstimator("P_M underflow");
  std::vector<int> all(rho.num_qubits());
  std::iota(all.begin(), all.end(), 0);
  const DensityOperator pur = apply_channel(rho, purify(channel, M), all);
  const DensityOperator noisy = apply_channel(rho, channel, all);
  const Matrix o2 = o * o;
  const double a = expectation(pur, o2), b = expectation(pur, o), c = expectation(noisy, o);
  const double var = (a - 2.0 * b * c + b * b) / (K * pm * pm);
  return {var, 1.0 / (pm * pm), pm, 1.0 / (epsilon * epsilon * pm * pm)};
}

// Lower bound e^{M lambda} / (1 + (e^lambda - 1)^M) on C_em for global depolarizing noise.
inline double cem_depolarizing_bound(double lambda, int M) {
  return std::exp(M * lambda) / (1.0 + std::pow(std::expm1(lambda), M));
}

}  // namespace vcplab
