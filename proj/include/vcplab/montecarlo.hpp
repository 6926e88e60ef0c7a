#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vcplab/gadgets.hpp"

namespace vcplab {

struct JointOutcome {
  int control;     // +1 or -1, the X eigenvalue on the control
  double value;    // eigenvalue of O on the main register
  double probability;
};

// Exact distribution of the simultaneous (X on control, O on main) measurement at the gadget output.
inline std::vector<JointOutcome> joint_distribution(const Matrix& full, int n, int m, const Matrix& o) {
  const int total = 1 + m * n;
  if (full.rows() != dim_of(total)) throw DimensionError("full register size mismatch");
  if (o.rows() != dim_of(n) || hermiticity_residual(o) > Tolerances::hermitian)
    throw InvalidArgument("observable must be Hermitian on the main register");
  std::vector<int> keep{0};
  for (int q = 1 + (m - 1) * n; q < total; ++q) keep.push_back(q);
  Matrix red = partial_trace(full, total, keep);
  ops::conjugate_1q(red, n + 1, 0, hadamard());
  Eigen::SelfAdjointEigenSolver<Matrix> es((o + o.adjoint()) / 2.0);
  const Index d = dim_of(n);
  std::vector<JointOutcome> out;
  for (int c = 0; c < 2; ++c) {
    const Matrix block = red.block(c * d, c * d, d, d);
    Index i = 0;
    while (i < d) {
      Index j = i;
      const double lam = es.eigenvalues()(i);
      while (j < d && std::abs(es.eigenvalues()(j) - lam) < 1e-9) ++j;
      const Matrix v = es.eigenvectors().middleCols(i, j - i);
      const double prob = (v.adjoint() * block * v).trace().real();
      out.push_back({c == 0 ? 1 : -1, lam, std::max(prob, 0.0)});
      i = j;
    }
  }
  return out;
}

struct McResult {
  double mean_x;
  double mean_y;
  double ratio;
  double delta_variance;      // plug-in delta-method variance of the ratio
  double bootstrap_variance;  // variance of the ratio over bootstrap resamples
  double bootstrap_se;        // standard error of bootstrap_variance
  std::uint64_t shots;
};

namespace detail {

inline std::vector<std::uint64_t> multinomial(std::uint64_t k, const std::vector<double>& probs, std::mt19937_64& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  double rest = 0.0;
  for (double p : probs) rest += p;
  std::uint64_t left = k;
  for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
    const double q = rest > 0.0 ? std::clamp(probs[i] / rest, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> b(left, q);
    counts[i] = b(rng);
    left -= counts[i];
    rest -= probs[i];
  }
  if (!probs.empty()) counts.back() += left;
  return counts;
}

}  // namespace detail

// Per shot x = c * o and y = c; the estimator is mean(x) / mean(y).
inline McResult mc_sample(const std::vector<JointOutcome>& dist, std::uint64_t shots, std::uint64_t seed,
                          int bootstrap = 400) {
  if (shots < 1) throw InvalidArgument("need at least one shot");
  if (bootstrap < 2) throw InvalidArgument("need at least two bootstrap resamples");
  std::mt19937_64 rng(seed);
  std::vector<double> probs;
  for (const auto& o : dist) probs.push_back(o.probability);
  const auto counts = detail::multinomial(shots, probs, rng);
  auto stats = [&](const std::vector<std::uint64_t>& c) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double w = static_cast<double>(c[i]);
      const double x = dist[i].control * dist[i].value, y = dist[i].control;
      sx += w * x;
      sy += w * y;
      sxx += w * x * x;
      syy += w * y * y;
      sxy += w * x * y;
    }
    const double k = static_cast<double>(shots);
    return std::array<double, 5>{sx / k, sy / k, sxx / k, syy / k, sxy / k};
  };
  const auto s = stats(counts);
  McResult r{};
  r.shots = shots;
  r.mean_x = s[0];
  r.mean_y = s[1];
  r.ratio = s[0] / s[1];
  const double vx = s[2] - s[0] * s[0], vy = s[3] - s[1] * s[1], cxy = s[4] - s[0] * s[1];
  r.delta_variance = (vx - 2.0 * r.ratio * cxy + r.ratio * r.ratio * vy) / (s[1] * s[1] * static_cast<double>(shots));
  std::vector<double> empirical(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) empirical[i] = static_cast<double>(counts[i]);
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(bootstrap));
  for (int b = 0; b < bootstrap; ++b) {
    const auto bs = stats(detail::multinomial(shots, empirical, rng));
    ratios.push_back(bs[0] / bs[1]);
  }
  double mean = 0.0, ss = 0.0;
  for (double v : ratios) mean += v;
  mean /= bootstrap;
  for (double v : ratios) ss += (v - mean) * (v - mean);
  r.bootstrap_variance = ss / (bootstrap - 1.0);
  r.bootstrap_se = r.bootstrap_variance * std::sqrt(2.0 / (bootstrap - 1.0));
  return r;
}

}  // namespace vcplab
