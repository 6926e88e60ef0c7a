#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vcplab/metrics.hpp"

using namespace vcplab;

namespace {

Circuit noisy_identity(const PauliChannel& noise) {
  return {NoisyLayer{{NoisyGate{GateOp::unitary({0}, Matrix::Identity(2, 2)), noise}}}};
}

}  // namespace

TEST(Fidelity, Examples) {
  EXPECT_NEAR(entangled_fidelity(PauliChannel::identity(1)), 1.0, 1e-14);
  EXPECT_NEAR(entangled_fidelity(KrausChannel::identity(2)), 1.0, 1e-14);
  for (double p : {0.0, 0.1, 0.5, 2.0 / 3.0, 1.0}) EXPECT_NEAR(entangled_fidelity(depolarizing(1, p)), 1 - 0.75 * p, 1e-14);
  EXPECT_NEAR(entangled_fidelity(post_selected(depolarizing(1, 2.0 / 3.0), 2).channel), 0.5625, 1e-12);
  EXPECT_NEAR(separability_threshold(1), 0.5, 0.0);
  EXPECT_NEAR(separability_threshold(2), 0.25, 0.0);
}

TEST(Fidelity, PauliChannelFidelityIsIdentityWeight) {
  const PauliChannel c = PauliChannel::parse("II 0.6\nXZ 0.25\nYY 0.15");
  EXPECT_NEAR(entangled_fidelity(c), 0.6, 1e-14);
  EXPECT_NEAR(entangled_fidelity(to_kraus(c)), 0.6, 1e-14);
}

TEST(CoherentInformation, Examples) {
  EXPECT_NEAR(coherent_information(PauliChannel::identity(1)), 1.0, 1e-10);
  EXPECT_NEAR(coherent_information(PauliChannel::identity(2)), 2.0, 1e-10);
  EXPECT_NEAR(coherent_information(depolarizing(1, 1.0)), -1.0, 1e-10);
  // Bell-diagonal Choi: I_C = 1 - H(p) for a single-qubit Pauli channel.
  const double h = -(0.8 * std::log2(0.8) + 0.2 * std::log2(0.2));
  EXPECT_NEAR(coherent_information(PauliChannel::parse("I 0.8\nZ 0.2")), 1 - h, 1e-10);
}

TEST(VirtualInfidelity, Examples) {
  const Vector zero = Vector::Unit(2, 0);
  EXPECT_NEAR(virtual_infidelity(VirtualState::from_state(DensityOperator::basis(1, 0)), zero).value, 0.0, 1e-15);
  const VirtualState v = vcp_virtual_apply(VirtualState::from_state(DensityOperator::basis(1, 0)),
                                           noisy_identity(PauliChannel::parse("I 0.9\nX 0.1")), 2);
  EXPECT_NEAR(virtual_infidelity(v, zero).value, 1 - 81.0 / 82.0, 1e-12);
  EXPECT_NEAR(virtual_infidelity(v, zero).value, 0.012195, 1e-6);
  Matrix noisy = Matrix::Zero(2, 2);
  noisy(0, 0) = 0.9;
  noisy(1, 1) = 0.1;
  const Infidelity raw = virtual_infidelity(VirtualState(noisy), zero);
  EXPECT_NEAR(raw.value, 0.1, 1e-15);
  EXPECT_FALSE(raw.out_of_range);
  // Unnormalized reference vectors are normalized first.
  EXPECT_NEAR(virtual_infidelity(VirtualState(noisy), 3.0 * zero).value, 0.1, 1e-15);
}

TEST(VirtualInfidelity, RawValuesOutsideRange) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = -0.5;
  m(1, 1) = 1.5;
  const Infidelity r = virtual_infidelity(VirtualState(m), Vector::Unit(2, 0));
  EXPECT_NEAR(r.value, 1.5, 1e-15);
  EXPECT_TRUE(r.out_of_range);
  EXPECT_THROW(virtual_infidelity(VirtualState(Matrix::Zero(2, 2)), Vector::Unit(2, 0)), DegenerateEstimator);
  EXPECT_THROW(virtual_infidelity(VirtualState(m), Vector::Unit(4, 0)), DimensionError);
}

TEST(Invariants, FidelityOrdering) {
  std::mt19937_64 rng(17);
  for (int n : {1, 2}) {
    const auto ls = oracle::labels(n);
    for (int trial = 0; trial < 10; ++trial) {
      const auto probs = oracle::random_probs(n, rng);
      PauliChannel::Map map;
      for (std::size_t i = 0; i < ls.size(); ++i) map.emplace(PauliString::parse(ls[i]), probs[i]);
      const PauliChannel c(n, map);
      const double direct = entangled_fidelity(c);
      const double post = entangled_fidelity(post_selected(c, 2).channel);
      const double pur = entangled_fidelity(purify(c, 2));
      EXPECT_GT(post, direct);
      EXPECT_GT(pur, post);
    }
  }
}

TEST(Invariants, CoherentInformationBoosted) {
  for (int n : {1, 2})
    for (int i = 1; i <= 50; ++i) {
      const double p = i / 50.0;
      const PauliChannel c = depolarizing(n, p);
      EXPECT_GE(coherent_information(post_selected(c, 2).channel), coherent_information(c) - 1e-10) << n << " " << p;
      EXPECT_GE(coherent_information(purify(c, 2)), coherent_information(c) - 1e-10) << n << " " << p;
    }
}

TEST(Invariants, EntanglementActivationWindow) {
  for (int n : {1, 2}) {
    const double thr = separability_threshold(n);
    int activated = 0;
    for (int i = 1; i <= 100; ++i) {
      const PauliChannel c = depolarizing(n, i / 100.0);
      if (entangled_fidelity(c) < thr && entangled_fidelity(post_selected(c, 2).channel) >= thr) ++activated;
    }
    EXPECT_GT(activated, 0) << n;
  }
}
