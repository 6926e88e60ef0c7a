#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vcplab/pauli.hpp"

using namespace vcplab;

namespace {

PauliChannel random_channel(int n, std::mt19937_64& rng, double lo = 0.5, double hi = 0.95) {
  const auto p = oracle::random_probs(n, rng, lo, hi);
  const auto ls = oracle::labels(n);
  PauliChannel::Map m;
  for (std::size_t i = 0; i < ls.size(); ++i) m.emplace(PauliString::parse(ls[i]), p[i]);
  return PauliChannel(n, m);
}

PauliChannel ch(const char* text) { return PauliChannel::parse(text); }

}  // namespace

TEST(PauliString, ParseLabelAndMatrix) {
  for (const char* l : {"I", "X", "Y", "Z", "XIZ", "YYZI", "IZXY"}) {
    const PauliString p = PauliString::parse(l);
    EXPECT_EQ(p.label(), l);
    EXPECT_LT(max_abs_diff(p.matrix(), oracle::pauli(l)), 1e-15);
  }
  EXPECT_EQ(PauliString::parse("XIYZ").weight(), 3);
  EXPECT_THROW(PauliString::parse("XA"), InvalidArgument);
  EXPECT_THROW(PauliString(2, 4, 0), InvalidArgument);
}

TEST(PauliString, CommutationAndProductAgreeWithMatrices) {
  const auto ls = oracle::labels(2);
  for (const auto& a : ls)
    for (const auto& b : ls) {
      const PauliString pa = PauliString::parse(a), pb = PauliString::parse(b);
      const Matrix ma = oracle::pauli(a), mb = oracle::pauli(b);
      EXPECT_EQ(pa.commutes_with(pb), max_abs_diff(ma * mb, mb * ma) < 1e-12) << a << " " << b;
      // Product up to phase: |Tr((pa*pb)^dagger ma mb)| = 4.
      const Matrix prod = (pa * pb).matrix();
      EXPECT_NEAR(std::abs((prod.adjoint() * ma * mb).trace()), 4.0, 1e-12);
    }
  EXPECT_EQ(PauliString::parse("XY").concat(PauliString::parse("Z")).label(), "XYZ");
}

TEST(PauliString, OrderingIsStrictWeak) {
  const auto all = all_paulis(2);
  ASSERT_EQ(all.size(), 16u);
  EXPECT_TRUE(all[0].is_identity());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j) EXPECT_EQ(all[i] == all[j], i == j);
}

TEST(PauliChannel, ConstructionRules) {
  EXPECT_THROW(ch("I 0.9\nX 0.05"), InvalidChannel);
  EXPECT_THROW(ch("I 1.1\nX -0.1"), InvalidChannel);
  EXPECT_THROW(ch("I 0.9\nXX 0.1"), DimensionError);
  EXPECT_THROW(ch("I 0.9\nI 0.1"), InvalidArgument);
  EXPECT_THROW(ch("# nothing"), InvalidArgument);
  const PauliChannel c = ch("# comment\nI 0.9  # trailing\n\nX 0.1\nZ 0\n");
  EXPECT_EQ(c.probabilities().size(), 2u);
  EXPECT_EQ(c.probability(PauliString::parse("Z")), 0.0);
  EXPECT_EQ(PauliChannel().identity_weight(), 1.0);
}

TEST(PauliChannel, SerializeRoundTrip) {
  std::mt19937_64 rng(1);
  const PauliChannel c = random_channel(2, rng);
  EXPECT_EQ(max_abs_diff(PauliChannel::parse(c.serialize()), c), 0.0);
}

TEST(Purify, HandEvaluatedExamples) {
  const PauliChannel c = ch("I 0.9\nX 0.1");
  const PauliChannel p2 = purify(c, 2);
  EXPECT_NEAR(p2.identity_weight(), 0.81 / 0.82, 1e-15);
  EXPECT_NEAR(p2.probability(PauliString::parse("X")), 0.01 / 0.82, 1e-15);
  EXPECT_NEAR(p2.identity_weight(), 0.987805, 1e-6);
  const PauliChannel p3 = purify(c, 3);
  EXPECT_NEAR(p3.identity_weight(), 0.729 / 0.73, 1e-15);
  EXPECT_NEAR(p3.probability(PauliString::parse("X")), 0.001 / 0.73, 1e-15);
  EXPECT_EQ(max_abs_diff(purify(c, 1), c), 0.0);
}

TEST(PM, Examples) {
  EXPECT_EQ(p_m(PauliChannel::identity(2), 3), 1.0);
  EXPECT_NEAR(p_m(ch("I 0.9\nX 0.1"), 2), 0.82, 1e-15);
  EXPECT_NEAR(p_m(depolarizing(1, 2.0 / 3.0), 2), 1.0 / 3.0, 1e-15);
}

TEST(Depolarizing, Decomposition) {
  EXPECT_EQ(max_abs_diff(depolarizing(1, 0.0), PauliChannel::identity(1)), 0.0);
  const PauliChannel d1 = depolarizing(1, 0.1);
  EXPECT_NEAR(d1.identity_weight(), 0.925, 1e-15);
  for (char c : {'X', 'Y', 'Z'}) EXPECT_NEAR(d1.probability(PauliString::single(1, 0, c)), 0.025, 1e-15);
  const PauliChannel d2 = depolarizing(2, 0.1);
  EXPECT_NEAR(d2.identity_weight(), 0.90625, 1e-15);
  EXPECT_EQ(d2.probabilities().size(), 16u);
  for (const auto& [p, w] : d2.probabilities())
    if (!p.is_identity()) { EXPECT_NEAR(w, 0.00625, 1e-15); }
  // Matches (1-P) rho + P I/d as a map.
  std::mt19937_64 rng(2);
  const Matrix rho = oracle::random_state(2, rng);
  const Matrix want = 0.9 * rho + 0.1 * Matrix::Identity(4, 4) / 4.0;
  EXPECT_LT(max_abs_diff(apply_channel(DensityOperator(rho), d2, {0, 1}).matrix(), want), 1e-15);
}

TEST(Tensor, ProductOfDistributions) {
  const PauliChannel t = tensor(ch("I .9\nX .1"), ch("I .8\nZ .2"));
  EXPECT_NEAR(t.probability(PauliString::parse("II")), 0.72, 1e-15);
  EXPECT_NEAR(t.probability(PauliString::parse("IZ")), 0.18, 1e-15);
  EXPECT_NEAR(t.probability(PauliString::parse("XI")), 0.08, 1e-15);
  EXPECT_NEAR(t.probability(PauliString::parse("XZ")), 0.02, 1e-15);
  const PauliChannel p = purify(t, 2);
  const double z = 0.5576;
  EXPECT_NEAR(p.probability(PauliString::parse("II")), 0.5184 / z, 1e-14);
  EXPECT_NEAR(p.probability(PauliString::parse("IZ")), 0.0324 / z, 1e-14);
  EXPECT_NEAR(p.probability(PauliString::parse("XI")), 0.0064 / z, 1e-14);
  EXPECT_NEAR(p.probability(PauliString::parse("XZ")), 0.0004 / z, 1e-14);
  const PauliChannel e = tensor(ch("I .9\nX .1"), PauliChannel::identity(1));
  EXPECT_NEAR(e.probability(PauliString::parse("XI")), 0.1, 1e-15);
}

TEST(Tensor, MatchesMatrixLevelProduct) {
  std::mt19937_64 rng(3);
  const PauliChannel a = random_channel(1, rng), b = random_channel(1, rng);
  const Matrix rho = oracle::random_state(2, rng);
  Matrix want = apply_channel(DensityOperator(rho), a, {0}).matrix();
  want = apply_channel(DensityOperator(want), b, {1}).matrix();
  EXPECT_LT(max_abs_diff(apply_channel(DensityOperator(rho), tensor(a, b), {0, 1}).matrix(), want), 1e-14);
}

TEST(Compose, MatchesSequentialApplication) {
  std::mt19937_64 rng(4);
  const PauliChannel a = random_channel(2, rng), b = random_channel(2, rng);
  const Matrix rho = oracle::random_state(2, rng);
  const Matrix seq = apply_channel(apply_channel(DensityOperator(rho), a, {0, 1}), b, {0, 1}).matrix();
  EXPECT_LT(max_abs_diff(apply_channel(DensityOperator(rho), compose(a, b), {0, 1}).matrix(), seq), 1e-14);
}

TEST(PostSelected, WeightArithmetic) {
  const PostSelection id = post_selected(PauliChannel::identity(1), 2);
  EXPECT_EQ(id.success_probability, 1.0);
  EXPECT_NEAR(id.channel.identity_weight(), 1.0, 1e-15);
  const PostSelection d = post_selected(depolarizing(1, 2.0 / 3.0), 2);
  EXPECT_NEAR(d.success_probability, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.channel.identity_weight(), (0.5 + 0.25) / (4.0 / 3.0), 1e-15);
  EXPECT_NEAR(d.channel.identity_weight(), 0.5625, 1e-15);
  const PostSelection x = post_selected(ch("I .9\nX .1"), 2);
  EXPECT_NEAR(x.channel.identity_weight(), (0.9 + 0.81) / 1.82, 1e-15);
  EXPECT_NEAR(x.success_probability, 0.91, 1e-15);
}

TEST(ToKraus, Examples) {
  const KrausChannel k1 = to_kraus(PauliChannel::identity(1));
  ASSERT_EQ(k1.terms().size(), 1u);
  EXPECT_LT(max_abs_diff(k1.terms()[0].op, Matrix::Identity(2, 2)), 1e-15);
  const KrausChannel k2 = to_kraus(ch("I .9\nX .1"));
  EXPECT_EQ(k2.terms().size(), 2u);
  EXPECT_LT(k2.orthogonality_residual(), 1e-15);
}

TEST(Twirl, Examples) {
  std::mt19937_64 rng(5);
  const PauliChannel c = random_channel(2, rng, 0.2, 0.9);
  EXPECT_LT(max_abs_diff(twirl(to_kraus(c)), c), 1e-14);
  const PauliChannel z = twirl(KrausChannel::unitary(Matrix(pauli_z())));
  EXPECT_NEAR(z.probability(PauliString::parse("Z")), 1.0, 1e-15);
  const PauliChannel ad = twirl(KrausChannel::amplitude_damping(0.1));
  const double s = std::sqrt(0.9);
  EXPECT_NEAR(ad.identity_weight(), (1 + s) * (1 + s) / 4, 1e-14);
  EXPECT_NEAR(ad.identity_weight(), 0.94934, 1e-5);
  EXPECT_NEAR(ad.probability(PauliString::parse("X")), 0.025, 1e-14);
  EXPECT_NEAR(ad.probability(PauliString::parse("Y")), 0.025, 1e-14);
  EXPECT_NEAR(ad.probability(PauliString::parse("Z")), (1 - s) * (1 - s) / 4, 1e-14);
}

TEST(Twirl, ClosedFormMatchesBruteForceAverage) {
  std::mt19937_64 rng(6);
  const Matrix u = oracle::random_unitary(1, rng);
  const KrausChannel k = KrausChannel::from_operators(1, {0.8 * u, 0.6 * Matrix(pauli_x())});
  const PauliChannel t = twirl(k);
  // Average of Q E(Q rho Q) Q over Paulis Q, compared as maps on a random state.
  const Matrix rho = oracle::random_state(1, rng);
  Matrix avg = Matrix::Zero(2, 2);
  for (const auto& l : oracle::labels(1)) {
    const Matrix q = oracle::pauli(l);
    const Matrix inner = q * rho * q;
    Matrix out = Matrix::Zero(2, 2);
    for (const auto& term : k.standard_operators()) out += term * inner * term.adjoint();
    avg += q * out * q / 4.0;
  }
  EXPECT_LT(max_abs_diff(apply_channel(DensityOperator(rho), t, {0}).matrix(), avg), 1e-14);
  // Choi state of a twirled channel is diagonal in the Bell basis.
  const Matrix c = choi_state(t).matrix();
  Matrix bell(4, 4);
  for (int i = 0; i < 4; ++i) {
    const Matrix e = kron(oracle::pauli(oracle::labels(1)[i]), Matrix::Identity(2, 2));
    bell.col(i) = e * bell_vector(1);
  }
  const Matrix inb = bell.adjoint() * c * bell;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) { EXPECT_LT(std::abs(inb(i, j)), 1e-10); }
}

TEST(Invariants, PurifyExponentComposition) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const PauliChannel c = random_channel(1 + t % 2, rng);
    EXPECT_LT(max_abs_diff(purify(purify(c, 2), 2), purify(c, 4)), 1e-14);
    EXPECT_LT(max_abs_diff(purify(purify(c, 2), 3), purify(c, 6)), 1e-14);
  }
}

TEST(Invariants, PurifyRaisesIdentityWeight) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const PauliChannel c = random_channel(1 + t % 2, rng);
    ASSERT_TRUE(c.is_identity_dominant());
    EXPECT_GT(purify(c, 2).identity_weight(), c.identity_weight());
    EXPECT_GT(purify(c, 3).identity_weight(), purify(c, 2).identity_weight());
  }
}

TEST(Invariants, TensorPurifyCommute) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const PauliChannel a = random_channel(1 + t % 2, rng), b = random_channel(1 + (t / 2) % 2, rng);
    for (int m : {2, 3}) EXPECT_LT(max_abs_diff(purify(tensor(a, b), m), tensor(purify(a, m), purify(b, m))), 1e-14);
  }
}

TEST(Invariants, PMStrictlyDecreasing) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const PauliChannel c = random_channel(2, rng, 0.1, 0.99);
    for (int m = 1; m < 6; ++m) EXPECT_GT(p_m(c, m), p_m(c, m + 1));
  }
}

TEST(Invariants, SuppressionRatioApproachesDimensionGap) {
  // Channel error-rate suppression over state suppression for global depolarizing noise.
  for (int n : {1, 2}) {
    double prev_gap = 1e9;
    for (double P : {0.1, 0.01, 0.001}) {
      const PauliChannel c = depolarizing(n, P);
      const double sc = (1 - c.identity_weight()) / (1 - purify(c, 2).identity_weight());
      const double d = std::pow(2.0, n), s0 = 1 - P + P / d, se = P / d;
      const double ss = (1 - s0) / ((d - 1) * se * se / (s0 * s0 + (d - 1) * se * se));
      const double gap = std::abs(sc / ss - d);
      EXPECT_LT(gap, prev_gap);
      prev_gap = gap;
    }
    EXPECT_LT(prev_gap / std::pow(2.0, n), 0.01);
  }
}
