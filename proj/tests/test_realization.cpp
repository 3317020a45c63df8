#include <gtest/gtest.h>

#include <random>

#include "iqcfact/iqcfact.hpp"
#include "oracles.hpp"

using namespace iqcfact;

namespace {

RationalFunction s_var() { return {Polynomial::s(), Polynomial{1.0}}; }

Eigen::VectorXcd eigs(const Eigen::MatrixXd& a) { return a.eigenvalues(); }

}  // namespace

TEST(Realize, FirstOrderLag) {
  const RationalFunction s = s_var();
  const StateSpace ss = realize(RationalMatrix{{(s - 2.0) / (s + 1.0)}});
  ASSERT_EQ(ss.states(), 1);
  EXPECT_DOUBLE_EQ(ss.A(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(ss.B(0, 0), 1.0);
  EXPECT_NEAR(ss.C(0, 0), -3.0, 1e-12);
  EXPECT_NEAR(ss.D(0, 0), 1.0, 1e-12);
}

TEST(Realize, StaticGain) {
  const StateSpace ss = realize(RationalMatrix{{2.0}});
  EXPECT_EQ(ss.states(), 0);
  EXPECT_DOUBLE_EQ(ss.D(0, 0), 2.0);
}

TEST(Realize, TriangularExampleFactor) {
  const Factorization f = example::reference_triangular();
  const StateSpace ss = realize(f.psi);
  EXPECT_EQ(ss.states(), 1);
  for (double w : {0.0, 0.5, 3.0, 100.0}) {
    const Eigen::MatrixXcd a = ss.transfer(Complex(0, w));
    const Eigen::MatrixXcd b = f.psi.at_frequency(w);
    EXPECT_LE((a - b).norm(), 1e-8 * (1 + b.norm()));
  }
}

TEST(Realize, ImproperEntryRejected) {
  const RationalFunction s = s_var();
  try {
    (void)realize(RationalMatrix{{s * s / (s + 1.0)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kImproperEntry);
  }
}

TEST(Realize, RandomRoundTrip) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(-20.0, 20.0);
  std::uniform_int_distribution<int> dim(1, 3), deg(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = dim(rng), m = dim(rng);
    RationalMatrix r(p, m);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) {
        const int n = deg(rng);
        std::vector<double> num(n + 1), den(n + 1);
        for (double& x : num) x = u(rng);
        for (double& x : den) x = u(rng);
        den[n] = 1.0;
        r(i, j) = RationalFunction(Polynomial(num), Polynomial(den));
      }
    const StateSpace ss = realize(r);
    for (int k = 0; k < 50; ++k) {
      const Complex s(0.1 * u(rng), w(rng));
      Eigen::MatrixXcd want(p, m);
      bool near_pole = false;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < m; ++j) {
          const auto& f = r(i, j);
          const Complex d = oracle::poly_eval(f.den().coeffs(), s);
          if (std::abs(d) < 1e-3) near_pole = true;
          want(i, j) = oracle::poly_eval(f.num().coeffs(), s) / d;
        }
      if (near_pole) continue;
      const Eigen::MatrixXcd got = ss.transfer(s);
      ASSERT_LE((got - want).norm(), 1e-8 * (1 + want.norm())) << "trial " << trial;
    }
  }
}

TEST(InvertSs, SwapsPolesAndZeros) {
  const RationalFunction s = s_var();
  const StateSpace inv = invert_ss(realize(RationalMatrix{{(s + 2.0) / (s + 1.0)}}));
  const Eigen::VectorXcd e = eigs(inv.A);
  ASSERT_EQ(e.size(), 1);
  EXPECT_NEAR(e(0).real(), -2.0, 1e-12);
  const Complex at = inv.transfer(Complex(0, 1))(0, 0);
  EXPECT_NEAR(std::abs(at - Complex(1, 1) / Complex(2, 1)), 0.0, 1e-12);

  const StateSpace stat = invert_ss(StateSpace::static_gain(Eigen::MatrixXd::Constant(1, 1, 2.0)));
  EXPECT_DOUBLE_EQ(stat.D(0, 0), 0.5);

  const StateSpace nmp = invert_ss(realize(RationalMatrix{{(s - 2.0) / (s + 1.0)}}));
  EXPECT_NEAR(eigs(nmp.A)(0).real(), 2.0, 1e-12);
}

TEST(InvertSs, SingularFeedthrough) {
  const RationalFunction s = s_var();
  try {
    (void)invert_ss(realize(RationalMatrix{{1.0 / (s + 1.0)}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularFeedthrough);
  }
}

TEST(InvertSs, InverseConsistencyProperty) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> w(0.01, 50.0);
  for (int trial = 0; trial < 30; ++trial) {
    const RationalMatrix r = oracle::random_dominant_psi(rng);
    const StateSpace ss = realize(r);
    const StateSpace inv = invert_ss(ss);
    for (int k = 0; k < 10; ++k) {
      const Complex s(0.0, w(rng));
      const Eigen::MatrixXcd prod = ss.transfer(s) * inv.transfer(s);
      ASSERT_LE((prod - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-8) << "trial " << trial;
    }
  }
}

TEST(HinfNorm, Examples) {
  const RationalFunction s = s_var();
  EXPECT_NEAR(hinf_norm(RationalMatrix{{0.5}}), 0.5, 1e-12);
  EXPECT_NEAR(hinf_norm(RationalMatrix{{(s - 2.0) / (s + 1.0)}}), 2.0, 2e-6);
  EXPECT_NEAR(hinf_norm(RationalMatrix{{1.0 / (s + 1.0)}}), 1.0, 1e-6);
  // Resonant peak between grid points: 1/(s^2 + 0.02 s + 1) peaks near 50.0025.
  const double peak = hinf_norm(RationalMatrix{{1.0 / (s * s + 0.02 * s + 1.0)}});
  const double zeta = 0.01;
  EXPECT_NEAR(peak, 1.0 / (2 * zeta * std::sqrt(1 - zeta * zeta)), 1e-6 * peak);
}

TEST(HinfNorm, UnstableRejected) {
  const RationalFunction s = s_var();
  try {
    (void)hinf_norm(RationalMatrix{{1.0 / (s - 1.0)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableInput);
  }
}

TEST(HinfNorm, DominatesSamples) {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> lw(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const RationalMatrix g = oracle::random_dominant_psi(rng);
    const double n = hinf_norm(g);
    for (int k = 0; k < 50; ++k) {
      const double w = std::pow(10.0, lw(rng));
      ASSERT_GE(n + 1e-9, max_singular_value(g.at_frequency(w)));
    }
  }
}
