#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "iqcfact/iqcfact.hpp"
#include "oracles.hpp"

using namespace iqcfact;

namespace {

RationalFunction s_var() { return {Polynomial::s(), Polynomial{1.0}}; }

Multiplier constant_multiplier(double a, double b, double c) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, c;
  return Multiplier(RationalMatrix::constant(m), BlockSizes{1, 1});
}

const Multiplier& pi5() {
  static const Multiplier pi = example::multiplier();
  return pi;
}

}  // namespace

TEST(PositiveNegative, Examples) {
  const FrequencyGrid grid = FrequencyGrid::standard();
  EXPECT_TRUE(is_positive_negative(pi5(), grid, 0.5).satisfied);
  const ConditionReport j = is_positive_negative(constant_multiplier(1, 0, -1), grid, 0.5);
  EXPECT_TRUE(j.satisfied);
  EXPECT_NEAR(j.margin, 0.5, 1e-15);
  EXPECT_FALSE(is_positive_negative(constant_multiplier(0, 1, 0), grid, 1e-6).satisfied);
}

TEST(PositiveNegative, HandAlgebraMargin) {
  // min(3, (w^2+4)/(w^2+1)) - eps: the infimum 1 is reached at infinity.
  const ConditionReport r = is_positive_negative(pi5(), FrequencyGrid::standard(), 0.5);
  EXPECT_NEAR(r.margin, 0.5, 1e-12);
  EXPECT_TRUE(std::isinf(r.worst_frequency));
}

TEST(GpgCondition, ConstantForm) {
  const FrequencyGrid grid = FrequencyGrid::standard();
  const RationalMatrix g{{0.5}};
  const ConditionReport ok = gpg_condition(g, pi5(), grid, 1.0);
  EXPECT_TRUE(ok.satisfied);
  EXPECT_NEAR(ok.curve_max, -1.25, 1e-12);
  EXPECT_NEAR(ok.margin, 0.25, 1e-12);
  EXPECT_FALSE(gpg_condition(g, pi5(), grid, 1.3).satisfied);
  const ConditionReport j = gpg_condition(RationalMatrix{{0.0}}, constant_multiplier(1, 0, -1), grid, 0.5);
  EXPECT_TRUE(j.satisfied);
  EXPECT_NEAR(j.curve_max, -1.0, 1e-15);
}

TEST(GpgCondition, FormAtEveryGridPointByHand) {
  for (double w : FrequencyGrid::standard().evaluation_points()) {
    if (std::isinf(w)) continue;
    const Eigen::Matrix2cd p = oracle::example_pi(w);
    Eigen::Vector2cd x(0.5, 1.0);
    const double v = (x.adjoint() * p * x)(0, 0).real();
    ASSERT_NEAR(v, -1.25, 1e-12);
  }
}

TEST(GpgCondition, Errors) {
  const RationalFunction s = s_var();
  try {
    (void)gpg_condition(RationalMatrix{{1.0 / (s - 1.0)}}, pi5(), FrequencyGrid::standard(), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableG);
  }
  try {
    (void)gpg_condition(RationalMatrix(2, 1), pi5(), FrequencyGrid::standard(), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(InverseGraph, ExamplesAndEquivalence) {
  const FrequencyGrid grid = FrequencyGrid::standard();
  const RationalMatrix d{{0.5}};
  const ConditionReport a = inverse_graph_condition(d, pi5(), grid, 1.0);
  const ConditionReport b = gpg_condition(d, pi5(), grid, 1.0);
  EXPECT_TRUE(a.satisfied);
  EXPECT_NEAR(a.margin, b.margin, 1e-12);
  EXPECT_TRUE(inverse_graph_condition(RationalMatrix{{0.0}}, constant_multiplier(1, 0, -1), grid, 0.5).satisfied);
  const ConditionReport two = inverse_graph_condition(RationalMatrix{{2.0}}, constant_multiplier(1, 0, -1), grid, 1e-6);
  EXPECT_FALSE(two.satisfied);
  EXPECT_NEAR(two.curve_max, 3.0, 1e-12);

  const RationalFunction s = s_var();
  try {
    (void)inverse_graph_condition(RationalMatrix{{1.0 / (s - 2.0)}}, pi5(), grid, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableDelta);
  }
}

TEST(InverseGraph, EquivalenceProperty) {
  std::mt19937 rng(8);
  const FrequencyGrid grid = FrequencyGrid::log_spaced(1e-2, 1e2, 60);
  for (int trial = 0; trial < 20; ++trial) {
    const Multiplier pi = oracle::jform(oracle::random_dominant_psi(rng));
    const RationalMatrix g{{oracle::random_small(rng, 0.5)}};
    EXPECT_EQ(gpg_condition(g, pi, grid, 0.01).margin,
              inverse_graph_condition(g, pi, grid, 0.01).margin);
  }
}

TEST(Perturb, ExampleDelta) {
  const Perturbation p = perturb_multiplier(pi5(), RationalMatrix{{0.5}});
  EXPECT_NEAR(p.epsilon, 1.25, 1e-12);
  EXPECT_NEAR(p.delta, 2.5, 1e-9);
  EXPECT_FALSE(p.capped);
  for (double w : FrequencyGrid::standard().evaluation_points()) {
    Eigen::Vector2cd x(0.5, 1.0);
    const double v = (x.adjoint() * p.perturbed.at_frequency(w) * x)(0, 0).real();
    ASSERT_NEAR(v, -0.625, 1e-9);
  }
  // Pi11 grows by exactly delta.
  EXPECT_NEAR(p.perturbed.matrix()(0, 0).value_at_infinity(), 5.5, 1e-12);
}

TEST(Perturb, ZeroGainCapped) {
  const Perturbation p = perturb_multiplier(constant_multiplier(1, 0, -1), RationalMatrix{{0.0}});
  EXPECT_TRUE(p.capped);
  EXPECT_EQ(p.delta, kDeltaCap);
  EXPECT_NEAR(gpg_condition(RationalMatrix{{0.0}}, p.perturbed, FrequencyGrid::standard(), 0.0).curve_max,
              -1.0, 1e-12);
}

TEST(Perturb, RepairsVanishingPi11) {
  RationalMatrix m = pi5().matrix();
  m(0, 0) = 0.0;
  const Multiplier pi0(m, BlockSizes{1, 1});
  EXPECT_FALSE(is_positive_negative(pi0, FrequencyGrid::standard(), 1e-9).satisfied);
  const Perturbation p = perturb_multiplier(pi0, RationalMatrix{{0.5}});
  // Form is 0.5(Pi12 + Pi21) + Pi22 = -2 everywhere.
  EXPECT_NEAR(p.epsilon, 2.0, 1e-12);
  EXPECT_NEAR(p.delta, 4.0, 1e-9);
  EXPECT_NEAR(p.perturbed.matrix()(0, 0).value_at_infinity(), 4.0, 1e-12);
  EXPECT_TRUE(is_positive_negative(p.perturbed, FrequencyGrid::standard(), 0.5).satisfied);
}

TEST(Perturb, NoEpsilon) {
  try {
    (void)perturb_multiplier(constant_multiplier(1, 0, -1), RationalMatrix{{2.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConditionNotSatisfied);
  }
}

TEST(Perturb, HalfEpsilonProperty) {
  // The perturbed pair keeps at least eps/2; at the frequency where |G| is
  // largest the Appendix-A bound delta |G|^2 = eps/2 is attained exactly.
  std::mt19937 rng(19);
  const FrequencyGrid grid = FrequencyGrid::log_spaced(1e-3, 1e3, 120);
  int used = 0;
  for (int trial = 0; trial < 40 && used < 20; ++trial) {
    const Multiplier pi = oracle::jform(oracle::random_dominant_psi(rng));
    const RationalMatrix g{{oracle::random_small(rng, 0.6)}};
    const detail::FormCurve before = detail::graph_form_curve(g, pi, grid);
    if (!(before.max_value < 0)) continue;
    ++used;
    const Perturbation p = perturb_multiplier(pi, g, grid);
    const ConditionReport after = gpg_condition(g, p.perturbed, grid, p.epsilon / 2);
    EXPECT_GE(after.margin, -1e-9) << "trial " << trial;
    // Pointwise: new form = old form + delta |G|^2 <= -eps + eps/2.
    for (double w : grid.evaluation_points()) {
      const double gw = std::norm(g.at_frequency(w)(0, 0));
      Eigen::Vector2cd x(g.at_frequency(w)(0, 0), 1.0);
      const double old_form = (x.adjoint() * pi.at_frequency(w) * x)(0, 0).real();
      const double new_form = (x.adjoint() * p.perturbed.at_frequency(w) * x)(0, 0).real();
      ASSERT_NEAR(new_form, old_form + p.delta * gw, 1e-9 * (1 + std::abs(old_form)));
    }
  }
  EXPECT_GE(used, 10);
}

TEST(Augment, ExampleAtZero) {
  const Multiplier a = augment_multiplier(pi5(), 0.1);
  Eigen::MatrixXd want(4, 4);
  want << 3, 0, 2, 0, 0, 3.9, 0, -2, 2, 0, -4, 0, 0, -2, 0, -3.1;
  EXPECT_LT((a.at_frequency(0.0).real() - want).norm(), 1e-12);
  EXPECT_LT(a.at_frequency(0.0).imag().norm(), 1e-12);
  EXPECT_EQ(a.m(), 2);
  EXPECT_EQ(a.l(), 2);
  EXPECT_TRUE(a.matrix().para_conjugate().approx_equal(a.matrix()));
}

TEST(Augment, SignatureCase) {
  const Multiplier a = augment_multiplier(constant_multiplier(1, 0, -1), 0.0);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(4, 4);
  want.diagonal() << 1, 1, -1, -1;
  for (double w : {0.0, 1.0, 50.0}) EXPECT_LT((a.at_frequency(w).real() - want).norm(), 1e-15);
}

TEST(Augment, StructuralProperty) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Multiplier pi = oracle::jform(oracle::random_dominant_psi(rng));
    const Multiplier a = augment_multiplier(pi, 0.05);
    const RationalMatrix& A = a.matrix();
    // Zero blocks: (0,1), (0,3), (1,0), (1,2), (2,1), (2,3), (3,0), (3,2).
    const int zeros[8][2] = {{0, 1}, {0, 3}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 0}, {3, 2}};
    for (const auto& z : zeros) EXPECT_TRUE(A(z[0], z[1]).is_zero());
    EXPECT_TRUE(A.para_conjugate().approx_equal(A));
  }
}

TEST(FrequencyValue, ParsevalConstant) {
  // v = e^{-t}, w = 0 through psi = I, M = diag(1, -1): int v^2 = 1/2.
  const RationalFunction s = s_var();
  Factorization f{RationalMatrix::identity(2), SignatureMatrix(1, 1).matrix(), Classification::kDoublyHard};
  const double val = frequency_iqc_value(f, RationalMatrix{{1.0 / (s + 1.0)}}, RationalMatrix{{0.0}});
  EXPECT_NEAR(val, 0.5, 1e-9);
}

TEST(SignalValue, TrivialCases) {
  Factorization f{RationalMatrix::identity(2), SignatureMatrix(1, 1).matrix(), Classification::kDoublyHard};
  const SampledSignal z = SampledSignal::zeros(1, 1000, 1e-2);
  EXPECT_EQ(signal_iqc_value(f, z, z), 0.0);
  const oracle::DampedSignal d{{{1.0, 1.0, 0.5, false}}};
  const SampledSignal v = oracle::sample(d, 1e-3, 20.0);
  EXPECT_NEAR(signal_iqc_value(f, v, v), 0.0, 1e-14);
}

TEST(SignalValue, TailEnergyAndGrid) {
  Factorization f{RationalMatrix::identity(2), SignatureMatrix(1, 1).matrix(), Classification::kDoublyHard};
  SampledSignal v = SampledSignal::zeros(1, 1000, 1e-2);
  v.samples.setOnes();
  try {
    (void)signal_iqc_value(f, v, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTailEnergy);
  }
  const SampledSignal a = SampledSignal::zeros(1, 100, 1e-2), b = SampledSignal::zeros(1, 100, 2e-2);
  try {
    (void)signal_iqc_value(f, a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridMismatch);
  }
}

TEST(SignalValue, ExampleScenario) {
  const ExampleBundle b = builtin_example();
  const auto [v, w] = graph_signals(b.g, b.u);
  const double u2 = energy(b.u);
  const double val = signal_iqc_value(b.reference_jspectral, v, w);
  // Rounded published coefficients: the form is -1.25 only to ~1e-3.
  EXPECT_NEAR(val, -1.25 * u2, 5e-3);
  EXPECT_NEAR(signal_iqc_value(b.jspectral, v, w), -1.25 * u2, 1e-5);
}

TEST(Properties, ParsevalCrossCheck) {
  std::mt19937 rng(123);
  const double dt = 1e-3, horizon = 25.0;
  for (int trial = 0; trial < 25; ++trial) {
    Factorization f;
    f.psi = oracle::random_dominant_psi(rng);
    f.M = SignatureMatrix(1, 1).matrix();
    f.classification = classify(f);
    const oracle::DampedSignal dv = oracle::DampedSignal::random(rng);
    const oracle::DampedSignal dw = oracle::DampedSignal::random(rng);
    const double time_value = signal_iqc_value(f, oracle::sample(dv, dt, horizon),
                                               oracle::sample(dw, dt, horizon));
    const double freq_value = frequency_iqc_value(f, RationalMatrix{{dv.laplace()}},
                                                  RationalMatrix{{dw.laplace()}});
    // Scale: the unsigned energy of z, so that near-cancelling forms are not
    // judged on a vanishing denominator.
    Factorization unsigned_f = f;
    unsigned_f.M = Eigen::MatrixXd::Identity(2, 2);
    const double scale = frequency_iqc_value(unsigned_f, RationalMatrix{{dv.laplace()}},
                                             RationalMatrix{{dw.laplace()}});
    EXPECT_LE(std::abs(time_value - freq_value), 1e-4 * std::max(std::abs(freq_value), scale))
        << "trial " << trial << " time " << time_value << " freq " << freq_value;
  }
}

TEST(Verdict, ExampleStable) {
  VerdictOptions opt;
  opt.delta1_iqc_asserted = true;
  const VerdictReport r = stability_verdict(RationalMatrix{{0.5}}, pi5(), opt);
  EXPECT_EQ(r.overall, "stable");
  EXPECT_TRUE(r.failed.empty());
  ASSERT_TRUE(r.factorization_used.has_value());
  EXPECT_EQ(r.factorization_used->classification, Classification::kDoublyHard);
  EXPECT_NEAR(r.inverse_graph.margin, 1.25 - opt.epsilon, 1e-12);
}

TEST(Verdict, NeedsAssertion) {
  const VerdictReport r = stability_verdict(RationalMatrix{{0.5}}, pi5());
  EXPECT_EQ(r.overall, "inconclusive");
  EXPECT_NE(std::find(r.failed.begin(), r.failed.end(), "ii"), r.failed.end());
}

TEST(Verdict, NotPositiveNegative) {
  VerdictOptions opt;
  opt.delta1_iqc_asserted = true;
  const VerdictReport r = stability_verdict(RationalMatrix{{0.5}}, constant_multiplier(0, 1, 0), opt);
  EXPECT_EQ(r.overall, "inconclusive");
  EXPECT_NE(std::find(r.failed.begin(), r.failed.end(), "iv"), r.failed.end());
  EXPECT_FALSE(r.factorization_used.has_value());
}

TEST(Verdict, InverseGraphFails) {
  VerdictOptions opt;
  opt.delta1_iqc_asserted = true;
  const VerdictReport r = stability_verdict(RationalMatrix{{2.0}}, constant_multiplier(1, 0, -1), opt);
  EXPECT_EQ(r.overall, "inconclusive");
  EXPECT_EQ(r.failed, std::vector<std::string>{"iii"});
  EXPECT_NEAR(r.inverse_graph.margin, -3.0 - opt.epsilon, 1e-12);
}

TEST(Verdict, UnstableDeltaIsInconclusive) {
  const RationalFunction s = s_var();
  VerdictOptions opt;
  opt.delta1_iqc_asserted = true;
  const VerdictReport r = stability_verdict(RationalMatrix{{1.0 / (s - 1.0)}}, pi5(), opt);
  EXPECT_EQ(r.overall, "inconclusive");
  EXPECT_EQ(r.failed, std::vector<std::string>{"iii"});
}
