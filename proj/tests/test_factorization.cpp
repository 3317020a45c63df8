#include <gtest/gtest.h>

#include <random>

#include "iqcfact/iqcfact.hpp"
#include "oracles.hpp"

using namespace iqcfact;

namespace {

RationalFunction s_var() { return {Polynomial::s(), Polynomial{1.0}}; }

bool same(const RationalFunction& a, const RationalFunction& b) { return a.approx_equal(b, 1e-8); }

Multiplier constant_multiplier(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << a, 0, 0, b;
  return Multiplier(RationalMatrix::constant(m), BlockSizes{1, 1});
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(SpectralFactor, Examples) {
  const RationalFunction s = s_var();
  const RationalFunction phi = (s * s - 4.0) / (s * s - 1.0);
  EXPECT_TRUE(same(spectral_factor(phi, PhaseKind::kAntiMinimumPhase), (2.0 - s) / (s + 1.0)));
  EXPECT_TRUE(same(spectral_factor(phi, PhaseKind::kMinimumPhase), (s + 2.0) / (s + 1.0)));
  EXPECT_TRUE(same(spectral_factor(4.0, PhaseKind::kMinimumPhase), RationalFunction(2.0)));
}

TEST(SpectralFactor, ResidualOnGrid) {
  const RationalFunction s = s_var();
  // phi = (s^2 - 9)(s^2 - 1) / ((s^2 - 4)(s^2 - 16)), positive on the axis.
  const RationalFunction phi = (s * s - 9.0) * (s * s - 1.0) / ((s * s - 4.0) * (s * s - 16.0));
  for (PhaseKind k : {PhaseKind::kMinimumPhase, PhaseKind::kAntiMinimumPhase}) {
    const RationalFunction h = spectral_factor(phi, k);
    EXPECT_TRUE(is_stable(h).stable);
    for (double w : FrequencyGrid::standard().points()) {
      const Complex hv = h.at_frequency(w);
      const double want = phi.at_frequency(w).real();
      ASSERT_NEAR(std::norm(hv), want, 1e-8 * std::abs(want));
    }
    for (const Complex& z : h.zeros())
      EXPECT_EQ(z.real() < 0, k == PhaseKind::kMinimumPhase);
  }
}

TEST(SpectralFactor, Errors) {
  const RationalFunction s = s_var();
  EXPECT_EQ(code_of([&] { (void)spectral_factor(1.0 / (s + 1.0), PhaseKind::kMinimumPhase); }),
            ErrorCode::kNotParaHermitian);
  EXPECT_EQ(code_of([&] { (void)spectral_factor(-1.0, PhaseKind::kMinimumPhase); }),
            ErrorCode::kNotPositiveOnAxis);
  // s^2 - 1 is -(w^2 + 1) on the axis.
  EXPECT_EQ(code_of([&] { (void)spectral_factor(s * s - 1.0, PhaseKind::kMinimumPhase); }),
            ErrorCode::kNotPositiveOnAxis);
}

TEST(Riccati, ScalarClosedForm) {
  // Hamiltonian of a^T p + p a - p r p + q = 0 with a = -1, r = 1, q = 3:
  // p^2 + 2p - 3 = 0, stabilizing root p = 1 (closed loop -2).
  Eigen::MatrixXd H(2, 2);
  H << -1.0, -1.0, -3.0, 1.0;
  const Eigen::MatrixXd P = stabilizing_riccati_solution(H);
  EXPECT_NEAR(P(0, 0), 1.0, 1e-12);
}

TEST(Riccati, AxisEigenvaluesRejected) {
  Eigen::MatrixXd H(2, 2);
  H << 0.0, 1.0, -1.0, 0.0;
  EXPECT_EQ(code_of([&] { (void)stabilizing_riccati_solution(H); }), ErrorCode::kRiccatiFailure);
}

TEST(Triangular, ExampleMatchesRecipe) {
  const RationalFunction s = s_var();
  const Multiplier pi = example::multiplier();
  const Factorization f = triangular_factorize(pi);
  EXPECT_TRUE(same(f.psi(0, 0), 2.0));
  EXPECT_TRUE(f.psi(0, 1).is_zero());
  EXPECT_TRUE(same(f.psi(1, 0), (1.0 - s) / (s + 1.0)));
  EXPECT_TRUE(same(f.psi(1, 1), (2.0 - s) * (s - 1.0) / ((s + 1.0) * (s + 1.0))));
  EXPECT_LE(verify_factorization(pi, f).residual, 1e-7);
  EXPECT_EQ(f.classification, Classification::kHard);
  const VerificationReport rep = verify_factorization(pi, f);
  ASSERT_TRUE(rep.inverse_stability.has_value());
  EXPECT_FALSE(rep.inverse_stability->stable);
}

TEST(Triangular, ConstantSignature) {
  const Factorization f = triangular_factorize(constant_multiplier(1.0, -1.0));
  EXPECT_TRUE(f.psi.approx_equal(RationalMatrix::identity(2)));
  EXPECT_LE(verify_factorization(constant_multiplier(1.0, -1.0), f).residual, 1e-15);
  // Psi = I is square-biproper with a stable inverse.
  EXPECT_EQ(f.classification, Classification::kDoublyHard);
}

TEST(Triangular, DecoupledCase) {
  const RationalFunction s = s_var();
  const RationalFunction p11 = (s * s - 9.0) / (s * s - 1.0);
  const RationalFunction p22 = (s * s - 4.0) / (s * s - 1.0) * -1.0;
  const Multiplier pi(RationalMatrix{{p11, 0.0}, {0.0, p22}}, BlockSizes{1, 1});
  const Factorization f = triangular_factorize(pi);
  EXPECT_TRUE(f.psi(1, 0).is_zero());
  EXPECT_TRUE(same(f.psi(0, 0), spectral_factor(p11, PhaseKind::kMinimumPhase)));
  EXPECT_TRUE(same(f.psi(1, 1), spectral_factor(-p22, PhaseKind::kAntiMinimumPhase)));
  EXPECT_LE(verify_factorization(pi, f).residual, 1e-7);
}

TEST(Triangular, Errors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m.diagonal() << 1, 1, -1;
  const Multiplier big(RationalMatrix::constant(m), BlockSizes{2, 1});
  EXPECT_EQ(code_of([&] { (void)triangular_factorize(big); }), ErrorCode::kUnsupportedBlockSizes);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const Multiplier notpn(RationalMatrix::constant(swap), BlockSizes{1, 1});
  EXPECT_EQ(code_of([&] { (void)triangular_factorize(notpn); }), ErrorCode::kNotPositiveNegative);
}

TEST(JSpectral, Example) {
  const Multiplier pi = example::multiplier();
  const Factorization f = jspectral_factorize(pi);
  const VerificationReport rep = verify_factorization(pi, f);
  EXPECT_LE(rep.residual, 1e-6);
  EXPECT_EQ(f.classification, Classification::kDoublyHard);
  ASSERT_TRUE(rep.inverse_stability.has_value());
  EXPECT_TRUE(rep.inverse_stability->stable);
  EXPECT_GE(rep.psi_stability.margin, 0.5);
  EXPECT_GE(rep.inverse_stability->margin, 0.5);
  // The published factor, rounded to four digits, is the same product up
  // to rounding.
  const Factorization ref = example::reference_jspectral();
  const RationalMatrix J = RationalMatrix::constant(SignatureMatrix(1, 1).matrix());
  EXPECT_LE(verify_factorization(f.psi.para_conjugate() * J * f.psi, ref).residual, 5e-3);
}

TEST(JSpectral, ConstantCases) {
  const Factorization id = jspectral_factorize(constant_multiplier(1.0, -1.0));
  EXPECT_LE(verify_factorization(constant_multiplier(1.0, -1.0), id).residual, 1e-15);
  // Up to a J-unitary factor; only |entries| are fixed for the diagonal case.
  EXPECT_NEAR(std::abs(id.psi(0, 0).value_at_infinity()), 1.0, 1e-12);

  const Multiplier d = constant_multiplier(4.0, -9.0);
  const Factorization f = jspectral_factorize(d);
  EXPECT_LE(verify_factorization(d, f).residual, 1e-12);
  EXPECT_NEAR(std::abs(f.psi(0, 0).value_at_infinity()), 2.0, 1e-12);
  EXPECT_NEAR(std::abs(f.psi(1, 1).value_at_infinity()), 3.0, 1e-12);
  EXPECT_EQ(f.classification, Classification::kDoublyHard);
}

TEST(JSpectral, WrongInertiaAtInfinity) {
  const RationalFunction s = s_var();
  // Pi11 = 4/(w^2 + 1) is positive at every finite frequency but vanishes at
  // infinity, so Pi(inf) has inertia (0, 1).
  const RationalFunction p11 = -4.0 / (s * s - 1.0);
  const Multiplier pi(RationalMatrix{{p11, 0.0}, {0.0, -1.0}}, BlockSizes{1, 1});
  // Positive-negative fails first (Pi11 -> 0 at infinity).
  EXPECT_EQ(code_of([&] { (void)jspectral_factorize(pi); }), ErrorCode::kNotPositiveNegative);
  // Restrict the grid to finite frequencies: then the inertia check fires.
  const FrequencyGrid finite = FrequencyGrid::log_spaced(1e-2, 1e2, 50, true, false);
  EXPECT_EQ(code_of([&] { (void)jspectral_factorize(pi, finite); }),
            ErrorCode::kWrongInertiaAtInfinity);
}

TEST(Verify, PublishedFactorizations) {
  const Multiplier pi = example::multiplier();
  EXPECT_LE(verify_factorization(pi, example::reference_triangular()).residual, 1e-9);
  EXPECT_LE(verify_factorization(pi, example::reference_jspectral()).residual, 5e-3);
  Factorization wrong{RationalMatrix::identity(2), SignatureMatrix(1, 1).matrix(),
                      Classification::kSoft};
  EXPECT_GT(verify_factorization(pi, wrong).residual, 0.1);
  EXPECT_GT(verify_factorization(pi, wrong).abs_residual, 1.0);
}

TEST(Verify, DimensionMismatch) {
  Factorization f{RationalMatrix::identity(3), Eigen::MatrixXd::Identity(3, 3),
                  Classification::kSoft};
  EXPECT_EQ(code_of([&] { (void)verify_factorization(example::multiplier(), f); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(example::reference_triangular()), Classification::kHard);
  EXPECT_EQ(classify(example::reference_jspectral()), Classification::kDoublyHard);
  Factorization id{RationalMatrix::identity(2), SignatureMatrix(1, 1).matrix(),
                   Classification::kSoft};
  EXPECT_EQ(classify(id), Classification::kDoublyHard);
  // Unstable psi is soft.
  const RationalFunction s = s_var();
  Factorization bad{RationalMatrix{{1.0 / (s - 1.0) + 1.0, 0.0}, {0.0, 1.0}},
                    SignatureMatrix(1, 1).matrix(), Classification::kSoft};
  EXPECT_EQ(classify(bad), Classification::kSoft);
}

TEST(Properties, JSpectralRoundTripAndSignature) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const RationalMatrix psi0 = oracle::random_dominant_psi(rng);
    const Multiplier pi = oracle::jform(psi0);
    const Factorization f = jspectral_factorize(pi);
    const VerificationReport rep = verify_factorization(pi, f);
    ASSERT_LE(rep.residual, 1e-6) << "trial " << trial;
    ASSERT_EQ(f.classification, Classification::kDoublyHard) << "trial " << trial;
    for (double w : {0.0, 0.1, 1.0, 10.0, 1e3}) {
      const Complex detpi = pi.matrix().determinant().at_frequency(w);
      const Complex detpsi = f.psi.determinant().at_frequency(w);
      ASSERT_NEAR(-detpi.real(), std::norm(detpsi), 1e-6 * (1 + std::abs(detpi)));
    }
  }
}

TEST(Properties, TriangularResidualAndObstruction) {
  std::mt19937 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 25;) {
    const RationalMatrix psi0 = oracle::random_dominant_psi(rng);
    if (!oracle::poles_separated(psi0, 0.05)) continue;
    ++trial;
    const Multiplier pi = oracle::jform(psi0);
    const Factorization f = triangular_factorize(pi);
    ASSERT_LE(verify_factorization(pi, f).residual, 1e-7) << "trial " << trial;
    bool lhp_pole = false;
    for (const Complex& p : pi.matrix()(0, 1).poles()) lhp_pole |= p.real() < 0;
    const RationalFunction ratio = pi.matrix()(0, 1) * f.psi(1, 1).inverse();
    if (!lhp_pole || ratio.is_constant()) continue;
    ++checked;
    EXPECT_EQ(f.classification, Classification::kHard) << "trial " << trial;
    EXPECT_FALSE(is_stable(f.psi.inverse()).stable) << "trial " << trial;
  }
  EXPECT_GT(checked, 10);
}
