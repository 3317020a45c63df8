#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <Eigen/Dense>

#include "iqcfact/conditions.hpp"
#include "iqcfact/error.hpp"
#include "iqcfact/factorization.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/hinf_norm.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/simulation.hpp"

namespace iqcfact {

struct Perturbation {
  Multiplier perturbed;
  double delta = 0.0;
  /// Largest grid-certified epsilon of the unperturbed pair.
  double epsilon = 0.0;
  double g_norm = 0.0;
  /// True when ||G|| is numerically zero and delta was clipped.
  bool capped = false;
};

inline constexpr double kDeltaCap = 1e6;

/// Pi + diag(delta I_m, 0) with delta = eps / (2 ||G||^2), where
/// eps = -max_w lambda_max([G; I]^* Pi [G; I]). The perturbed pair satisfies
/// the same condition with eps / 2.
inline Perturbation perturb_multiplier(const Multiplier& pi, const RationalMatrix& g,
                                       const FrequencyGrid& grid = FrequencyGrid::standard()) {
  if (!is_stable(g).stable) throw Error(ErrorCode::kUnstableG, "G must be stable");
  const detail::FormCurve curve = detail::graph_form_curve(g, pi, grid);
  Perturbation out;
  out.epsilon = -curve.max_value;
  if (!(out.epsilon > 0.0)) {
    std::ostringstream msg;
    msg << "no positive epsilon: form reaches " << curve.max_value << " at w = " << curve.argmax;
    throw Error(ErrorCode::kConditionNotSatisfied, msg.str());
  }
  out.g_norm = hinf_norm(g, grid);
  if (out.g_norm < 1e-9) {
    out.delta = kDeltaCap;
    out.capped = true;
  } else {
    out.delta = out.epsilon / (2.0 * out.g_norm * out.g_norm);
  }
  RationalMatrix shifted = pi.matrix();
  for (int i = 0; i < pi.m(); ++i) shifted(i, i) = shifted(i, i) + out.delta;
  out.perturbed = Multiplier(std::move(shifted), pi.blocks());
  return out;
}

/// Augmented multiplier with block rows of sizes (m, l, l, m):
///   [ Pi11      0           Pi12   0          ]
///   [ 0        -Pi22 - eps   0     -Pi12~      ]
///   [ Pi12~     0           Pi22   0          ]
///   [ 0        -Pi12         0     -Pi11~ - eps]
/// partitioned as (m + l, l + m).
inline Multiplier augment_multiplier(const Multiplier& pi, double eps) {
  const int m = pi.m(), l = pi.l();
  const RationalMatrix p11 = pi.pi11(), p12 = pi.pi12(), p22 = pi.pi22();
  const RationalMatrix p12c = p12.para_conjugate();
  RationalMatrix a(2 * (m + l), 2 * (m + l));
  const int r0 = 0, r1 = m, r2 = m + l, r3 = m + 2 * l;
  a.set_block(r0, r0, p11);
  a.set_block(r0, r2, p12);
  a.set_block(r1, r1, -p22 - eps * RationalMatrix::identity(l));
  a.set_block(r1, r3, -p12c);
  a.set_block(r2, r0, p12c);
  a.set_block(r2, r2, p22);
  a.set_block(r3, r1, -p12);
  a.set_block(r3, r3, -p11.para_conjugate() - eps * RationalMatrix::identity(m));
  return Multiplier(std::move(a), BlockSizes{m + l, l + m});
}

/// (1 / 2pi) int_R x(jw)^* Pi(jw) x(jw) dw with x = [v; w] given as stable
/// column transfer functions (Laplace transforms of the signals). With this
/// normalization the value equals the time-domain integral.
inline double frequency_iqc_value(const RationalMatrix& pi, const RationalMatrix& v,
                                  const RationalMatrix& w) {
  if (v.cols() != 1 || w.cols() != 1 || v.rows() + w.rows() != pi.rows() ||
      !pi.is_square())
    throw Error(ErrorCode::kDimensionMismatch, "signal transforms do not match Pi");
  const RationalMatrix x = vstack(v, w);
  auto integrand = [&](double omega) {
    const Eigen::VectorXcd xv = x.at_frequency(omega);
    return (xv.adjoint() * pi.at_frequency(omega) * xv)(0, 0).real();
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  // Integrand is even in omega for real-coefficient data.
  return integrator.integrate(integrand, 1e-12) / std::numbers::pi;
}

/// Same value with Pi = psi~ M psi taken from a factorization.
inline double frequency_iqc_value(const Factorization& f, const RationalMatrix& v,
                                  const RationalMatrix& w) {
  const RationalMatrix m = RationalMatrix::constant(f.M);
  return frequency_iqc_value(f.psi.para_conjugate() * m * f.psi, v, w);
}

/// Time-domain value int_0^inf z^T M z dt with z = psi [v; w]. Both signals
/// must have decayed by the end of the horizon.
inline double signal_iqc_value(const Factorization& f, const SampledSignal& v,
                               const SampledSignal& w,
                               HoldMethod hold = HoldMethod::kFirstOrder) {
  detail::require_same_grid(v, w);
  require_decayed(v);
  require_decayed(w);
  return iqc_trace(f, v, w, hold).final_value();
}

struct VerdictOptions {
  FrequencyGrid grid = FrequencyGrid::standard();
  double epsilon = 1e-3;
  /// Condition (ii): the IQC of the nonlinear side is a user assertion.
  bool delta1_iqc_asserted = false;
  /// Condition (i): well-posedness is never computed.
  bool well_posed_asserted = true;
};

struct VerdictReport {
  ConditionReport well_posedness;     // (i)
  ConditionReport delta1_iqc;         // (ii)
  ConditionReport inverse_graph;      // (iii)
  ConditionReport positive_negative;  // (iv)
  std::optional<Factorization> factorization_used;
  std::string factorization_notes;
  /// "stable" or "inconclusive".
  std::string overall = "inconclusive";
  /// Labels of the failed items: "i", "ii", "iii", "iv", "factorization".
  std::vector<std::string> failed;
};

namespace detail {

inline ConditionReport asserted_condition(const char* name, bool asserted) {
  return make_condition_report(name, asserted ? 1.0 : -1.0, 0.0,
                               asserted ? "asserted by the caller, not computed"
                                        : "not asserted");
}

}  // namespace detail

/// Stability test for the interconnection of a nonlinear Delta1 (IQC
/// asserted) and an LTI Delta2 (m x l). Stable requires all four conditions
/// and a doubly-hard factorization of Pi.
inline VerdictReport stability_verdict(const RationalMatrix& delta2, const Multiplier& pi,
                                       const VerdictOptions& opt = {}) {
  VerdictReport r;
  r.well_posedness = detail::asserted_condition("(i) well-posedness", opt.well_posed_asserted);
  r.delta1_iqc = detail::asserted_condition("(ii) delta1 IQC", opt.delta1_iqc_asserted);
  r.positive_negative = is_positive_negative(pi, opt.grid, opt.epsilon);
  r.positive_negative.name = "(iv) positive-negative";

  bool factored = false;
  if (r.positive_negative.satisfied) {
    try {
      Factorization f = jspectral_factorize(pi, opt.grid);
      factored = f.classification == Classification::kDoublyHard;
      r.factorization_notes = "J-spectral factorization, classification " +
                              std::string(to_string(f.classification));
      r.factorization_used = std::move(f);
    } catch (const Error& e) {
      r.factorization_notes = e.what();
    }
  } else {
    r.factorization_notes = "skipped: Pi is not positive-negative";
  }

  const StabilityReport d2 = is_stable(delta2);
  if (d2.stable) {
    r.inverse_graph = inverse_graph_condition(delta2, pi, opt.grid, opt.epsilon);
  } else {
    // Margin is minus the largest pole real part, so it is not positive here.
    r.inverse_graph = make_condition_report("(iii) inverse-graph IQC", d2.margin, 0.0,
                                            "Delta2 is not stable");
  }
  r.inverse_graph.name = "(iii) inverse-graph IQC";

  if (!r.well_posedness.satisfied) r.failed.push_back("i");
  if (!r.delta1_iqc.satisfied) r.failed.push_back("ii");
  if (!r.inverse_graph.satisfied) r.failed.push_back("iii");
  if (!r.positive_negative.satisfied) r.failed.push_back("iv");
  if (!factored) r.failed.push_back("factorization");
  r.overall = r.failed.empty() ? "stable" : "inconclusive";
  return r;
}

}  // namespace iqcfact
