#pragma once

#include <cmath>
#include <utility>

#include "iqcfact/factorization.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/simulation.hpp"

namespace iqcfact {

/// Worked example: a positive-negative 2x2 multiplier, the static plant
/// G = 1/2, a windowed sinusoid, and four factorizations of the multiplier.
struct ExampleBundle {
  Multiplier pi;
  RationalMatrix g;
  /// u(t) = 0.458 sin t on [0, 10], zero afterwards, sampled on [0, 30].
  SampledSignal u;
  /// Published triangular factorization [2 0; 1 (s-2)/(s+1)], exact.
  Factorization reference_triangular;
  /// Published J-spectral factorization, coefficients to 4 significant digits.
  Factorization reference_jspectral;
  Factorization triangular;
  Factorization jspectral;
};

namespace example {

inline RationalFunction s_var() { return {Polynomial::s(), Polynomial{1.0}}; }

/// [ 3             (-s+2)/(s+1)      ]
/// [ (-s-2)/(s-1)  (-s^2+4)/(s^2-1)  ]
inline Multiplier multiplier() {
  const RationalFunction s = s_var();
  return Multiplier(RationalMatrix{{3.0, (2.0 - s) / (s + 1.0)},
                                   {(-s - 2.0) / (s - 1.0), (4.0 - s * s) / (s * s - 1.0)}},
                    BlockSizes{1, 1});
}

inline RationalMatrix plant() { return RationalMatrix{{0.5}}; }

inline SampledSignal input(double dt = 1e-3, double horizon = 30.0, double t_off = 10.0) {
  const auto steps = static_cast<Eigen::Index>(std::llround(horizon / dt)) + 1;
  SampledSignal u = SampledSignal::zeros(1, steps, dt);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t = u.time(k);
    if (t <= t_off + 1e-12) u.samples(0, k) = 0.458 * std::sin(t);
  }
  return u;
}

inline Factorization reference_triangular() {
  const RationalFunction s = s_var();
  Factorization f;
  f.psi = RationalMatrix{{2.0, 0.0}, {1.0, (s - 2.0) / (s + 1.0)}};
  f.M = SignatureMatrix(1, 1).matrix();
  f.classification = classify(f);
  return f;
}

inline Factorization reference_jspectral() {
  const RationalFunction s = s_var();
  Factorization f;
  f.psi = RationalMatrix{{-1.751, (0.4133 * s - 1.508) / (s + 1.0)},
                         {-0.2554, (-1.082 * s - 2.505) / (s + 1.0)}};
  f.M = SignatureMatrix(1, 1).matrix();
  f.classification = classify(f);
  return f;
}

}  // namespace example

inline ExampleBundle builtin_example() {
  ExampleBundle b;
  b.pi = example::multiplier();
  b.g = example::plant();
  b.u = example::input();
  b.reference_triangular = example::reference_triangular();
  b.reference_jspectral = example::reference_jspectral();
  b.triangular = triangular_factorize(b.pi);
  b.jspectral = jspectral_factorize(b.pi);
  return b;
}

/// The channel pair (G u, u) fed to psi in the graph setting.
inline std::pair<SampledSignal, SampledSignal> graph_signals(
    const RationalMatrix& g, const SampledSignal& u,
    HoldMethod hold = HoldMethod::kFirstOrder) {
  const StateSpace ss = realize(g);
  SampledSignal v = simulate_lti(ss, u, Eigen::VectorXd::Zero(ss.states()), hold).y;
  return {std::move(v), u};
}

}  // namespace iqcfact
