#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "iqcfact/error.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/rational.hpp"

namespace iqcfact {

enum class PhaseKind { kMinimumPhase, kAntiMinimumPhase };

/// Scalar spectral factorization phi = H~ H with H stable. Zeros of H are
/// taken from the open left half-plane (kMinimumPhase) or the open right
/// half-plane (kAntiMinimumPhase). The sign is fixed by H(0) > 0.
///
/// Roots of a para-Hermitian phi come in (r, -r) pairs; each pair donates one
/// root to H. phi must be strictly positive on the imaginary axis.
inline RationalFunction spectral_factor(
    const RationalFunction& phi, PhaseKind kind,
    const FrequencyGrid& grid = FrequencyGrid::standard()) {
  if (!phi.para_conjugate().approx_equal(phi))
    throw Error(ErrorCode::kNotParaHermitian,
                "spectral factorization needs phi~ = phi");

  double min_value = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double w : grid.evaluation_points()) {
    if (std::isinf(w) && !phi.is_proper()) continue;
    const double v = phi.at_frequency(w).real();
    if (v < min_value) {
      min_value = v;
      worst = w;
    }
  }
  if (!(min_value > 0.0)) {
    std::ostringstream msg;
    msg << "phi(jw) is not positive on the axis: min " << min_value
        << " at w = " << worst;
    throw Error(ErrorCode::kNotPositiveOnAxis, msg.str());
  }

  auto split = [](const std::vector<Complex>& roots, bool take_left,
                  const char* what) {
    std::vector<Complex> out;
    int left = 0, right = 0;
    for (const Complex& r : roots) {
      if (std::abs(r.real()) <= tol::kStability * (1.0 + std::abs(r)))
        throw Error(ErrorCode::kNotPositiveOnAxis,
                    std::string(what) + " on the imaginary axis");
      if (r.real() < 0.0) {
        ++left;
        if (take_left) out.push_back(r);
      } else {
        ++right;
        if (!take_left) out.push_back(r);
      }
    }
    if (left != right)
      throw Error(ErrorCode::kNotParaHermitian,
                  std::string(what) + "s are not symmetric about the axis");
    return out;
  };

  const std::vector<Complex> poles = split(phi.den().roots(), true, "pole");
  const std::vector<Complex> zeros =
      split(phi.num().roots(), kind == PhaseKind::kMinimumPhase, "zero");

  const RationalFunction shape(Polynomial::from_roots(zeros),
                               Polynomial::from_roots(poles));
  // |H(0)|^2 = phi(0); neither has a root at the origin.
  const double h0 = shape(Complex(0.0, 0.0)).real();
  const double gain = std::sqrt(phi(Complex(0.0, 0.0)).real()) / std::abs(h0);
  return (h0 > 0.0 ? gain : -gain) * shape;
}

}  // namespace iqcfact
