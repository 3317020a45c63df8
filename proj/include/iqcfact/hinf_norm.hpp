#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/rational_matrix.hpp"

namespace iqcfact {

inline double max_singular_value(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

/// Peak gain sup_w sigma_max(G(jw)) of a stable G: a log grid plus w = 0
/// and w = inf, then golden-section refinement in log w around the best
/// finite grid point.
inline double hinf_norm(const RationalMatrix& g,
                        const FrequencyGrid& grid = FrequencyGrid::standard()) {
  if (!is_stable(g).stable)
    throw Error(ErrorCode::kUnstableInput, "H-infinity norm of an unstable system");
  auto gain = [&](double w) { return max_singular_value(g.at_frequency(w)); };

  double best = 0.0;
  if (g.is_proper()) best = max_singular_value(g.value_at_infinity().cast<Complex>());
  best = std::max(best, gain(0.0));

  const auto& pts = grid.points();
  if (pts.empty()) return best;
  std::size_t arg = 0;
  double grid_best = -1.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double v = gain(pts[k]);
    if (v > grid_best) {
      grid_best = v;
      arg = k;
    }
  }
  best = std::max(best, grid_best);

  // Bracket the grid maximizer by its neighbours (or shrink toward 0 / inf at
  // the ends) and refine.
  double lo = std::log(arg > 0 ? pts[arg - 1] : pts[0] / 10.0);
  double hi = std::log(arg + 1 < pts.size() ? pts[arg + 1] : pts.back() * 10.0);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = gain(std::exp(x1)), f2 = gain(std::exp(x2));
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = gain(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = gain(std::exp(x2));
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace iqcfact
