#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/rational_matrix.hpp"

namespace iqcfact {

/// Outcome of a grid-checked frequency condition. margin > 0 exactly when
/// the condition holds; worst_frequency is where the margin is attained
/// (+inf for the value at infinity).
struct ConditionReport {
  std::string name;
  bool satisfied = false;
  double margin = 0.0;
  double worst_frequency = 0.0;
  std::string notes;
  /// Largest value of the checked curve (for quadratic-form conditions).
  double curve_max = 0.0;
};

inline ConditionReport make_condition_report(std::string name, double margin,
                                             double worst_frequency,
                                             std::string notes = {},
                                             double curve_max = 0.0) {
  return ConditionReport{std::move(name), margin > 0.0, margin, worst_frequency,
                         std::move(notes), curve_max};
}

/// min over the grid of min(lambda_min(Pi11) - eps, -lambda_max(Pi22) - eps).
inline ConditionReport is_positive_negative(const Multiplier& pi,
                                            const FrequencyGrid& grid,
                                            double eps) {
  const int m = pi.m(), l = pi.l();
  double margin = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double w : grid.evaluation_points()) {
    const Eigen::MatrixXcd p = pi.at_frequency(w);
    double here = std::numeric_limits<double>::infinity();
    if (m > 0) here = std::min(here, hermitian_eigenvalues(p.topLeftCorner(m, m))(0) - eps);
    if (l > 0)
      here = std::min(here, -hermitian_eigenvalues(p.bottomRightCorner(l, l))(l - 1) - eps);
    if (here < margin) {
      margin = here;
      worst = w;
    }
  }
  std::ostringstream notes;
  notes << "Pi11 >= eps*I and Pi22 <= -eps*I with eps = " << eps;
  return make_condition_report("positive-negative", margin, worst, notes.str());
}

namespace detail {

// Largest eigenvalue of [X(jw); I]^* Pi(jw) [X(jw); I] over the grid, with
// its argmax. X is m x l.
struct FormCurve {
  double max_value = -std::numeric_limits<double>::infinity();
  double argmax = 0.0;
};

inline FormCurve graph_form_curve(const RationalMatrix& x, const Multiplier& pi,
                                  const FrequencyGrid& grid) {
  if (x.rows() != pi.m() || x.cols() != pi.l())
    throw Error(ErrorCode::kDimensionMismatch,
                "operator is " + x.shape() + " but the multiplier blocks are " +
                    std::to_string(pi.m()) + "x" + std::to_string(pi.l()));
  FormCurve curve;
  const int l = pi.l();
  for (double w : grid.evaluation_points()) {
    Eigen::MatrixXcd stacked(pi.m() + l, l);
    stacked.topRows(pi.m()) = x.at_frequency(w);
    stacked.bottomRows(l) = Eigen::MatrixXcd::Identity(l, l);
    const Eigen::MatrixXcd form = stacked.adjoint() * pi.at_frequency(w) * stacked;
    const double top = hermitian_eigenvalues(form)(l - 1);
    if (top > curve.max_value) {
      curve.max_value = top;
      curve.argmax = w;
    }
  }
  return curve;
}

inline ConditionReport form_condition(const char* name, const RationalMatrix& x,
                                      const Multiplier& pi,
                                      const FrequencyGrid& grid, double eps) {
  const FormCurve c = graph_form_curve(x, pi, grid);
  std::ostringstream notes;
  notes << "[X;I]^* Pi [X;I] < -eps*I with eps = " << eps
        << "; curve max = " << c.max_value;
  return make_condition_report(name, -c.max_value - eps, c.argmax, notes.str(),
                               c.max_value);
}

}  // namespace detail

/// [G; I]^* Pi [G; I] < -eps I on the grid, for a stable m x l plant G.
inline ConditionReport gpg_condition(const RationalMatrix& g, const Multiplier& pi,
                                     const FrequencyGrid& grid, double eps) {
  if (!is_stable(g).stable)
    throw Error(ErrorCode::kUnstableG, "G must be stable");
  return detail::form_condition("gpg", g, pi, grid, eps);
}

/// Strict inverse-graph IQC of a stable LTI Delta2 (m x l). For linear
/// operators this is the same quadratic form as gpg_condition.
inline ConditionReport inverse_graph_condition(const RationalMatrix& delta2,
                                               const Multiplier& pi,
                                               const FrequencyGrid& grid,
                                               double eps) {
  if (!is_stable(delta2).stable)
    throw Error(ErrorCode::kUnstableDelta, "Delta2 must be stable");
  return detail::form_condition("inverse-graph", delta2, pi, grid, eps);
}

}  // namespace iqcfact
