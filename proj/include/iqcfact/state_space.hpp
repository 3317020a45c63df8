#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/rational_matrix.hpp"

namespace iqcfact {

/// Continuous-time realization x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  StateSpace() = default;
  StateSpace(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
             Eigen::MatrixXd d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    validate();
  }

  /// Static gain with an empty state.
  static StateSpace static_gain(const Eigen::MatrixXd& d) {
    return StateSpace(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, d.cols()),
                      Eigen::MatrixXd(d.rows(), 0), d);
  }

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return D.cols(); }
  Eigen::Index outputs() const { return D.rows(); }

  void validate() const {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n ||
        C.rows() != D.rows() || B.cols() != D.cols())
      throw Error(ErrorCode::kDimensionMismatch,
                  "state-space matrices are not conformal");
  }

  /// C (sI - A)^{-1} B + D.
  Eigen::MatrixXcd transfer(Complex s) const {
    Eigen::MatrixXcd out = D.cast<Complex>();
    if (states() == 0) return out;
    const Eigen::MatrixXcd sI_A =
        s * Eigen::MatrixXcd::Identity(states(), states()) - A.cast<Complex>();
    out += C.cast<Complex>() * sI_A.partialPivLu().solve(B.cast<Complex>());
    return out;
  }
};

/// Controllable-canonical realization of every entry, assembled
/// block-diagonally. Not minimal: entries sharing poles get separate states.
inline StateSpace realize(const RationalMatrix& r) {
  const int p = r.rows(), m = r.cols();
  int n = 0;
  for (const RationalFunction& f : r.entries()) {
    if (!f.is_proper())
      throw Error(ErrorCode::kImproperEntry,
                  "cannot realize an improper entry (deg num > deg den)");
    n += f.den().degree();
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, m);
  int offset = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j) {
      const RationalFunction& f = r(i, j);
      const int k = f.den().degree();
      // den is monic in canonical form.
      const auto [q, rem] = f.num().divmod(f.den());
      D(i, j) = q.coeff(0);
      if (k == 0) continue;
      for (int a = 0; a + 1 < k; ++a) A(offset + a, offset + a + 1) = 1.0;
      for (int a = 0; a < k; ++a) {
        A(offset + k - 1, offset + a) = -f.den().coeff(a);
        C(i, offset + a) = rem.coeff(a);
      }
      B(offset + k - 1, j) = 1.0;
      offset += k;
    }
  return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

/// Realization of the inverse system; needs a square, well-conditioned D.
inline StateSpace invert_ss(const StateSpace& s) {
  if (s.D.rows() != s.D.cols())
    throw Error(ErrorCode::kSingularFeedthrough, "feedthrough is not square");
  if (s.D.size() == 0) return s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.D);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0 || sv(0) / smin > 1e12)
    throw Error(ErrorCode::kSingularFeedthrough,
                "feedthrough is singular; the system is not biproper");
  const Eigen::MatrixXd Dinv = s.D.inverse();
  return StateSpace(s.A - s.B * Dinv * s.C, s.B * Dinv, -Dinv * s.C, Dinv);
}

}  // namespace iqcfact
