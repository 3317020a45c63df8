#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/tolerances.hpp"

namespace iqcfact {

namespace detail {

// Swaps the adjacent diagonal entries k, k+1 of the upper-triangular T with a
// unitary rotation, updating the Schur vectors U.
inline void swap_schur_pair(Eigen::MatrixXcd& T, Eigen::MatrixXcd& U,
                            Eigen::Index k) {
  const Complex a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
  // Eigenvector of the 2x2 block for eigenvalue c.
  Complex x1 = b, x2 = c - a;
  const double nrm = std::hypot(std::abs(x1), std::abs(x2));
  if (nrm == 0.0) return;
  x1 /= nrm;
  x2 /= nrm;
  Eigen::Matrix2cd Q;
  Q << x1, -std::conj(x2), x2, std::conj(x1);
  const Eigen::Index n = T.rows();
  T.block(k, 0, 2, n) = Q.adjoint() * T.block(k, 0, 2, n);
  T.block(0, k, n, 2) = T.block(0, k, n, 2) * Q;
  U.block(0, k, U.rows(), 2) = U.block(0, k, U.rows(), 2) * Q;
  T(k + 1, k) = 0.0;
}

}  // namespace detail

/// Stabilizing solution of the Riccati equation attached to the Hamiltonian
/// H = [A11 A12; A21 A22] of size 2n: P = U2 U1^{-1} where [U1; U2] spans
/// the stable invariant subspace, obtained from a complex Schur form whose
/// eigenvalues are reordered so the stable half comes first.
///
/// Throws RiccatiFailure if the spectrum does not split n/n away from the
/// imaginary axis, if U1 is ill-conditioned (cond > 1e10), or if the result
/// is not real.
inline Eigen::MatrixXd stabilizing_riccati_solution(const Eigen::MatrixXd& H) {
  const Eigen::Index two_n = H.rows();
  if (H.cols() != two_n || two_n % 2 != 0)
    throw Error(ErrorCode::kDimensionMismatch, "Hamiltonian must be 2n x 2n");
  const Eigen::Index n = two_n / 2;
  if (n == 0) return Eigen::MatrixXd(0, 0);

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(H.cast<Complex>());
  if (schur.info() != Eigen::Success)
    throw Error(ErrorCode::kRiccatiFailure, "Schur decomposition failed");
  Eigen::MatrixXcd T = schur.matrixT();
  Eigen::MatrixXcd U = schur.matrixU();

  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  auto stable = [&](Eigen::Index k) { return T(k, k).real() < 0.0; };
  Eigen::Index n_stable = 0;
  for (Eigen::Index k = 0; k < two_n; ++k) {
    if (std::abs(T(k, k).real()) <= tol::kStability * scale)
      throw Error(ErrorCode::kRiccatiFailure,
                  "Hamiltonian has eigenvalues on the imaginary axis");
    if (stable(k)) ++n_stable;
  }
  if (n_stable != n)
    throw Error(ErrorCode::kRiccatiFailure,
                "Hamiltonian spectrum does not split evenly");

  // Bubble stable eigenvalues to the leading block.
  for (Eigen::Index pass = 0; pass < two_n; ++pass) {
    bool moved = false;
    for (Eigen::Index k = 0; k + 1 < two_n; ++k) {
      if (!stable(k) && stable(k + 1)) {
        detail::swap_schur_pair(T, U, k);
        moved = true;
      }
    }
    if (!moved) break;
  }

  const Eigen::MatrixXcd U1 = U.topLeftCorner(n, n);
  const Eigen::MatrixXcd U2 = U.bottomLeftCorner(n, n);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(U1).singularValues();
  if (sv(n - 1) == 0.0 || sv(0) / sv(n - 1) > 1e10)
    throw Error(ErrorCode::kRiccatiFailure,
                "stable subspace basis is ill-conditioned");
  const Eigen::MatrixXcd Pc = U1.transpose().partialPivLu().solve(U2.transpose()).transpose();
  if (Pc.imag().norm() > 1e-8 * std::max(1.0, Pc.real().norm()))
    throw Error(ErrorCode::kRiccatiFailure, "Riccati solution is not real");
  const Eigen::MatrixXd P = Pc.real();
  return 0.5 * (P + P.transpose());
}

}  // namespace iqcfact
