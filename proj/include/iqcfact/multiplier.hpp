#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/tolerances.hpp"

namespace iqcfact {

/// Block sizes (m, l) of a multiplier: Pi11 is m x m, Pi22 is l x l.
struct BlockSizes {
  int m = 1;
  int l = 1;
  int total() const { return m + l; }
  friend bool operator==(const BlockSizes&, const BlockSizes&) = default;
};

/// J_{m,l} = diag(I_m, -I_l).
struct SignatureMatrix {
  int m = 1;
  int l = 1;

  SignatureMatrix() = default;
  SignatureMatrix(int m_, int l_) : m(m_), l(l_) {
    if (m < 0 || l < 0 || m + l == 0)
      throw Error(ErrorCode::kInvalidArgument, "signature sizes must be positive");
  }

  Eigen::MatrixXd matrix() const {
    Eigen::VectorXd d(m + l);
    d.head(m).setOnes();
    d.tail(l).setConstant(-1.0);
    return d.asDiagonal();
  }
};

/// Recognizes diag(I_m, -I_l) exactly; returns the block sizes if so.
inline std::optional<BlockSizes> as_signature(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) return std::nullopt;
  const Eigen::Index n = M.rows();
  Eigen::Index m = 0;
  while (m < n && M(m, m) == 1.0) ++m;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double want = (i != j) ? 0.0 : (i < m ? 1.0 : -1.0);
      if (M(i, j) != want) return std::nullopt;
    }
  return BlockSizes{static_cast<int>(m), static_cast<int>(n - m)};
}

/// Para-Hermitian rational multiplier bounded on the imaginary axis.
class Multiplier {
 public:
  Multiplier() = default;
  Multiplier(RationalMatrix matrix, BlockSizes blocks)
      : matrix_(std::move(matrix)), blocks_(blocks) {
    if (blocks_.m < 0 || blocks_.l < 0 || blocks_.total() == 0 ||
        matrix_.rows() != blocks_.total() || matrix_.cols() != blocks_.total())
      throw Error(ErrorCode::kDimensionMismatch,
                  "multiplier must be square of size m + l");
    if (!matrix_.para_conjugate().approx_equal(matrix_))
      throw Error(ErrorCode::kNotParaHermitian,
                  "multiplier differs from its para-conjugate");
    for (const RationalFunction& f : matrix_.entries())
      for (const Complex& p : f.poles())
        if (std::abs(p.real()) <= tol::kStability * (1.0 + std::abs(p)))
          throw Error(ErrorCode::kNotInRLinf,
                      "multiplier entry has a pole on the imaginary axis");
  }

  /// Splits an even-sized matrix into equal blocks.
  explicit Multiplier(RationalMatrix matrix)
      : Multiplier(matrix, halves(matrix)) {}

  const RationalMatrix& matrix() const { return matrix_; }
  const BlockSizes& blocks() const { return blocks_; }
  int m() const { return blocks_.m; }
  int l() const { return blocks_.l; }

  RationalMatrix pi11() const { return matrix_.block(0, 0, m(), m()); }
  RationalMatrix pi12() const { return matrix_.block(0, m(), m(), l()); }
  RationalMatrix pi21() const { return matrix_.block(m(), 0, l(), m()); }
  RationalMatrix pi22() const { return matrix_.block(m(), m(), l(), l()); }

  Eigen::MatrixXcd at_frequency(double omega) const {
    return matrix_.at_frequency(omega);
  }

 private:
  static BlockSizes halves(const RationalMatrix& r) {
    if (r.rows() % 2 != 0 || r.rows() == 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "block sizes required for an odd-sized multiplier");
    return {r.rows() / 2, r.rows() / 2};
  }

  RationalMatrix matrix_;
  BlockSizes blocks_;
};

/// Eigenvalues (ascending) of the Hermitian part of a square complex matrix.
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& x) {
  if (x.size() == 0) return {};
  const Eigen::MatrixXcd h = 0.5 * (x + x.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

}  // namespace iqcfact
