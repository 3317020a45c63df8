#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/rational.hpp"
#include "iqcfact/tolerances.hpp"

namespace iqcfact {

/// Dense matrix of real rational functions of s, stored row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(std::size_t(rows) * cols) {
    if (rows < 0 || cols < 0)
      throw Error(ErrorCode::kInvalidArgument, "negative matrix dimension");
  }
  RationalMatrix(std::initializer_list<std::initializer_list<RationalFunction>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != cols_)
        throw Error(ErrorCode::kDimensionMismatch, "ragged rational matrix");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static RationalMatrix identity(int n) {
    RationalMatrix r(n, n);
    for (int i = 0; i < n; ++i) r(i, i) = 1.0;
    return r;
  }

  static RationalMatrix constant(const Eigen::MatrixXd& m) {
    RationalMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows_; ++i)
      for (int j = 0; j < r.cols_; ++j) r(i, j) = m(i, j);
    return r;
  }

  static RationalMatrix scalar(const RationalFunction& f) {
    RationalMatrix r(1, 1);
    r(0, 0) = f;
    return r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  RationalFunction& operator()(int i, int j) { return entries_[index(i, j)]; }
  const RationalFunction& operator()(int i, int j) const {
    return entries_[index(i, j)];
  }

  Eigen::MatrixXcd evaluate(Complex s) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j)(s);
    return out;
  }

  /// Value at s = j*omega; omega = +inf yields the feedthrough matrix.
  Eigen::MatrixXcd at_frequency(double omega) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).at_frequency(omega);
    return out;
  }

  Eigen::MatrixXd value_at_infinity() const {
    Eigen::MatrixXd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).value_at_infinity();
    return out;
  }

  bool is_proper() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const RationalFunction& f) { return f.is_proper(); });
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const RationalFunction& f) { return f.is_zero(); });
  }

  /// R~(s) = R(-s)^T.
  RationalMatrix para_conjugate() const {
    RationalMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j).para_conjugate();
    return r;
  }

  RationalMatrix transpose() const {
    RationalMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  RationalMatrix block(int row, int col, int nrows, int ncols) const {
    if (row < 0 || col < 0 || row + nrows > rows_ || col + ncols > cols_)
      throw Error(ErrorCode::kDimensionMismatch, "block out of range");
    RationalMatrix r(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
      for (int j = 0; j < ncols; ++j) r(i, j) = (*this)(row + i, col + j);
    return r;
  }

  void set_block(int row, int col, const RationalMatrix& b) {
    if (row < 0 || col < 0 || row + b.rows_ > rows_ || col + b.cols_ > cols_)
      throw Error(ErrorCode::kDimensionMismatch, "block out of range");
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) (*this)(row + i, col + j) = b(i, j);
  }

  RationalMatrix inverse_entrywise() const {
    RationalMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = entries_[k].inverse();
    return r;
  }

  /// Determinant by cofactor expansion (sizes here stay small).
  RationalFunction determinant() const;

  /// Matrix inverse as adjugate / determinant.
  RationalMatrix inverse() const;

  RationalMatrix operator-() const {
    RationalMatrix r = *this;
    for (auto& e : r.entries_) e = -e;
    return r;
  }

  friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    a.require_same_shape(b, "add");
    RationalMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.entries_.size(); ++k)
      r.entries_[k] = a.entries_[k] + b.entries_[k];
    return r;
  }

  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    return a + (-b);
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_)
      throw Error(ErrorCode::kDimensionMismatch,
                  "matmul " + a.shape() + " * " + b.shape());
    RationalMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        RationalFunction acc;
        for (int k = 0; k < a.cols_; ++k) acc = acc + a(i, k) * b(k, j);
        r(i, j) = acc;
      }
    return r;
  }

  friend RationalMatrix operator*(double k, const RationalMatrix& m) {
    RationalMatrix r = m;
    for (auto& e : r.entries_) e = k * e;
    return r;
  }

  /// Elementwise product.
  RationalMatrix hadamard(const RationalMatrix& b) const {
    require_same_shape(b, "hadamard");
    RationalMatrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      r.entries_[k] = entries_[k] * b.entries_[k];
    return r;
  }

  bool approx_equal(const RationalMatrix& b, double rel_tol = tol::kEquality) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) return false;
    for (std::size_t k = 0; k < entries_.size(); ++k)
      if (!entries_[k].approx_equal(b.entries_[k], rel_tol)) return false;
    return true;
  }

  std::string shape() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  const std::vector<RationalFunction>& entries() const { return entries_; }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= rows_ || j >= cols_)
      throw Error(ErrorCode::kDimensionMismatch, "entry index out of range");
    return std::size_t(i) * cols_ + j;
  }

  void require_same_shape(const RationalMatrix& b, const char* op) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(op) + " " + shape() + " vs " + b.shape());
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<RationalFunction> entries_;
};

inline RationalFunction RationalMatrix::determinant() const {
  if (!is_square())
    throw Error(ErrorCode::kDimensionMismatch, "determinant of " + shape());
  if (rows_ == 0) return 1.0;
  if (rows_ == 1) return (*this)(0, 0);
  if (rows_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
  RationalFunction acc;
  for (int j = 0; j < cols_; ++j) {
    if ((*this)(0, j).is_zero()) continue;
    RationalMatrix minor(rows_ - 1, cols_ - 1);
    for (int i = 1; i < rows_; ++i)
      for (int k = 0, c = 0; k < cols_; ++k) {
        if (k == j) continue;
        minor(i - 1, c++) = (*this)(i, k);
      }
    const RationalFunction term = (*this)(0, j) * minor.determinant();
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

inline RationalMatrix RationalMatrix::inverse() const {
  const RationalFunction det = determinant();
  if (det.is_zero())
    throw Error(ErrorCode::kSingularEntry, "singular rational matrix");
  const RationalFunction inv_det = det.inverse();
  const int n = rows_;
  RationalMatrix r(n, n);
  if (n == 1) {
    r(0, 0) = inv_det;
    return r;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RationalMatrix minor(n - 1, n - 1);
      for (int a = 0, ra = 0; a < n; ++a) {
        if (a == i) continue;
        for (int b = 0, cb = 0; b < n; ++b) {
          if (b == j) continue;
          minor(ra, cb++) = (*this)(a, b);
        }
        ++ra;
      }
      const RationalFunction cof = minor.determinant() * inv_det;
      r(j, i) = ((i + j) % 2 == 0) ? cof : -cof;
    }
  return r;
}

/// Root with multiplicity.
struct RootCount {
  Complex value;
  int multiplicity = 1;
};

struct PoleZeroReport {
  std::vector<RootCount> poles;
  std::vector<RootCount> zeros;
};

namespace detail {

inline void accumulate_roots(const std::vector<Complex>& roots,
                             std::vector<RootCount>& out) {
  for (const Complex& r : roots) {
    auto it = std::find_if(out.begin(), out.end(), [&](const RootCount& rc) {
      return std::abs(rc.value - r) <= tol::kRootCluster * (1.0 + std::abs(r));
    });
    if (it == out.end())
      out.push_back({r, 1});
    else
      ++it->multiplicity;
  }
}

}  // namespace detail

/// Union over entries of the canonical-form poles and zeros. Roots repeated
/// across entries accumulate multiplicity.
inline PoleZeroReport poles_zeros(const RationalMatrix& r) {
  PoleZeroReport report;
  for (const RationalFunction& f : r.entries()) {
    detail::accumulate_roots(f.poles(), report.poles);
    if (!f.is_zero()) detail::accumulate_roots(f.zeros(), report.zeros);
  }
  return report;
}

struct StabilityReport {
  bool stable = true;
  /// -max Re(pole); +inf when there are no poles.
  double margin = std::numeric_limits<double>::infinity();
};

inline StabilityReport is_stable(const RationalMatrix& r,
                                 double tolerance = tol::kStability) {
  StabilityReport rep;
  double max_re = -std::numeric_limits<double>::infinity();
  for (const RationalFunction& f : r.entries())
    for (const Complex& p : f.poles()) max_re = std::max(max_re, p.real());
  rep.margin = -max_re;
  rep.stable = max_re < -tolerance;
  return rep;
}

inline StabilityReport is_stable(const RationalFunction& f,
                                 double tolerance = tol::kStability) {
  return is_stable(RationalMatrix::scalar(f), tolerance);
}

/// [top; bottom].
inline RationalMatrix vstack(const RationalMatrix& top, const RationalMatrix& bottom) {
  if (top.cols() != bottom.cols())
    throw Error(ErrorCode::kDimensionMismatch, "vstack " + top.shape() + " / " + bottom.shape());
  RationalMatrix r(top.rows() + bottom.rows(), top.cols());
  r.set_block(0, 0, top);
  r.set_block(top.rows(), 0, bottom);
  return r;
}

/// [left, right].
inline RationalMatrix hstack(const RationalMatrix& left, const RationalMatrix& right) {
  if (left.rows() != right.rows())
    throw Error(ErrorCode::kDimensionMismatch, "hstack " + left.shape() + " | " + right.shape());
  RationalMatrix r(left.rows(), left.cols() + right.cols());
  r.set_block(0, 0, left);
  r.set_block(0, left.cols(), right);
  return r;
}

}  // namespace iqcfact
