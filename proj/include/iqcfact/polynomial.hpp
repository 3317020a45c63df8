#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iqcfact/error.hpp"
#include "iqcfact/tolerances.hpp"

namespace iqcfact {

using Complex = std::complex<double>;

/// Real polynomial in s with coefficients stored in ascending powers.
/// The zero polynomial has an empty coefficient vector and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(0.0); }
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    trim(0.0);
  }

  static Polynomial constant(double value) { return Polynomial({value}); }

  /// The monomial s.
  static Polynomial s() { return Polynomial({0.0, 1.0}); }

  /// leading * prod (s - r). Complex roots must come in conjugate pairs; only
  /// the member with positive imaginary part is used to build each quadratic.
  static Polynomial from_roots(std::span<const Complex> roots,
                               double leading = 1.0) {
    Polynomial p = constant(leading);
    for (const Complex& r : roots) {
      if (r.imag() > 0.0) {
        p = p * Polynomial({std::norm(r), -2.0 * r.real(), 1.0});
      } else if (r.imag() == 0.0) {
        p = p * Polynomial({-r.real(), 1.0});
      }
    }
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : 0.0;
  }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  double norm_inf() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  Complex operator()(Complex s) const {
    Complex acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  double operator()(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  /// s^-n p(s) evaluated as a polynomial in z = 1/s; avoids overflow for
  /// large |s|.
  Complex reversed_at(Complex z) const {
    Complex acc = 0.0;
    for (double c : c_) acc = acc * z + c;
    return acc;
  }

  double reversed_magnitude_at(double r) const {
    double acc = 0.0;
    for (double c : c_) acc = acc * r + std::abs(c);
    return acc;
  }

  /// Sum of |c_k| |s|^k; the scale against which evaluation round-off is
  /// measured.
  double magnitude_at(Complex s) const {
    double acc = 0.0;
    const double r = std::abs(s);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
      acc = acc * r + std::abs(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = k * c_[k];
    return Polynomial(std::move(d));
  }

  /// p(-s).
  Polynomial reflected() const {
    std::vector<double> r = c_;
    for (std::size_t k = 1; k < r.size(); k += 2) r[k] = -r[k];
    return Polynomial(std::move(r));
  }

  Polynomial operator-() const {
    std::vector<double> r = c_;
    for (double& v : r) v = -v;
    return Polynomial(std::move(r));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
    Polynomial p;
    p.c_ = std::move(r);
    // Leading terms that cancel leave round-off behind; drop it.
    p.trim(64.0 * std::numeric_limits<double>::epsilon() *
           std::max(a.norm_inf(), b.norm_inf()));
    return p;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + (-b);
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(double k, const Polynomial& p) {
    if (k == 0.0) return {};
    std::vector<double> r = p.c_;
    for (double& v : r) v *= k;
    return Polynomial(std::move(r));
  }

  /// Quotient and remainder of long division by a nonzero divisor.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const {
    if (divisor.is_zero())
      throw Error(ErrorCode::kSingularEntry, "polynomial division by zero");
    const int n = degree();
    const int d = divisor.degree();
    if (n < d) return {Polynomial{}, *this};
    std::vector<double> rem = c_;
    std::vector<double> quot(n - d + 1, 0.0);
    for (int k = n - d; k >= 0; --k) {
      const double q = rem[k + d] / divisor.leading();
      quot[k] = q;
      for (int j = 0; j <= d; ++j) rem[k + j] -= q * divisor.c_[j];
      rem[k + d] = 0.0;
    }
    rem.resize(d);
    Polynomial r;
    r.c_ = std::move(rem);
    r.trim(64.0 * std::numeric_limits<double>::epsilon() * norm_inf());
    return {Polynomial(std::move(quot)), r};
  }

  /// Roots via eigenvalues of the balanced companion matrix, polished with
  /// Newton steps. Clusters of nearly equal roots are replaced by their
  /// centroid so that multiple roots come out consistently. Complex roots are
  /// returned in exact conjugate pairs.
  std::vector<Complex> roots() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim(double abs_tol) {
    while (!c_.empty() && std::abs(c_.back()) <= abs_tol) c_.pop_back();
  }

  std::vector<double> c_;
};

namespace detail {

// Diagonal similarity scaling with powers of two (Parlett-Reinsch), which
// keeps companion-matrix eigenvalues accurate for badly scaled coefficients.
inline void balance(Eigen::MatrixXd& a) {
  const double radix = 2.0;
  const Eigen::Index n = a.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

// Groups roots whose mutual distance is below the cluster tolerance
// (transitively) and returns one centroid per member, preserving count.
inline std::vector<Complex> merge_clusters(std::vector<Complex> roots) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale =
          1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]));
      if (std::abs(roots[i] - roots[j]) <= tol::kRootCluster * scale)
        parent[find(i)] = find(j);
    }
  std::vector<Complex> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[find(i)] += roots[i];
    ++count[find(i)];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (count[find(i)] > 1) roots[i] = sum[find(i)] / double(count[find(i)]);
  }
  return roots;
}

// Eigenvalues of a multiple root split by about sqrt(eps * cond), which can
// exceed the merge tolerance. Candidate groups within a loose radius are
// polished as one root of the (k-1)-th derivative and kept merged only if the
// polynomial then vanishes to rounding level; otherwise every member gets
// plain Newton on p.
inline std::vector<Complex> polish_roots(const Polynomial& p,
                                         std::vector<Complex> roots) {
  const std::size_t n = roots.size();
  const auto& c = p.coeffs();
  auto noise = [&](Complex z) {
    double s = 0.0, zk = 1.0;
    for (double ck : c) {
      s += std::abs(ck) * zk;
      zk *= std::abs(z);
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * s;
  };
  auto newton = [](const Polynomial& f0, const Polynomial& f1, Complex r) {
    for (int it = 0; it < 8; ++it) {
      const Complex f = f0(r);
      const Complex df = f1(r);
      if (f == 0.0 || df == 0.0) break;
      const Complex next = r - f / df;
      if (!(std::abs(f0(next)) < std::abs(f))) break;
      r = next;
    }
    return r;
  };
  std::vector<std::size_t> group(n);
  std::iota(group.begin(), group.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(roots[i] - roots[j]) <= 1e-3 * (1.0 + std::abs(roots[i]))) {
        const std::size_t from = group[i], to = group[j];
        for (std::size_t& g : group)
          if (g == from) g = to;
      }
  std::vector<Polynomial> derivs{p, p.derivative()};
  std::vector<Complex> out(roots);
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members;
    Complex centroid = 0.0;
    for (std::size_t j = i; j < n; ++j)
      if (group[j] == group[i]) {
        members.push_back(j);
        centroid += roots[j];
      }
    const std::size_t k = members.size();
    centroid /= double(k);
    bool merged = false;
    if (k > 1) {
      while (derivs.size() < k + 1) derivs.push_back(derivs.back().derivative());
      const Complex r = newton(derivs[k - 1], derivs[k], centroid);
      if (std::abs(p(r)) <= noise(r)) {
        for (std::size_t j : members) out[j] = r;
        merged = true;
      }
    }
    if (!merged)
      for (std::size_t j : members) out[j] = newton(derivs[0], derivs[1], roots[j]);
    for (std::size_t j : members) done[j] = true;
  }
  return out;
}

// Forces exact conjugate symmetry: near-real roots become real, and every
// root with positive imaginary part is mirrored onto its partner.
inline std::vector<Complex> symmetrize_conjugates(std::vector<Complex> roots) {
  for (Complex& r : roots) {
    if (std::abs(r.imag()) <= 1e-12 * (1.0 + std::abs(r))) r = {r.real(), 0.0};
  }
  std::vector<Complex> upper, real;
  std::vector<Complex> lower;
  for (const Complex& r : roots) {
    if (r.imag() > 0.0)
      upper.push_back(r);
    else if (r.imag() < 0.0)
      lower.push_back(r);
    else
      real.push_back(r);
  }
  if (upper.size() != lower.size())
    throw Error(ErrorCode::kRootFindingFailure,
                "complex roots of a real polynomial are not conjugate-paired");
  std::vector<bool> used(lower.size(), false);
  std::vector<Complex> out = real;
  for (const Complex& u : upper) {
    std::size_t best = lower.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(std::conj(lower[k]) - u);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    const Complex avg = 0.5 * (u + std::conj(lower[best]));
    out.push_back(avg);
    out.push_back(std::conj(avg));
  }
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace detail

inline std::vector<Complex> Polynomial::roots() const {
  const int n = degree();
  if (n <= 0) return {};
  std::vector<Complex> result;
  // Exact zero roots factor out without eigenvalue error.
  int zeros = 0;
  while (zeros < n && c_[zeros] == 0.0) ++zeros;
  const int m = n - zeros;
  if (m == 1) {
    result.emplace_back(-c_[zeros] / c_[zeros + 1], 0.0);
  } else if (m > 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) companion(i, m - 1) = -c_[zeros + i] / c_[n];
    detail::balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorCode::kRootFindingFailure,
                  "companion eigenvalue iteration did not converge");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      result.push_back(solver.eigenvalues()[i]);
    result = detail::polish_roots(*this, std::move(result));
  }
  for (int k = 0; k < zeros; ++k) result.emplace_back(0.0, 0.0);
  for (const Complex& r : result) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw Error(ErrorCode::kRootFindingFailure, "non-finite root");
  }
  return detail::symmetrize_conjugates(
      detail::merge_clusters(std::move(result)));
}

}  // namespace iqcfact
