#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iqcfact/error.hpp"
#include "iqcfact/polynomial.hpp"
#include "iqcfact/tolerances.hpp"

namespace iqcfact {

namespace detail {

// Monic common factor of two polynomials built from their shared roots, or
// the constant 1 when none match. Used for least common denominators, so
// that sums do not square shared poles.
inline Polynomial common_factor(const Polynomial& a, const Polynomial& b) {
  if (a.degree() < 1 || b.degree() < 1) return Polynomial::constant(1.0);
  const std::vector<Complex> ra = a.roots();
  const std::vector<Complex> rb = b.roots();
  std::vector<bool> used(rb.size(), false);
  std::vector<Complex> shared;
  for (const Complex& r : ra) {
    if (r.imag() < 0.0) continue;
    std::size_t best = rb.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rb.size(); ++j) {
      if (used[j] || rb[j].imag() < 0.0 || (rb[j].imag() == 0.0) != (r.imag() == 0.0)) continue;
      const double d = std::abs(r - rb[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == rb.size() || best_d > 1e-6 * (1.0 + std::abs(r))) continue;
    used[best] = true;
    shared.push_back(0.5 * (r + rb[best]));
  }
  if (shared.empty()) return Polynomial::constant(1.0);
  Polynomial g = Polynomial::from_roots(shared, 1.0);
  // Reject the factor unless it really divides both.
  const auto [qa, ra_rem] = a.divmod(g);
  const auto [qb, rb_rem] = b.divmod(g);
  if (ra_rem.norm_inf() > 1e-6 * a.norm_inf() || rb_rem.norm_inf() > 1e-6 * b.norm_inf())
    return Polynomial::constant(1.0);
  return g;
}

}  // namespace detail

/// Real rational function num(s)/den(s) kept in canonical form: the
/// denominator is monic and numerator/denominator share no root within the
/// cancellation tolerance. The zero function is 0/1.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
  RationalFunction(double value)  // NOLINT(google-explicit-constructor)
      : num_(Polynomial::constant(value)), den_(Polynomial::constant(1.0)) {}
  RationalFunction(Polynomial num, Polynomial den)
      : num_(std::move(num)), den_(std::move(den)) {
    canonicalize();
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return den_.degree() == 0 && num_.degree() <= 0; }
  bool is_proper() const { return num_.degree() <= den_.degree(); }
  bool is_strictly_proper() const { return num_.degree() < den_.degree(); }
  /// Proper with nonzero value at infinity.
  bool is_biproper() const { return num_.degree() == den_.degree(); }

  /// Limit as s -> infinity. Requires a proper function.
  double value_at_infinity() const {
    if (!is_proper())
      throw Error(ErrorCode::kImproperEntry,
                  "value at infinity of an improper rational function");
    return num_.degree() == den_.degree() ? num_.leading() / den_.leading()
                                          : 0.0;
  }

  Complex operator()(Complex s) const {
    const bool large = std::abs(s) > 1.0;
    const Complex z = large ? 1.0 / s : s;
    const Complex d = large ? den_.reversed_at(z) : den_(s);
    const double mag = large ? den_.reversed_magnitude_at(std::abs(z)) : den_.magnitude_at(s);
    if (std::abs(d) <= tol::kPoleProximity * mag)
      throw Error(ErrorCode::kPoleProximity,
                  "evaluation at s = (" + std::to_string(s.real()) + ", " +
                      std::to_string(s.imag()) + ") hits a pole");
    if (!large) return num_(s) / d;
    const int excess = num_.degree() - den_.degree();
    return num_.reversed_at(z) / d * std::pow(s, excess);
  }

  /// Value on the imaginary axis; omega = +inf gives the value at infinity.
  Complex at_frequency(double omega) const {
    if (std::isinf(omega)) return value_at_infinity();
    return (*this)(Complex(0.0, omega));
  }

  std::vector<Complex> poles() const { return den_.roots(); }
  std::vector<Complex> zeros() const { return num_.roots(); }

  /// R(-s).
  RationalFunction para_conjugate() const {
    return RationalFunction(num_.reflected(), den_.reflected());
  }

  RationalFunction inverse() const {
    if (is_zero())
      throw Error(ErrorCode::kSingularEntry, "inverse of the zero function");
    return RationalFunction(den_, num_);
  }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFunction operator+(const RationalFunction& a,
                                    const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    const Polynomial g = detail::common_factor(a.den_, b.den_);
    if (g.degree() < 1)
      return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    const Polynomial qa = a.den_.divmod(g).first;
    const Polynomial qb = b.den_.divmod(g).first;
    return RationalFunction(a.num_ * qb + b.num_ * qa, a.den_ * qb);
  }

  friend RationalFunction operator-(const RationalFunction& a,
                                    const RationalFunction& b) {
    return a + (-b);
  }

  friend RationalFunction operator*(const RationalFunction& a,
                                    const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_constant()) return a.num_.leading() * b;
    if (b.is_constant()) return b.num_.leading() * a;
    // Cancel across the operands first; their roots are far better
    // conditioned than those of the full product.
    Polynomial an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
    const Polynomial g1 = detail::common_factor(an, bd);
    if (g1.degree() > 0) {
      an = an.divmod(g1).first;
      bd = bd.divmod(g1).first;
    }
    const Polynomial g2 = detail::common_factor(bn, ad);
    if (g2.degree() > 0) {
      bn = bn.divmod(g2).first;
      ad = ad.divmod(g2).first;
    }
    return RationalFunction(an * bn, ad * bd);
  }

  friend RationalFunction operator*(double k, const RationalFunction& r) {
    RationalFunction out = r;
    out.num_ = k * r.num_;
    if (out.num_.is_zero()) out.den_ = Polynomial::constant(1.0);
    return out;
  }

  friend RationalFunction operator/(const RationalFunction& a,
                                    const RationalFunction& b) {
    return a * b.inverse();
  }

  /// Equality of canonical forms with relative coefficient tolerance,
  /// evaluated on the cross products a.num*b.den and b.num*a.den.
  bool approx_equal(const RationalFunction& other,
                    double rel_tol = tol::kEquality) const {
    const Polynomial lhs = num_ * other.den_;
    const Polynomial rhs = other.num_ * den_;
    const double scale = std::max(lhs.norm_inf(), rhs.norm_inf());
    if (scale == 0.0) return true;
    const int n = std::max(lhs.degree(), rhs.degree());
    for (int k = 0; k <= n; ++k) {
      if (std::abs(lhs.coeff(k) - rhs.coeff(k)) > rel_tol * scale) return false;
    }
    return true;
  }

 private:
  void canonicalize();

  Polynomial num_;
  Polynomial den_;
};

inline void RationalFunction::canonicalize() {
  if (den_.is_zero())
    throw Error(ErrorCode::kSingularEntry, "zero denominator");
  if (num_.is_zero()) {
    den_ = Polynomial::constant(1.0);
    return;
  }
  if (num_.degree() >= 1 && den_.degree() >= 1) {
    std::vector<Complex> zs = num_.roots();
    std::vector<Complex> ps = den_.roots();
    std::vector<bool> z_gone(zs.size(), false), p_gone(ps.size(), false);
    bool cancelled = false;
    // Match upper-half-plane and real roots only; a complex match takes its
    // conjugate partners along so the coefficients stay real.
    auto partner = [](const std::vector<Complex>& v, std::vector<bool>& gone,
                      const Complex& target) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!gone[k] && v[k] == target) {
          gone[k] = true;
          return;
        }
      }
    };
    for (std::size_t i = 0; i < zs.size(); ++i) {
      if (z_gone[i] || zs[i].imag() < 0.0) continue;
      const bool real_zero = zs[i].imag() == 0.0;
      std::size_t best = ps.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ps.size(); ++j) {
        if (p_gone[j] || ps[j].imag() < 0.0) continue;
        if ((ps[j].imag() == 0.0) != real_zero) continue;
        const double d = std::abs(zs[i] - ps[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best == ps.size()) continue;
      const double scale =
          1.0 + std::max(std::abs(zs[i]), std::abs(ps[best]));
      if (best_d <= tol::kCancellation * scale) {
        z_gone[i] = true;
        p_gone[best] = true;
        if (!real_zero) {
          partner(zs, z_gone, std::conj(zs[i]));
          partner(ps, p_gone, std::conj(ps[best]));
        }
        cancelled = true;
      }
    }
    if (cancelled) {
      // Divide out the shared factor rather than rebuilding from roots, so
      // the remaining coefficients keep their accuracy.
      std::vector<Complex> shared;
      for (std::size_t i = 0; i < zs.size(); ++i)
        if (z_gone[i] && zs[i].imag() >= 0.0) shared.push_back(zs[i]);
      const Polynomial g = Polynomial::from_roots(shared, 1.0);
      num_ = num_.divmod(g).first;
      den_ = den_.divmod(g).first;
    }
  }
  const double lead = den_.leading();
  if (lead != 1.0) {
    num_ = (1.0 / lead) * num_;
    std::vector<double> d = den_.coeffs();
    for (double& c : d) c /= lead;
    d.back() = 1.0;
    den_ = Polynomial(std::move(d));
  }
}

/// prod (s + conj(p_i)) / (s - p_i): all-pass on the imaginary axis with
/// poles p_i and zeros -conj(p_i).
inline RationalFunction blaschke(std::span<const Complex> poles) {
  for (const Complex& p : poles) {
    if (!(p.real() < 0.0))
      throw Error(ErrorCode::kInvalidPole,
                  "Blaschke pole with non-negative real part");
  }
  // Conjugate pairing as a multiset.
  std::vector<Complex> complex_poles;
  for (const Complex& p : poles)
    if (p.imag() != 0.0) complex_poles.push_back(p);
  std::vector<bool> used(complex_poles.size(), false);
  for (std::size_t i = 0; i < complex_poles.size(); ++i) {
    if (used[i]) continue;
    bool found = false;
    for (std::size_t j = i + 1; j < complex_poles.size(); ++j) {
      if (used[j]) continue;
      const Complex c = std::conj(complex_poles[i]);
      if (std::abs(complex_poles[j] - c) <= 1e-12 * (1.0 + std::abs(c))) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(ErrorCode::kUnpairedComplexPole,
                  "complex Blaschke pole without its conjugate");
  }
  std::vector<Complex> zeros;
  zeros.reserve(poles.size());
  for (const Complex& p : poles) zeros.push_back(-std::conj(p));
  // Pairs agree to 1e-12 after the check above; snap them to exact conjugates.
  auto exact = [](std::vector<Complex> v) {
    return detail::symmetrize_conjugates(std::move(v));
  };
  const std::vector<Complex> pz = exact(zeros);
  const std::vector<Complex> pp =
      exact(std::vector<Complex>(poles.begin(), poles.end()));
  return RationalFunction(Polynomial::from_roots(pz), Polynomial::from_roots(pp));
}

}  // namespace iqcfact
