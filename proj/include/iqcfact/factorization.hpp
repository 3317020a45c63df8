#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "iqcfact/conditions.hpp"
#include "iqcfact/error.hpp"
#include "iqcfact/frequency_grid.hpp"
#include "iqcfact/hinf_norm.hpp"
#include "iqcfact/multiplier.hpp"
#include "iqcfact/rational_matrix.hpp"
#include "iqcfact/riccati.hpp"
#include "iqcfact/spectral_factor.hpp"

namespace iqcfact {

/// Conservative hardness label: only sufficient conditions are applied.
enum class Classification { kSoft, kHard, kDoublyHard };

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kSoft: return "soft";
    case Classification::kHard: return "hard";
    case Classification::kDoublyHard: return "doubly_hard";
  }
  return "soft";
}

inline Classification parse_classification(std::string_view s) {
  if (s == "soft") return Classification::kSoft;
  if (s == "hard") return Classification::kHard;
  if (s == "doubly_hard") return Classification::kDoublyHard;
  throw Error(ErrorCode::kParseError, "unknown classification '" + std::string(s) + "'");
}

/// Pi = psi~ * M * psi with stable psi (k x (m+l)) and symmetric M (k x k).
struct Factorization {
  RationalMatrix psi;
  Eigen::MatrixXd M;
  Classification classification = Classification::kSoft;
};

struct VerificationReport {
  /// max over the grid of ||psi^* M psi - Pi||_2 / (1 + ||Pi||_2).
  double residual = 0.0;
  /// Same maximum without the relative scaling.
  double abs_residual = 0.0;
  double worst_frequency = 0.0;
  StabilityReport psi_stability;
  /// Present when psi is square and biproper.
  std::optional<StabilityReport> inverse_stability;
};

namespace detail {

inline bool is_square_biproper(const RationalMatrix& psi) {
  if (!psi.is_square() || !psi.is_proper() || psi.rows() == 0) return false;
  const Eigen::VectorXd sv =
      Eigen::JacobiSVD<Eigen::MatrixXd>(psi.value_at_infinity()).singularValues();
  return sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= 1e12;
}

inline void require_conformal(const RationalMatrix& pi, const Factorization& f) {
  if (f.M.rows() != f.M.cols() || f.M.rows() != f.psi.rows() ||
      f.psi.cols() != pi.rows() || !pi.is_square())
    throw Error(ErrorCode::kDimensionMismatch,
                "factorization psi " + f.psi.shape() + " / M " +
                    std::to_string(f.M.rows()) + "x" + std::to_string(f.M.cols()) +
                    " does not match Pi " + pi.shape());
}

}  // namespace detail

inline VerificationReport verify_factorization(
    const RationalMatrix& pi, const Factorization& f,
    const FrequencyGrid& grid = FrequencyGrid::standard()) {
  detail::require_conformal(pi, f);
  VerificationReport rep;
  const Eigen::MatrixXcd M = f.M.cast<Complex>();
  for (double w : grid.evaluation_points()) {
    if (std::isinf(w) && !(pi.is_proper() && f.psi.is_proper())) continue;
    const Eigen::MatrixXcd psi = f.psi.at_frequency(w);
    const Eigen::MatrixXcd p = pi.at_frequency(w);
    const double abs_res = max_singular_value(psi.adjoint() * M * psi - p);
    const double rel = abs_res / (1.0 + max_singular_value(p));
    rep.abs_residual = std::max(rep.abs_residual, abs_res);
    if (rel > rep.residual) {
      rep.residual = rel;
      rep.worst_frequency = w;
    }
  }
  rep.psi_stability = is_stable(f.psi);
  if (detail::is_square_biproper(f.psi))
    rep.inverse_stability = is_stable(f.psi.inverse());
  return rep;
}

inline VerificationReport verify_factorization(
    const Multiplier& pi, const Factorization& f,
    const FrequencyGrid& grid = FrequencyGrid::standard()) {
  return verify_factorization(pi.matrix(), f, grid);
}

/// doubly_hard: psi square-biproper with psi and psi^{-1} stable.
/// hard: M = J_{m,l} and psi stable, lower block-triangular, with psi11
/// biproper and psi11^{-1} stable. Otherwise soft.
inline Classification classify(const Factorization& f) {
  const bool psi_stable = is_stable(f.psi).stable;
  if (!psi_stable) return Classification::kSoft;
  if (detail::is_square_biproper(f.psi) && is_stable(f.psi.inverse()).stable)
    return Classification::kDoublyHard;
  const std::optional<BlockSizes> bs = as_signature(f.M);
  if (bs && f.psi.is_square() && f.psi.rows() == bs->total() && bs->m > 0) {
    const int m = bs->m, l = bs->l;
    const RationalMatrix psi11 = f.psi.block(0, 0, m, m);
    const bool upper_right_zero = l == 0 || f.psi.block(0, m, m, l).is_zero();
    if (upper_right_zero && detail::is_square_biproper(psi11) &&
        is_stable(psi11.inverse()).stable)
      return Classification::kHard;
  }
  return Classification::kSoft;
}

namespace detail {

// Strictly proper part of f whose poles lie in the open left half-plane, via
// the coprime split r = a*d_unstable + b*d_stable of f - f(inf) = r/d.
inline RationalFunction stable_part(const RationalFunction& f) {
  if (!f.is_proper())
    throw Error(ErrorCode::kImproperEntry, "additive split of an improper entry");
  const Polynomial& d = f.den();
  if (d.degree() == 0) return {};
  const Polynomial r = f.num() - f.value_at_infinity() * d;
  std::vector<Complex> stable_roots, unstable_roots;
  for (const Complex& p : d.roots()) {
    if (std::abs(p.real()) <= tol::kStability * (1.0 + std::abs(p)))
      throw Error(ErrorCode::kNotInRLinf, "pole on the imaginary axis");
    (p.real() < 0.0 ? stable_roots : unstable_roots).push_back(p);
  }
  if (stable_roots.empty()) return {};
  const Polynomial ds = Polynomial::from_roots(stable_roots);
  if (unstable_roots.empty()) return RationalFunction(r, ds);
  const Polynomial du = Polynomial::from_roots(unstable_roots);
  const int ns = ds.degree(), nu = du.degree(), n = ns + nu;
  // Unknowns: a_0..a_{ns-1} (multiplying du), b_0..b_{nu-1} (multiplying ds).
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) rhs(k) = r.coeff(k);
  for (int i = 0; i < ns; ++i)
    for (int k = 0; k <= nu; ++k) S(i + k, i) += du.coeff(k);
  for (int i = 0; i < nu; ++i)
    for (int k = 0; k <= ns; ++k) S(i + k, ns + i) += ds.coeff(k);
  const Eigen::VectorXd sol = S.fullPivLu().solve(rhs);
  return RationalFunction(Polynomial(std::vector<double>(sol.data(), sol.data() + ns)), ds);
}

// Least common multiple of monic denominators, by merging root multisets.
inline Polynomial lcm_of(const std::vector<Polynomial>& dens) {
  std::vector<RootCount> lcm;
  for (const Polynomial& d : dens) {
    std::vector<RootCount> local;
    accumulate_roots(d.roots(), local);
    for (const RootCount& rc : local) {
      auto it = std::find_if(lcm.begin(), lcm.end(), [&](const RootCount& x) {
        return std::abs(x.value - rc.value) <= tol::kRootCluster * (1.0 + std::abs(rc.value));
      });
      if (it == lcm.end())
        lcm.push_back(rc);
      else
        it->multiplicity = std::max(it->multiplicity, rc.multiplicity);
    }
  }
  std::vector<Complex> roots;
  for (const RootCount& rc : lcm)
    for (int k = 0; k < rc.multiplicity; ++k) roots.push_back(rc.value);
  return Polynomial::from_roots(detail::symmetrize_conjugates(std::move(roots)));
}

inline void require_residual(const Multiplier& pi, Factorization& f,
                             const FrequencyGrid& grid, double tolerance,
                             const char* method) {
  const VerificationReport rep = verify_factorization(pi, f, grid);
  if (!(rep.residual <= tolerance)) {
    std::ostringstream msg;
    msg << method << " residual " << rep.residual << " exceeds " << tolerance
        << " at w = " << rep.worst_frequency;
    throw Error(ErrorCode::kFactorizationCheckFailed, msg.str());
  }
  f.classification = classify(f);
}

inline void require_positive_negative(const Multiplier& pi, const FrequencyGrid& grid) {
  const ConditionReport pn = is_positive_negative(pi, grid, 0.0);
  if (!pn.satisfied) {
    std::ostringstream msg;
    msg << "multiplier is not positive-negative (margin " << pn.margin
        << " at w = " << pn.worst_frequency << ")";
    throw Error(ErrorCode::kNotPositiveNegative, msg.str());
  }
}

}  // namespace detail

/// Lower-triangular hard factorization (psi, J_{1,1}) for scalar blocks:
///   -Pi22 = H~H with H stable and anti-minimum phase,
///   psi22 = H * B where B is the Blaschke product over the LHP poles of Pi12,
///   psi21 = (-Pi12 / psi22)~,
///   psi11 = minimum-phase spectral factor of Pi11 + psi21~ psi21.
inline Factorization triangular_factorize(
    const Multiplier& pi, const FrequencyGrid& grid = FrequencyGrid::standard(),
    double residual_tolerance = 1e-7) {
  if (pi.m() != 1 || pi.l() != 1)
    throw Error(ErrorCode::kUnsupportedBlockSizes,
                "triangular recipe is implemented for m = l = 1");
  detail::require_positive_negative(pi, grid);

  const RationalFunction& pi11 = pi.matrix()(0, 0);
  const RationalFunction& pi12 = pi.matrix()(0, 1);
  const RationalFunction& pi22 = pi.matrix()(1, 1);

  const RationalFunction h = spectral_factor(-pi22, PhaseKind::kAntiMinimumPhase, grid);
  std::vector<Complex> lhp_poles;
  for (const Complex& p : pi12.poles())
    if (p.real() < 0.0) lhp_poles.push_back(p);
  const RationalFunction psi22 = h * blaschke(lhp_poles);
  const RationalFunction psi21 = (-(pi12 * psi22.inverse())).para_conjugate();
  // Pi11 + psi21~ psi21 equals the Schur complement Pi11 - Pi12 Pi22^-1 Pi21,
  // which avoids the Blaschke and H factors and so keeps the degree low.
  const RationalFunction& pi21 = pi.matrix()(1, 0);
  const RationalFunction psi11 = spectral_factor(
      (pi11 * pi22 - pi12 * pi21) / pi22, PhaseKind::kMinimumPhase, grid);

  Factorization f;
  f.psi = RationalMatrix{{psi11, 0.0}, {psi21, psi22}};
  f.M = SignatureMatrix(1, 1).matrix();
  detail::require_residual(pi, f, grid, residual_tolerance, "triangular");
  return f;
}

/// J-spectral factorization Pi = psi~ J psi with psi, psi^{-1} stable.
///
/// Pi = Gamma~ + D + Gamma with Gamma stable and strictly proper, realized
/// column by column as C (sI - A)^{-1} B. With D = L^T J L and P the
/// stabilizing solution of
///   A^T P + P A - (P B + C^T) D^{-1} (B^T P + C) = 0,
/// psi = L (I + D^{-1} (B^T P + C) (sI - A)^{-1} B).
inline Factorization jspectral_factorize(
    const Multiplier& pi, const FrequencyGrid& grid = FrequencyGrid::standard(),
    double residual_tolerance = 1e-6) {
  const RationalMatrix& P = pi.matrix();
  if (!P.is_proper())
    throw Error(ErrorCode::kImproperEntry, "J-spectral factorization needs a proper Pi");
  detail::require_positive_negative(pi, grid);

  const int n_io = P.rows();
  const Eigen::MatrixXd D = P.value_at_infinity();
  const Eigen::MatrixXd Ds = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ds);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const Eigen::MatrixXd V = eig.eigenvectors();
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index k = n_io - 1; k >= 0; --k) {
    if (lam(k) > tol::kInertia) pos.push_back(k);
  }
  for (Eigen::Index k = 0; k < n_io; ++k) {
    if (lam(k) < -tol::kInertia) neg.push_back(k);
  }
  if (static_cast<int>(pos.size()) != pi.m() || static_cast<int>(neg.size()) != pi.l()) {
    std::ostringstream msg;
    msg << "Pi(inf) has inertia (" << pos.size() << ", " << neg.size()
        << ") but the blocks are (" << pi.m() << ", " << pi.l() << ")";
    throw Error(ErrorCode::kWrongInertiaAtInfinity, msg.str());
  }
  Eigen::MatrixXd L(n_io, n_io);
  int row = 0;
  for (Eigen::Index k : pos) L.row(row++) = std::sqrt(lam(k)) * V.col(k).transpose();
  for (Eigen::Index k : neg) L.row(row++) = std::sqrt(-lam(k)) * V.col(k).transpose();
  const Eigen::MatrixXd J = SignatureMatrix(pi.m(), pi.l()).matrix();

  // Column-wise realization of Gamma over the least common denominator.
  std::vector<Polynomial> col_den(n_io);
  std::vector<std::vector<Polynomial>> col_num(n_io, std::vector<Polynomial>(n_io));
  std::vector<int> offset(n_io + 1, 0);
  for (int j = 0; j < n_io; ++j) {
    std::vector<RationalFunction> parts;
    std::vector<Polynomial> dens;
    for (int i = 0; i < n_io; ++i) {
      parts.push_back(detail::stable_part(P(i, j)));
      if (!parts.back().is_zero()) dens.push_back(parts.back().den());
    }
    col_den[j] = detail::lcm_of(dens);
    for (int i = 0; i < n_io; ++i) {
      if (parts[i].is_zero()) continue;
      col_num[j][i] = parts[i].num() * col_den[j].divmod(parts[i].den()).first;
    }
    offset[j + 1] = offset[j] + col_den[j].degree();
  }
  const int n = offset[n_io];

  Eigen::MatrixXd psi_inf = L;
  Eigen::MatrixXd LK = Eigen::MatrixXd::Zero(n_io, n);
  if (n > 0) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n_io);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n_io, n);
    for (int j = 0; j < n_io; ++j) {
      const int k = col_den[j].degree(), o = offset[j];
      if (k == 0) continue;
      for (int a = 0; a + 1 < k; ++a) A(o + a, o + a + 1) = 1.0;
      for (int a = 0; a < k; ++a) A(o + k - 1, o + a) = -col_den[j].coeff(a);
      B(o + k - 1, j) = 1.0;
      for (int i = 0; i < n_io; ++i)
        for (int a = 0; a < k; ++a) C(i, o + a) = col_num[j][i].coeff(a);
    }
    const Eigen::MatrixXd Dinv = Ds.inverse();
    const Eigen::MatrixXd Abar = A - B * Dinv * C;
    Eigen::MatrixXd H(2 * n, 2 * n);
    H << Abar, -B * Dinv * B.transpose(), C.transpose() * Dinv * C, -Abar.transpose();
    const Eigen::MatrixXd X = stabilizing_riccati_solution(H);
    const Eigen::MatrixXd W = B.transpose() * X + C;
    LK = L * Dinv * W;
  }

  Factorization f;
  f.psi = RationalMatrix(n_io, n_io);
  for (int i = 0; i < n_io; ++i)
    for (int j = 0; j < n_io; ++j) {
      const int k = col_den[j].degree(), o = offset[j];
      std::vector<double> tail(k, 0.0);
      for (int a = 0; a < k; ++a) tail[a] = LK(i, o + a);
      f.psi(i, j) = RationalFunction(
          psi_inf(i, j) * col_den[j] + Polynomial(std::move(tail)), col_den[j]);
    }
  f.M = J;
  detail::require_residual(pi, f, grid, residual_tolerance, "J-spectral");
  return f;
}

}  // namespace iqcfact
