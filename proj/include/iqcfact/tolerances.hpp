#pragma once

// Numerical thresholds shared by every module. Values are fixed so that
// results are reproducible; the CLI exposes the ones that callers tune.

namespace iqcfact::tol {

// A numerator root and a denominator root cancel when
// |z - p| <= kCancellation * (1 + max(|z|, |p|)).
inline constexpr double kCancellation = 1e-8;

// Roots of a single polynomial closer than kRootCluster * (1 + |r|) are
// treated as one multiple root and replaced by their centroid.
inline constexpr double kRootCluster = 1e-5;

// A pole counts as stable only if its real part is below -kStability.
inline constexpr double kStability = 1e-9;

// Coefficientwise relative tolerance for rational-function equality.
inline constexpr double kEquality = 1e-8;

// |den(s)| below kPoleProximity times the magnitude of its terms is a pole hit.
inline constexpr double kPoleProximity = 1e-12;

// Symmetric eigenvalues within this band around zero have no definite sign.
inline constexpr double kInertia = 1e-9;

}  // namespace iqcfact::tol
