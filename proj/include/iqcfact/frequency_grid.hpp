#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "iqcfact/error.hpp"

namespace iqcfact {

/// Finite sample of the frequency axis used to check "for all omega"
/// conditions. Only omega >= 0 is needed for real-coefficient systems.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(std::vector<double> points, bool include_zero,
                bool include_infinity)
      : points_(std::move(points)),
        include_zero_(include_zero),
        include_infinity_(include_infinity) {
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (!(points_[k] > 0.0) || !std::isfinite(points_[k]))
        throw Error(ErrorCode::kInvalidArgument,
                    "grid frequencies must be finite and positive");
      if (k > 0 && !(points_[k] > points_[k - 1]))
        throw Error(ErrorCode::kInvalidArgument,
                    "grid frequencies must be strictly increasing");
    }
  }

  /// count log-spaced points on [lo, hi].
  static FrequencyGrid log_spaced(double lo, double hi, int count,
                                  bool include_zero = true,
                                  bool include_infinity = true) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
      throw Error(ErrorCode::kInvalidArgument,
                  "log grid needs 0 < lo < hi and at least two points");
    std::vector<double> pts(count);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int k = 0; k < count; ++k)
      pts[k] = std::pow(10.0, a + (b - a) * k / (count - 1));
    return FrequencyGrid(std::move(pts), include_zero, include_infinity);
  }

  /// 400 points on [1e-4, 1e4] plus omega = 0 and omega = infinity.
  static FrequencyGrid standard() { return log_spaced(1e-4, 1e4, 400); }

  const std::vector<double>& points() const { return points_; }
  bool include_zero() const { return include_zero_; }
  bool include_infinity() const { return include_infinity_; }

  /// All evaluation frequencies in increasing order; infinity appears as
  /// +inf.
  std::vector<double> evaluation_points() const {
    std::vector<double> out;
    out.reserve(points_.size() + 2);
    if (include_zero_) out.push_back(0.0);
    out.insert(out.end(), points_.begin(), points_.end());
    if (include_infinity_) out.push_back(std::numeric_limits<double>::infinity());
    return out;
  }

 private:
  std::vector<double> points_;
  bool include_zero_ = true;
  bool include_infinity_ = true;
};

}  // namespace iqcfact
