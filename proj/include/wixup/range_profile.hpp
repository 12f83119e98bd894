#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wixup/types.hpp"

namespace wixup {

/// Discretization of the simulated range axis.
struct ProfileConfig {
  std::size_t window_size = 512;   // W, bins
  double range_resolution = 0.0375;  // meters per bin
  double sigma = 1.0;              // Gaussian std, bins

  double max_range() const { return static_cast<double>(window_size) * range_resolution; }
  /// Throws ConfigError unless W >= 2, resolution > 0 and sigma > 0.
  void validate() const;
};

/// Gaussians are evaluated only within this many sigmas of their mean.
inline constexpr double kTruncationSigmas = 6.0;

struct SphericalPoint {
  double range = 0.0;      // meters
  double azimuth = 0.0;    // radians, atan2(x, y); zero on boresight
  double elevation = 0.0;  // radians
};

SphericalPoint cart_to_spherical(const Point& p);
/// Extras are not part of the spherical representation; the result has none.
Point spherical_to_cart(const SphericalPoint& s);

/// Fractional bin of `range`. Throws OutOfRange when the bin is >= W.
double range_to_bin(double range, const ProfileConfig& cfg);

/// One point's contribution to a profile, with what is needed to rebuild it.
struct ProfileSource {
  double bin = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  std::optional<PointExtras> extras;
  int tag = 0;  // which input frame the point came from
};

/// Superposition of unit-height Gaussians, one per point, sampled at integer
/// bins: values[k] = sum_j exp(-(k - mu_j)^2 / (2 sigma^2)).
struct RangeProfile {
  std::vector<double> values;
  std::vector<ProfileSource> sources;  // ascending by bin
  /// Kernel width in bins; positive when `values` is fully described by
  /// `sources`, zero for profiles that only carry sampled values.
  double sigma = 0.0;
};

/// Profile amplitude at fractional bin x: the truncated Gaussian mixture of
/// the sources when sigma > 0 (equal to `values` at integer x),
/// otherwise linear interpolation of `values`.
double profile_at(const RangeProfile& profile, double x);

/// Throws OutOfRange if any point lies beyond the detectable range.
RangeProfile build_profile(const Frame& frame, const ProfileConfig& cfg, int tag);

/// Adds one Gaussian at fractional bin `mean` into `values` (truncated at 6 sigma).
void add_gaussian(std::vector<double>& values, double mean, double sigma);

}  // namespace wixup
