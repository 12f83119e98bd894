#include "wixup/range_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wixup/error.hpp"

namespace wixup {

void ProfileConfig::validate() const {
  if (window_size < 2) throw ConfigError("window_size must be at least 2");
  if (!(range_resolution > 0.0) || !std::isfinite(range_resolution))
    throw ConfigError("range_resolution must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
}

SphericalPoint cart_to_spherical(const Point& p) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (r == 0.0) return {};
  const double el = std::asin(std::clamp(p.z / r, -1.0, 1.0));
  // atan2 returns -pi for (-0, -y); fold onto the half-open (-pi, pi].
  double az = std::atan2(p.x, p.y);
  if (az <= -std::numbers::pi) az = std::numbers::pi;
  return {r, az, el};
}

Point spherical_to_cart(const SphericalPoint& s) {
  const double ce = std::cos(s.elevation);
  return {s.range * std::sin(s.azimuth) * ce, s.range * std::cos(s.azimuth) * ce,
          s.range * std::sin(s.elevation), std::nullopt};
}

double range_to_bin(double range, const ProfileConfig& cfg) {
  if (!(range >= 0.0)) throw OutOfRange("negative or non-finite range");
  const double bin = range / cfg.range_resolution;
  if (bin >= static_cast<double>(cfg.window_size))
    throw OutOfRange("range " + std::to_string(range) + " m beyond maximum detectable " +
                     std::to_string(cfg.max_range()) + " m");
  return bin;
}

void add_gaussian(std::vector<double>& values, double mean, double sigma) {
  const double reach = kTruncationSigmas * sigma;
  const auto last = static_cast<double>(values.size()) - 1.0;
  const double lo = std::max(0.0, std::ceil(mean - reach));
  const double hi = std::min(last, std::floor(mean + reach));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (double k = lo; k <= hi; k += 1.0) {
    const double d = k - mean;
    values[static_cast<std::size_t>(k)] += std::exp(-d * d * inv);
  }
}

double profile_at(const RangeProfile& profile, double x) {
  if (profile.sigma > 0.0) {
    const double reach = kTruncationSigmas * profile.sigma;
    const double inv = 1.0 / (2.0 * profile.sigma * profile.sigma);
    double sum = 0.0;
    for (const auto& s : profile.sources) {
      const double d = x - s.bin;
      if (std::abs(d) <= reach) sum += std::exp(-d * d * inv);
    }
    return sum;
  }
  const auto& v = profile.values;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= v.size()) return v[i];
  const double f = x - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

RangeProfile build_profile(const Frame& frame, const ProfileConfig& cfg, int tag) {
  RangeProfile profile;
  profile.sigma = cfg.sigma;
  profile.values.assign(cfg.window_size, 0.0);
  profile.sources.reserve(frame.points.size());
  for (const auto& p : frame.points) {
    const auto s = cart_to_spherical(p);
    const double bin = range_to_bin(s.range, cfg);
    add_gaussian(profile.values, bin, cfg.sigma);
    profile.sources.push_back({bin, s.azimuth, s.elevation, p.extras, tag});
  }
  std::stable_sort(profile.sources.begin(), profile.sources.end(),
                   [](const ProfileSource& l, const ProfileSource& r) { return l.bin < r.bin; });
  return profile;
}

}  // namespace wixup
