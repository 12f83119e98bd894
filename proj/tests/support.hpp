#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "wixup/range_profile.hpp"
#include "wixup/rng.hpp"
#include "wixup/types.hpp"

namespace testing {

inline wixup::Frame boresight_frame(std::vector<double> ranges, std::string seq = "a",
                                    double t = 0.0) {
  wixup::Frame f;
  f.seq_id = std::move(seq);
  f.t = t;
  for (double r : ranges) f.points.push_back({0.0, r, 0.0, std::nullopt});
  f.label = wixup::Keypoints{{{0.0, 0.0, 0.0}}};
  return f;
}

inline wixup::Frame bin_frame(const std::vector<double>& bins,
                              const wixup::ProfileConfig& cfg = {}) {
  std::vector<double> ranges;
  for (double b : bins) ranges.push_back(b * cfg.range_resolution);
  return boresight_frame(ranges);
}

// A frame with a few points spread around a body-sized blob in front of the
// sensor, optionally 5D, with a keypoint or class label.
inline wixup::Frame random_frame(wixup::Rng& rng, std::size_t max_points, bool five_d,
                                 bool keypoints, std::string seq = "r", double t = 0.0) {
  wixup::Frame f;
  f.seq_id = std::move(seq);
  f.t = t;
  const std::size_t n = 1 + rng.below(max_points);
  const double cx = rng.uniform(-1.0, 1.0), cy = rng.uniform(1.5, 5.0);
  for (std::size_t i = 0; i < n; ++i) {
    wixup::Point p{cx + rng.normal(0.0, 0.3), cy + rng.normal(0.0, 0.3),
                   rng.uniform(-0.8, 0.9), std::nullopt};
    if (five_d) p.extras = wixup::PointExtras{rng.normal(), rng.uniform(1.0, 30.0)};
    f.points.push_back(p);
  }
  if (keypoints) {
    wixup::Keypoints kp;
    for (int j = 0; j < 4; ++j)
      kp.joints.push_back({rng.uniform(-1, 1), rng.uniform(1, 5), rng.uniform(-1, 1)});
    f.label = kp;
  } else {
    wixup::ClassProbs c;
    c.probs.assign(3, 0.0);
    c.probs[rng.below(3)] = 1.0;
    f.label = c;
  }
  return f;
}

// Independent reference: truncated unit-height Gaussian mixture evaluated
// directly, and its sign changes located on a grid `oversample` times finer
// than one bin (then interpolated within the fine cell).
inline double mixture(const std::vector<double>& means, double x, double sigma = 1.0) {
  double s = 0.0;
  for (double m : means) {
    const double d = (x - m) / sigma;
    if (std::abs(d) <= 6.0) s += std::exp(-0.5 * d * d);
  }
  return s;
}

struct OracleRoot {
  double bin;
  double height;
};

inline std::vector<OracleRoot> oracle_crossings(const std::vector<double>& a,
                                                const std::vector<double>& b, double window,
                                                int oversample = 100, double eps = 1e-6) {
  std::vector<OracleRoot> roots;
  const double h = 1.0 / oversample;
  const auto steps = static_cast<long>(window * oversample);
  double prev = mixture(a, 0.0) - mixture(b, 0.0);
  for (long k = 1; k <= steps; ++k) {
    const double x = static_cast<double>(k) * h;
    const double d = mixture(a, x) - mixture(b, x);
    if (prev * d < 0.0) {
      const double r = x - h + h * prev / (prev - d);
      const double height = 0.5 * (mixture(a, r) + mixture(b, r));
      if (height > eps) roots.push_back({r, height});
    }
    if (d != 0.0) prev = d;
  }
  return roots;
}

inline std::vector<double> source_bins(const wixup::RangeProfile& p) {
  std::vector<double> out;
  for (const auto& s : p.sources) out.push_back(s.bin);
  return out;
}

inline std::vector<std::array<double, 3>> sorted_xyz(const wixup::Frame& f) {
  std::vector<std::array<double, 3>> v;
  for (const auto& p : f.points) v.push_back({p.x, p.y, p.z});
  std::sort(v.begin(), v.end());
  return v;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("wixup_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace testing
