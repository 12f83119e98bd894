#include "wixup/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "wixup/error.hpp"

namespace wixup {
namespace {

// Sources of one profile that can reach the current bracket. Crossings are
// visited left to right, so the window only ever slides forward.
class SourceWindow {
 public:
  explicit SourceWindow(const RangeProfile& p)
      : sources_(p.sources), reach_(kTruncationSigmas * p.sigma),
        inv_(1.0 / (2.0 * p.sigma * p.sigma)) {}

  void advance(double lo, double hi) {
    while (begin_ < sources_.size() && sources_[begin_].bin < lo - reach_) ++begin_;
    if (end_ < begin_) end_ = begin_;
    while (end_ < sources_.size() && sources_[end_].bin <= hi + reach_) ++end_;
  }

  std::size_t size() const { return end_ - begin_; }
  double only_bin() const { return sources_[begin_].bin; }
  double reach() const { return reach_; }
  double inv() const { return inv_; }

  // Truncated mixture value and slope at x.
  void eval(double x, double& value, double& slope) const {
    value = slope = 0.0;
    for (std::size_t j = begin_; j < end_; ++j) {
      const double d = x - sources_[j].bin;
      if (std::abs(d) > reach_) continue;
      const double e = std::exp(-d * d * inv_);
      value += e;
      slope -= 2.0 * inv_ * d * e;
    }
  }

 private:
  const std::vector<ProfileSource>& sources_;
  double reach_;
  double inv_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
};

// Root of a(x) - b(x) inside [lo, hi], given the sampled values at both
// ends. One Gaussian per side has a closed form. Otherwise Newton starts
// from the zero of the log-linear interpolant (exact for single Gaussians)
// and falls back to bisection when a step leaves the bracket. Swapping a and
// b negates the difference and its slope, so every iterate is unchanged.
double refine_crossing(const SourceWindow& a, const SourceWindow& b, double lo, double hi,
                       double a_lo, double b_lo, double a_hi, double b_hi, double& height) {
  // One Gaussian per side: equal unit heights meet halfway between them.
  if (a.size() == 1 && b.size() == 1) {
    const double mid = 0.5 * (a.only_bin() + b.only_bin());
    const double half = 0.5 * std::abs(a.only_bin() - b.only_bin());
    if (mid >= lo && mid <= hi && half <= a.reach()) {
      height = std::exp(-half * half * a.inv());
      return mid;
    }
  }
  const bool up = a_lo < b_lo;  // a - b goes from negative to positive
  double x;
  if (a_lo > 0.0 && b_lo > 0.0 && a_hi > 0.0 && b_hi > 0.0) {
    const double f_lo = std::log(a_lo) - std::log(b_lo);
    const double f_hi = std::log(a_hi) - std::log(b_hi);
    x = lo + (hi - lo) * f_lo / (f_lo - f_hi);
  } else {
    const double d_lo = a_lo - b_lo;
    x = lo + (hi - lo) * d_lo / (d_lo - (a_hi - b_hi));
  }
  double va = 0.0, sa = 0.0, vb = 0.0, sb = 0.0;
  for (int iter = 0; iter < 60; ++iter) {
    a.eval(x, va, sa);
    b.eval(x, vb, sb);
    if (va == vb) break;
    if ((va > vb) == up)
      hi = x;
    else
      lo = x;
    double next = 0.5 * (lo + hi);
    const double slope = sa - sb;
    if (slope != 0.0) {
      const double newton = x - (va - vb) / slope;
      if (newton > lo && newton < hi) next = newton;
    }
    const double step = std::abs(next - x);
    x = next;
    // Newton converges quadratically, so a step this small leaves an error
    // far below it; the height from the last evaluation is kept.
    if (step < 1e-4 || hi - lo < 1e-9) break;
  }
  height = 0.5 * (va + vb);
  return x;
}

// Total order used to make candidate lists independent of input order.
bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.bin != b.bin) return a.bin < b.bin;
  if (a.kind != b.kind) return a.kind == CandidateKind::Original;
  if (a.kind == CandidateKind::Crossing) return a.weight < b.weight;
  auto extras_key = [](const Candidate& c) {
    return c.extras ? std::make_tuple(1, c.extras->doppler, c.extras->intensity)
                    : std::make_tuple(0, 0.0, 0.0);
  };
  return std::make_tuple(a.azimuth, a.elevation, extras_key(a), a.tag) <
         std::make_tuple(b.azimuth, b.elevation, extras_key(b), b.tag);
}

}  // namespace

void MixConfig::validate() const {
  profile.validate();
  if (!(jitter_sigma >= 0.0)) throw ConfigError("jitter_sigma must be >= 0");
  if (!(epsilon_height >= 0.0)) throw ConfigError("epsilon_height must be >= 0");
  if (n_out && *n_out == 0) throw ConfigError("n_out must be >= 1");
}

std::size_t MixConfig::output_count(std::size_t n0, std::size_t n1) const {
  if (n_out) return *n_out;
  return (n0 + n1 + 1) / 2;
}

std::vector<Intersection> find_intersections(const RangeProfile& a, const RangeProfile& b,
                                             double epsilon_height) {
  const auto& va = a.values;
  const auto& vb = b.values;
  if (va.size() != vb.size()) throw DataError("range profiles differ in window size");
  const bool continuous = a.sigma > 0.0 && b.sigma > 0.0;
  SourceWindow wa(a), wb(b);

  std::vector<Intersection> out;
  out.reserve(a.sources.size() + b.sources.size());
  std::size_t prev = 0;
  double d_prev = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    if (d == 0.0) continue;
    if (have_prev && d_prev * d < 0.0) {
      const double lo = static_cast<double>(prev);
      const double hi = static_cast<double>(i);
      double bin, height;
      if (continuous) {
        wa.advance(lo, hi);
        wb.advance(lo, hi);
        bin = refine_crossing(wa, wb, lo, hi, va[prev], vb[prev], va[i], vb[i], height);
      } else {
        // A gap between the bins means the profiles agree exactly in between.
        bin = i == prev + 1 ? lo + d_prev / (d_prev - d) : 0.5 * (lo + hi);
        height = 0.5 * (profile_at(a, bin) + profile_at(b, bin));
      }
      if (height > epsilon_height) out.push_back({bin, height});
    }
    prev = i;
    d_prev = d;
    have_prev = true;
  }
  return out;
}

std::vector<Candidate> build_candidates(const RangeProfile& a, const RangeProfile& b,
                                        const MixConfig& cfg) {
  std::vector<Candidate> out;
  out.reserve(a.sources.size() + b.sources.size() + 8);
  for (const auto* profile : {&a, &b})
    for (const auto& s : profile->sources)
      out.push_back({s.bin, 1.0, CandidateKind::Original, s.azimuth, s.elevation, s.extras,
                     s.tag});
  for (const auto& x : find_intersections(a, b, cfg.epsilon_height))
    out.push_back({x.bin, x.height + 1.0, CandidateKind::Crossing, 0.0, 0.0, std::nullopt, -1});
  std::sort(out.begin(), out.end(), candidate_less);
  return out;
}

std::vector<Draw> bootstrap_sample(const std::vector<Candidate>& candidates, std::size_t count,
                                   const MixConfig& cfg, Rng& rng) {
  if (candidates.empty()) throw DataError("bootstrap over an empty candidate list");
  double total = 0.0;
  for (const auto& c : candidates) total += c.weight;

  const double upper = static_cast<double>(cfg.profile.window_size) - 1e-9;
  const double offset = rng.uniform();
  std::vector<Draw> out;
  out.reserve(count);
  std::size_t j = 0;
  double cumulative = candidates[0].weight;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = (offset + static_cast<double>(k)) / static_cast<double>(count) * total;
    while (cumulative <= target && j + 1 < candidates.size()) cumulative += candidates[++j].weight;
    double bin = candidates[j].bin;
    if (cfg.jitter_sigma > 0.0) bin = std::clamp(bin + cfg.jitter_sigma * rng.normal(), 0.0, upper);
    out.push_back({j, bin});
  }
  return out;
}

std::vector<double> angle_weights(double bin, const std::vector<Candidate>& candidates,
                                  double sigma) {
  std::vector<double> w(candidates.size(), 0.0);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  std::size_t nearest = candidates.size();
  double nearest_dist = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].kind != CandidateKind::Original) continue;
    const double d = bin - candidates[i].bin;
    w[i] = std::exp(-d * d * inv);
    sum += w[i];
    if (nearest == candidates.size() || std::abs(d) < nearest_dist) {
      nearest = i;
      nearest_dist = std::abs(d);
    }
  }
  if (nearest == candidates.size()) throw DataError("no original points to take angles from");
  if (sum == 0.0) {
    // Every kernel underflowed; fall back to the closest original.
    w[nearest] = 1.0;
    return w;
  }
  for (double& x : w) x /= sum;
  return w;
}

std::pair<double, double> assign_angles(double bin, const std::vector<Candidate>& candidates,
                                        const MixConfig& cfg) {
  const auto w = angle_weights(bin, candidates, cfg.profile.sigma);
  double az = 0.0, el = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (w[i] == 0.0) continue;
    az += w[i] * candidates[i].azimuth;
    el += w[i] * candidates[i].elevation;
  }
  return {az, el};
}

Label mix_labels(const Label& a, const Label& b) {
  if (label_kind(a) != label_kind(b)) throw DataError("cannot mix different label variants");
  if (label_size(a) != label_size(b)) throw DataError("cannot mix labels of different sizes");
  if (const auto* ka = std::get_if<Keypoints>(&a)) {
    const auto& kb = std::get<Keypoints>(b);
    Keypoints out;
    out.joints.resize(ka->joints.size());
    for (std::size_t j = 0; j < out.joints.size(); ++j)
      for (int c = 0; c < 3; ++c) out.joints[j][c] = 0.5 * (ka->joints[j][c] + kb.joints[j][c]);
    return out;
  }
  const auto& pa = std::get<ClassProbs>(a).probs;
  const auto& pb = std::get<ClassProbs>(b).probs;
  ClassProbs out;
  out.probs.resize(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) out.probs[i] = 0.5 * (pa[i] + pb[i]);
  return out;
}

Frame mix_frames(const Frame& f0, const Frame& f1, const MixConfig& cfg, Rng& rng) {
  if (f0.points.empty() || f1.points.empty())
    throw DataError("cannot mix an empty frame (seq " +
                    (f0.points.empty() ? f0.seq_id : f1.seq_id) + ")");
  Frame out;
  out.label = mix_labels(f0.label, f1.label);
  out.t = 0.5 * (f0.t + f1.t);
  if (f0.seq_id == f1.seq_id)
    out.seq_id = f0.seq_id + "~mix";
  else
    out.seq_id = std::min(f0.seq_id, f1.seq_id) + "+" + std::max(f0.seq_id, f1.seq_id) + "~mix";

  const auto a = build_profile(f0, cfg.profile, 0);
  const auto b = build_profile(f1, cfg.profile, 1);
  const auto candidates = build_candidates(a, b, cfg);
  const auto draws =
      bootstrap_sample(candidates, cfg.output_count(f0.points.size(), f1.points.size()), cfg, rng);

  const bool extras = f0.points.front().extras && f1.points.front().extras;
  out.points.reserve(draws.size());
  for (const auto& draw : draws) {
    const auto& c = candidates[draw.candidate];
    SphericalPoint s{draw.bin * cfg.profile.range_resolution, c.azimuth, c.elevation};
    std::optional<PointExtras> ex = c.extras;
    if (c.kind == CandidateKind::Crossing) {
      const auto w = angle_weights(draw.bin, candidates, cfg.profile.sigma);
      s.azimuth = s.elevation = 0.0;
      PointExtras avg;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (w[i] == 0.0) continue;
        s.azimuth += w[i] * candidates[i].azimuth;
        s.elevation += w[i] * candidates[i].elevation;
        if (extras) {
          avg.doppler += w[i] * candidates[i].extras->doppler;
          avg.intensity += w[i] * candidates[i].extras->intensity;
        }
      }
      ex = avg;
    }
    Point p = spherical_to_cart(s);
    if (extras) p.extras = ex;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace wixup
