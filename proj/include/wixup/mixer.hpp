#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wixup/range_profile.hpp"
#include "wixup/rng.hpp"
#include "wixup/types.hpp"

namespace wixup {

struct MixConfig {
  ProfileConfig profile;
  /// Output point count; when unset, the rounded mean of the two input counts.
  std::optional<std::size_t> n_out;
  double jitter_sigma = 0.25;    // bins
  double epsilon_height = 1e-6;  // crossings at or below this height are dropped

  void validate() const;
  /// Resolves the output point count for inputs of n0 and n1 points.
  std::size_t output_count(std::size_t n0, std::size_t n1) const;
};

/// Where two profiles cross.
struct Intersection {
  double bin = 0.0;
  double height = 0.0;

  friend bool operator==(const Intersection&, const Intersection&) = default;
};

/// One pass over the sampled difference d = a - b. A crossing sits between
/// two consecutive nonzero differences of opposite sign (zeros in between are
/// skipped, so (0,0)(0,0) and (0,1)(0,0) never count).
///
/// Profiles built from points are located to sub-bin precision on the
/// underlying Gaussian mixtures inside that bracket (safeguarded Newton over
/// the few Gaussians that reach it, so the cost per crossing is constant). Sample-only
/// profiles fall back to linear interpolation of d (or the middle of a zero
/// run). The height is the mean of both profiles at the crossing. Throws
/// DataError if the profiles differ in length.
std::vector<Intersection> find_intersections(const RangeProfile& a, const RangeProfile& b,
                                             double epsilon_height);

enum class CandidateKind { Original, Crossing };

struct Candidate {
  double bin = 0.0;
  double weight = 1.0;
  CandidateKind kind = CandidateKind::Original;
  // Present for originals only.
  double azimuth = 0.0;
  double elevation = 0.0;
  std::optional<PointExtras> extras;
  int tag = -1;
};

/// Originals of both profiles (weight 1) plus every crossing (weight height + 1),
/// ascending by bin. Ties put originals first and are then ordered by content,
/// so the list does not depend on which profile came first.
std::vector<Candidate> build_candidates(const RangeProfile& a, const RangeProfile& b,
                                        const MixConfig& cfg);

/// A resampled range position and the candidate it was drawn from.
struct Draw {
  std::size_t candidate = 0;
  double bin = 0.0;
};

/// Weighted resampling of `count` bins from the candidate distribution
/// (probability proportional to weight), then Gaussian jitter of
/// cfg.jitter_sigma bins clamped to [0, W - 1e-9].
///
/// Uses systematic resampling: one uniform offset u and pointers
/// (u + k) / count on the cumulative weights. Every candidate is drawn
/// floor or ceil of count * p times, so the marginal frequencies are exact
/// to within one draw.
std::vector<Draw> bootstrap_sample(const std::vector<Candidate>& candidates, std::size_t count,
                                   const MixConfig& cfg, Rng& rng);

/// Normalized Gaussian kernel weights of every original at `bin`.
std::vector<double> angle_weights(double bin, const std::vector<Candidate>& candidates,
                                  double sigma);

/// Kernel-weighted (azimuth, elevation) of the originals around `bin`.
/// Throws DataError when no original candidate exists.
std::pair<double, double> assign_angles(double bin, const std::vector<Candidate>& candidates,
                                        const MixConfig& cfg);

/// Elementwise mean. Throws DataError on variant or dimension mismatch.
Label mix_labels(const Label& a, const Label& b);

/// Mixes two non-empty frames into one synthetic frame.
///
/// The output is symmetric in its inputs: swapping f0 and f1 with the same
/// rng state yields the same frame. Its seq_id is the shared seq_id (or both
/// joined by '+') followed by "~mix", and t is the mean timestamp.
Frame mix_frames(const Frame& f0, const Frame& f1, const MixConfig& cfg, Rng& rng);

}  // namespace wixup
