#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wixup/mixer.hpp"
#include "wixup/rng.hpp"
#include "wixup/types.hpp"

namespace wixup {

enum class AugmentMethod { Wixup, Cga, Stack, WixupPlus };

/// Parses "wixup", "cga", "stack", "wixup+". Throws ConfigError otherwise.
AugmentMethod parse_method(const std::string& name);
std::string method_name(AugmentMethod method);

struct AugmentConfig {
  AugmentMethod method = AugmentMethod::Wixup;
  std::size_t scale = 1;  // mix distances 1..scale
  MixConfig mix;
  double cga_low = 0.8;
  double cga_high = 1.2;
  std::size_t stack_k = 5;
  std::size_t stack_target_count = 8;
  /// Pair neighbors across sequence boundaries, treating the dataset as one
  /// ordered stream.
  bool cross_sequence = false;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means hardware concurrency. Never affects output.
  std::size_t threads = 0;

  void validate() const;
};

/// Pair of frames (index, index + distance) into Dataset::frames.
struct PlannedPair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t distance = 0;
  std::size_t position = 0;  // index of `first` within its sequence

  friend bool operator==(const PlannedPair&, const PlannedPair&) = default;
};

using PairPlan = std::vector<PlannedPair>;

/// Every (i, i + d) pair for d = 1..scale inside one sequence, ordered by
/// (sequence, d, i). Frames with no points are never paired.
PairPlan enumerate_pairs(const Dataset& dataset, std::size_t scale, bool cross_sequence = false);

/// Stable seed for a pair, independent of scheduling.
std::uint64_t pair_seed(std::uint64_t seed, const std::string& seq_id, std::size_t position,
                        std::size_t distance);

/// Uniform random scaling of point coordinates and keypoint labels by one
/// factor u in [low, high]. Class labels and doppler/intensity are untouched.
Frame cga_frame(const Frame& frame, Rng& rng, double low, double high);

/// Zero-pads to target_count points and returns k independent resamples
/// (with replacement) of target_count points each; labels are copied.
/// Padding points carry zero doppler/intensity when dims is 5.
std::vector<Frame> stack_frame(const Frame& frame, std::size_t k, std::size_t target_count,
                               Rng& rng, int dims = 3);

/// Original frames plus the augmented ones, normalized. Deterministic for a
/// fixed seed whatever the thread count. Augmented frames get a seq_id
/// suffix naming their origin: "~aug<d>" (mix distance d), "~cga", or
/// "~stack<j>".
Dataset augment(const Dataset& dataset, const AugmentConfig& cfg);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
/// Exceptions are rethrown on the caller for the smallest failing index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn);

std::size_t resolve_threads(std::size_t requested);

}  // namespace wixup

#include "wixup/detail/parallel.hpp"
