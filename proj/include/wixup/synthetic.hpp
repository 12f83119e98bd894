#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "wixup/types.hpp"

namespace wixup {

/// Desk-scale stand-in for recorded radar pose/action datasets.
///
/// Each sequence is one subject moving smoothly in front of the sensor.
/// Keypoints follow a fixed skeleton template (drawn once per dataset seed)
/// attached to a wandering body center with periodic limb swing. Each
/// keypoint yields at most one detection: it survives dropout with
/// probability 1 - dropout and is perturbed by isotropic Gaussian noise.
struct SynthConfig {
  std::size_t sequences = 2;
  std::size_t frames_per_sequence = 50;
  double frame_rate = 10.0;  // Hz
  LabelKind label = LabelKind::Keypoints;
  std::size_t joints = 19;   // J, keypoint datasets
  std::size_t classes = 3;   // C, class datasets
  int dims = 3;
  double noise = 0.02;       // meters, per-coordinate std of point noise
  double dropout = 0.4;      // per-keypoint miss probability
  std::array<double, 3> shift{0.0, 0.0, 0.0};  // domain offset, meters
  double center_spread = 0.5;  // half-width of the start-position box, meters
  double distance = 2.5;       // mean distance along boresight, meters
  std::string seq_prefix = "s";
  /// Seed of the skeleton template. Datasets that should share a body
  /// layout (e.g. source and target domains) use the same template seed.
  std::uint64_t template_seed = 0;
};

/// Pure function of (config, seed). Throws ConfigError for zero frames or
/// invalid parameters.
Dataset generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace wixup
