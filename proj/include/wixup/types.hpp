#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wixup {

/// Doppler velocity (m/s) and signal intensity carried by 5D point clouds.
struct PointExtras {
  double doppler = 0.0;
  double intensity = 0.0;

  friend bool operator==(const PointExtras&, const PointExtras&) = default;
};

/// One detection in sensor coordinates (meters). Boresight is +y.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<PointExtras> extras;

  friend bool operator==(const Point&, const Point&) = default;
};

using Joint = std::array<double, 3>;

/// J x 3 keypoint matrix, meters.
struct Keypoints {
  std::vector<Joint> joints;

  friend bool operator==(const Keypoints&, const Keypoints&) = default;
};

/// Probability vector over C classes. One-hot for real data.
struct ClassProbs {
  std::vector<double> probs;

  friend bool operator==(const ClassProbs&, const ClassProbs&) = default;
};

using Label = std::variant<Keypoints, ClassProbs>;

enum class LabelKind { Keypoints, ClassProbs };

LabelKind label_kind(const Label& label);

/// J for keypoints, C for class probabilities.
std::size_t label_size(const Label& label);

struct Frame {
  std::string seq_id;
  double t = 0.0;
  std::vector<Point> points;
  Label label;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Dataset-wide shape shared by every frame.
struct DatasetMeta {
  LabelKind label = LabelKind::Keypoints;
  std::size_t label_size = 0;  // J or C
  int dims = 3;                // 3 or 5

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Frames sorted by (seq_id, t); every frame conforms to `meta`.
struct Dataset {
  DatasetMeta meta;
  std::vector<Frame> frames;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Contiguous run of frames sharing one seq_id, as [begin, end) into Dataset::frames.
struct SequenceRange {
  std::string seq_id;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

std::vector<SequenceRange> sequences(const Dataset& dataset);

/// Sorts frames by (seq_id, t) and checks every dataset invariant.
/// Throws DataError on violation.
void normalize(Dataset& dataset);

/// Checks one frame against `meta`. Throws DataError describing the problem.
void validate_frame(const Frame& frame, const DatasetMeta& meta);

}  // namespace wixup
