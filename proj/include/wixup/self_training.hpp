#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wixup/mixer.hpp"
#include "wixup/types.hpp"

namespace wixup {

/// Model contract for the self-training loop. Implementations must be
/// deterministic and return labels with the dimensions of the fitted data.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual void fit(std::span<const Frame> frames) = 0;
  virtual std::vector<Label> predict(std::span<const Frame> frames) const = 0;
};

/// Per-frame summary used by the k-NN predictor: centroid (3), per-axis
/// population std (3) and point count divided by the largest training count.
using Descriptor = std::array<double, 7>;

/// k-nearest-neighbour regressor/classifier over frame descriptors.
/// Keypoints: mean of the k neighbours' labels. ClassProbs: summed
/// probabilities, renormalized. Distance ties go to the earlier training frame.
class KnnPredictor final : public Predictor {
 public:
  explicit KnnPredictor(std::size_t k);

  void fit(std::span<const Frame> frames) override;
  std::vector<Label> predict(std::span<const Frame> frames) const override;

  Descriptor describe(const Frame& frame) const;
  std::size_t k() const { return k_; }

 private:
  std::size_t k_;
  double count_scale_ = 1.0;
  std::vector<Descriptor> descriptors_;
  std::vector<Label> labels_;
};

std::unique_ptr<Predictor> knn_predictor(std::size_t k);

/// Mean Euclidean joint error in centimeters. Throws DataError on J mismatch.
double mle(const Keypoints& pred, const Keypoints& gt);

/// Fraction of rows whose argmax matches; ties resolve to the lowest index.
double accuracy(std::span<const ClassProbs> preds, std::span<const ClassProbs> gts);

/// Mean MLE (keypoints) or accuracy (class probabilities) over a test split.
double evaluate(std::span<const Label> preds, std::span<const Label> gts);

enum class Pairing { Random, Cyclic };

Pairing parse_pairing(const std::string& name);
std::string pairing_name(Pairing pairing);

struct UdaConfig {
  double target_train_fraction = 0.5;
  Pairing pairing = Pairing::Random;
  MixConfig mix;
  std::uint64_t seed = 0;
  std::size_t fine_tune_rounds = 1;
  std::size_t threads = 0;  // mixing workers; never affects results

  void validate() const;
};

struct UdaReport {
  std::string metric;  // "mle_cm" or "accuracy"
  double error_before = 0.0;
  double error_after = 0.0;
  /// Relative gain; positive means better for both error and accuracy.
  double improvement = 0.0;
  std::size_t source_frames = 0;
  std::size_t target_train_frames = 0;
  std::size_t target_test_frames = 0;
  std::size_t mixed_frames = 0;
};

/// Self-training domain adaptation:
///   1. fit on the labeled source;
///   2. split the target into train/test (test labels reach only `evaluate`);
///   3. pseudo-label the target train split;
///   4. mix each target train frame with one source frame;
///   5. refit on source plus mixed frames and re-evaluate.
/// Steps 3-5 repeat for each fine-tune round, pseudo-labeling with the latest
/// model. Zero rounds report the source-only baseline twice.
UdaReport run_uda(const Dataset& source, const Dataset& target, Predictor& predictor,
                  const UdaConfig& cfg);

/// Fixed key order, shortest round-trip numbers.
std::string report_json(const UdaReport& report);

}  // namespace wixup
