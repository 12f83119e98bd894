#include "wixup/self_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "wixup/augment.hpp"
#include "wixup/error.hpp"
#include "wixup/rng.hpp"

namespace wixup {

KnnPredictor::KnnPredictor(std::size_t k) : k_(k) {
  if (k_ == 0) throw ConfigError("k must be >= 1");
}

Descriptor KnnPredictor::describe(const Frame& frame) const {
  Descriptor d{};
  const auto n = frame.points.size();
  if (n == 0) return d;
  for (const auto& p : frame.points) {
    d[0] += p.x;
    d[1] += p.y;
    d[2] += p.z;
  }
  for (int c = 0; c < 3; ++c) d[c] /= static_cast<double>(n);
  for (const auto& p : frame.points) {
    const double dx = p.x - d[0], dy = p.y - d[1], dz = p.z - d[2];
    d[3] += dx * dx;
    d[4] += dy * dy;
    d[5] += dz * dz;
  }
  for (int c = 3; c < 6; ++c) d[c] = std::sqrt(d[c] / static_cast<double>(n));
  d[6] = static_cast<double>(n) / count_scale_;
  return d;
}

void KnnPredictor::fit(std::span<const Frame> frames) {
  if (frames.empty()) throw DataError("k-NN fit needs at least one frame");
  std::size_t max_count = 1;
  for (const auto& f : frames) max_count = std::max(max_count, f.points.size());
  count_scale_ = static_cast<double>(max_count);
  descriptors_.clear();
  labels_.clear();
  descriptors_.reserve(frames.size());
  labels_.reserve(frames.size());
  for (const auto& f : frames) {
    descriptors_.push_back(describe(f));
    labels_.push_back(f.label);
  }
}

std::vector<Label> KnnPredictor::predict(std::span<const Frame> frames) const {
  if (descriptors_.empty()) throw DataError("k-NN predict called before fit");
  const std::size_t n = descriptors_.size();
  const std::size_t k = std::min(k_, n);
  std::vector<Label> out;
  out.reserve(frames.size());
  std::vector<std::pair<double, std::size_t>> dist(n);

  for (const auto& f : frames) {
    const auto q = describe(f);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < q.size(); ++c) {
        const double d = q[c] - descriptors_[i][c];
        s += d * d;
      }
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    if (const auto* first = std::get_if<Keypoints>(&labels_[dist[0].second])) {
      Keypoints mean;
      mean.joints.assign(first->joints.size(), Joint{0.0, 0.0, 0.0});
      for (std::size_t r = 0; r < k; ++r) {
        const auto& kp = std::get<Keypoints>(labels_[dist[r].second]);
        for (std::size_t j = 0; j < mean.joints.size(); ++j)
          for (int c = 0; c < 3; ++c) mean.joints[j][c] += kp.joints[j][c];
      }
      for (auto& j : mean.joints)
        for (double& v : j) v /= static_cast<double>(k);
      out.emplace_back(std::move(mean));
    } else {
      ClassProbs sum;
      sum.probs.assign(std::get<ClassProbs>(labels_[dist[0].second]).probs.size(), 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        const auto& p = std::get<ClassProbs>(labels_[dist[r].second]).probs;
        for (std::size_t c = 0; c < p.size(); ++c) sum.probs[c] += p[c];
      }
      const double total = std::accumulate(sum.probs.begin(), sum.probs.end(), 0.0);
      for (double& v : sum.probs) v /= total;
      out.emplace_back(std::move(sum));
    }
  }
  return out;
}

std::unique_ptr<Predictor> knn_predictor(std::size_t k) {
  return std::make_unique<KnnPredictor>(k);
}

double mle(const Keypoints& pred, const Keypoints& gt) {
  if (pred.joints.size() != gt.joints.size())
    throw DataError("keypoint count mismatch in MLE");
  if (gt.joints.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < gt.joints.size(); ++j) {
    const double dx = pred.joints[j][0] - gt.joints[j][0];
    const double dy = pred.joints[j][1] - gt.joints[j][1];
    const double dz = pred.joints[j][2] - gt.joints[j][2];
    sum += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return 100.0 * sum / static_cast<double>(gt.joints.size());
}

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Label blank_like(const Label& label) {
  if (const auto* kp = std::get_if<Keypoints>(&label))
    return Keypoints{std::vector<Joint>(kp->joints.size(), Joint{0.0, 0.0, 0.0})};
  const auto c = std::get<ClassProbs>(label).probs.size();
  std::vector<double> uniform(c, 1.0 / static_cast<double>(c));
  return ClassProbs{std::move(uniform)};
}

double relative_gain(const std::string& metric, double before, double after) {
  if (before == 0.0) return 0.0;
  return metric == "accuracy" ? (after - before) / before : (before - after) / before;
}

}  // namespace

double accuracy(std::span<const ClassProbs> preds, std::span<const ClassProbs> gts) {
  if (preds.size() != gts.size()) throw DataError("prediction/ground-truth length mismatch");
  if (gts.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (preds[i].probs.size() != gts[i].probs.size())
      throw DataError("class count mismatch in accuracy");
    if (argmax(preds[i].probs) == argmax(gts[i].probs)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gts.size());
}

double evaluate(std::span<const Label> preds, std::span<const Label> gts) {
  if (preds.size() != gts.size()) throw DataError("prediction/ground-truth length mismatch");
  if (gts.empty()) return 0.0;
  if (label_kind(gts[0]) == LabelKind::Keypoints) {
    double sum = 0.0;
    for (std::size_t i = 0; i < gts.size(); ++i)
      sum += mle(std::get<Keypoints>(preds[i]), std::get<Keypoints>(gts[i]));
    return sum / static_cast<double>(gts.size());
  }
  std::vector<ClassProbs> p, g;
  for (const auto& l : preds) p.push_back(std::get<ClassProbs>(l));
  for (const auto& l : gts) g.push_back(std::get<ClassProbs>(l));
  return accuracy(p, g);
}

Pairing parse_pairing(const std::string& name) {
  if (name == "random") return Pairing::Random;
  if (name == "cyclic") return Pairing::Cyclic;
  throw ConfigError("unknown pairing '" + name + "' (expected random|cyclic)");
}

std::string pairing_name(Pairing pairing) {
  return pairing == Pairing::Random ? "random" : "cyclic";
}

void UdaConfig::validate() const {
  mix.validate();
  if (!(target_train_fraction > 0.0 && target_train_fraction < 1.0))
    throw ConfigError("target_train_fraction must lie in (0, 1)");
}

UdaReport run_uda(const Dataset& source, const Dataset& target, Predictor& predictor,
                  const UdaConfig& cfg) {
  cfg.validate();
  if (source.frames.empty() || target.frames.empty())
    throw DataError("source and target datasets must be non-empty");
  if (source.meta.label != target.meta.label ||
      source.meta.label_size != target.meta.label_size)
    throw DataError("source and target label variants differ");

  // Step 2 split. Labels of both target splits are held apart from the frames
  // the predictor sees; only `evaluate` ever reads the test labels.
  std::vector<std::size_t> order(target.frames.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(cfg.seed, "uda-split", 0, 0));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[split_rng.below(i)]);
  const auto n_train = static_cast<std::size_t>(
      std::llround(cfg.target_train_fraction * static_cast<double>(order.size())));
  if (n_train == 0 || n_train >= order.size())
    throw DataError("target split leaves an empty train or test set");
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  const Label blank = blank_like(target.frames.front().label);
  std::vector<Frame> train, test;
  std::vector<Label> test_truth;
  for (std::size_t r = 0; r < order.size(); ++r) {
    Frame f = target.frames[order[r]];
    if (r < n_train) {
      f.label = blank;
      train.push_back(std::move(f));
    } else {
      test_truth.push_back(std::move(f.label));
      f.label = blank;
      test.push_back(std::move(f));
    }
  }

  UdaReport report;
  report.metric = source.meta.label == LabelKind::Keypoints ? "mle_cm" : "accuracy";
  report.source_frames = source.frames.size();
  report.target_train_frames = train.size();
  report.target_test_frames = test.size();

  // Step 1.
  predictor.fit(source.frames);
  report.error_before = evaluate(predictor.predict(test), test_truth);
  report.error_after = report.error_before;

  std::vector<std::size_t> partners;
  for (std::size_t i = 0; i < source.frames.size(); ++i)
    if (!source.frames[i].points.empty()) partners.push_back(i);
  if (partners.empty()) throw DataError("source has no non-empty frames to mix with");

  for (std::size_t round = 0; round < cfg.fine_tune_rounds; ++round) {
    // Step 3.
    auto pseudo = predictor.predict(train);

    // Step 4: one source partner per non-empty target train frame.
    Rng pair_rng(derive_seed(cfg.seed, "uda-pairing", round, 0));
    std::vector<std::size_t> pool;
    std::size_t cursor = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (target train, source)
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train[i].points.empty()) continue;
      std::size_t src;
      if (cfg.pairing == Pairing::Cyclic) {
        src = partners[i % partners.size()];
      } else {
        if (cursor == pool.size()) {
          pool = partners;
          for (std::size_t n = pool.size(); n > 1; --n) std::swap(pool[n - 1], pool[pair_rng.below(n)]);
          cursor = 0;
        }
        src = pool[cursor++];
      }
      pairs.emplace_back(i, src);
    }

    std::vector<Frame> mixed(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t n) {
      const auto [ti, si] = pairs[n];
      Frame pseudo_frame = train[ti];
      pseudo_frame.label = pseudo[ti];
      Rng rng(derive_seed(cfg.seed, "uda-mix", ti, round));
      mixed[n] = mix_frames(source.frames[si], pseudo_frame, cfg.mix, rng);
    });

    // Step 5.
    std::vector<Frame> training = source.frames;
    training.insert(training.end(), std::make_move_iterator(mixed.begin()),
                    std::make_move_iterator(mixed.end()));
    report.mixed_frames = pairs.size();
    predictor.fit(training);
    report.error_after = evaluate(predictor.predict(test), test_truth);
  }
  report.improvement = relative_gain(report.metric, report.error_before, report.error_after);
  return report;
}

std::string report_json(const UdaReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  j["error_before"] = report.error_before;
  j["error_after"] = report.error_after;
  j["improvement"] = report.improvement;
  j["source_frames"] = report.source_frames;
  j["target_train_frames"] = report.target_train_frames;
  j["target_test_frames"] = report.target_test_frames;
  j["mixed_frames"] = report.mixed_frames;
  return j.dump();
}

}  // namespace wixup
