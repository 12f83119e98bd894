#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "support.hpp"
#include "wixup/error.hpp"
#include "wixup/self_training.hpp"
#include "wixup/synthetic.hpp"

using namespace wixup;

namespace {

Frame at(double x, double y, Label label, std::size_t copies = 1) {
  Frame f;
  f.seq_id = "k";
  for (std::size_t i = 0; i < copies; ++i) f.points.push_back({x, y, 0.0, std::nullopt});
  f.label = std::move(label);
  return f;
}

Dataset domain(double shift, std::uint64_t seed, std::size_t seqs, std::size_t len,
               const std::string& prefix, LabelKind label = LabelKind::Keypoints) {
  SynthConfig cfg;
  cfg.sequences = seqs;
  cfg.frames_per_sequence = len;
  cfg.shift = {shift, 0.0, 0.0};
  cfg.seq_prefix = prefix;
  cfg.label = label;
  return generate_synthetic(cfg, seed);
}

}  // namespace

TEST_SUITE("self_training") {

TEST_CASE("mle") {
  const Keypoints a{{{0, 0, 0}}};
  CHECK(mle(a, a) == 0.0);
  CHECK(mle(Keypoints{{{0.03, 0.04, 0}}}, a) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mle(Keypoints{{{0.03, 0.04, 0}, {1, 1, 1}}}, Keypoints{{{0, 0, 0}, {1, 1, 1}}}) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(mle(a, Keypoints{{{0, 0, 0}, {0, 0, 0}}}), DataError);
}

TEST_CASE("accuracy") {
  std::vector<ClassProbs> gt{{{1, 0}}, {{0, 1}}};
  CHECK(accuracy(gt, gt) == 1.0);
  // Tie goes to the lowest index: [0.5, 0.5] reads as class 0.
  std::vector<ClassProbs> tie{{{0.5, 0.5}}};
  std::vector<ClassProbs> zero{{{1, 0}}};
  CHECK(accuracy(tie, zero) == 1.0);
  std::vector<ClassProbs> half{{{1, 0}}, {{1, 0}}};
  CHECK(accuracy(half, gt) == 0.5);
  CHECK_THROWS_AS(accuracy(half, zero), DataError);
}

TEST_CASE("accuracy over a known confusion matrix") {
  // 4 classes, 1000 samples; confusion[t][p] counts.
  const int confusion[4][4] = {
      {200, 10, 5, 0}, {20, 180, 30, 10}, {0, 15, 250, 5}, {40, 5, 5, 225}};
  std::vector<ClassProbs> preds, gts;
  Rng rng(1);
  int correct = 0, total = 0;
  for (int t = 0; t < 4; ++t)
    for (int p = 0; p < 4; ++p)
      for (int n = 0; n < confusion[t][p]; ++n) {
        ClassProbs g{{0, 0, 0, 0}};
        g.probs[t] = 1.0;
        ClassProbs q{{0, 0, 0, 0}};
        const double top = rng.uniform(0.4, 1.0);
        q.probs[p] = top;
        q.probs[(p + 1) % 4] = (1.0 - top) * 0.5;
        q.probs[(p + 2) % 4] = (1.0 - top) * 0.5;
        preds.push_back(q);
        gts.push_back(g);
        correct += t == p;
        ++total;
      }
  REQUIRE(total == 1000);
  CHECK(accuracy(preds, gts) == static_cast<double>(correct) / 1000.0);
  CHECK(correct == 855);
}

TEST_CASE("evaluate dispatches on label kind") {
  std::vector<Label> p{Keypoints{{{0.03, 0.04, 0}}}, Keypoints{{{0, 0, 0}}}};
  std::vector<Label> g{Keypoints{{{0, 0, 0}}}, Keypoints{{{0, 0, 0}}}};
  CHECK(evaluate(p, g) == doctest::Approx(2.5));
  std::vector<Label> c{ClassProbs{{0, 1}}, ClassProbs{{1, 0}}};
  std::vector<Label> cg{ClassProbs{{0, 1}}, ClassProbs{{0, 1}}};
  CHECK(evaluate(c, cg) == 0.5);
}

TEST_CASE("k-nn: nearest self and equidistant average") {
  std::vector<Frame> train{at(0, 2, Keypoints{{{1, 1, 1}}}), at(1, 2, Keypoints{{{3, 3, 3}}}),
                           at(5, 2, Keypoints{{{9, 9, 9}}})};
  KnnPredictor one(1);
  one.fit(train);
  const auto self = one.predict(train);
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(self[i] == train[i].label);

  KnnPredictor two(2);
  two.fit(std::span(train).first(2));
  const std::vector<Frame> mid{at(0.5, 2, Keypoints{{{0, 0, 0}}})};
  const auto avg = std::get<Keypoints>(two.predict(mid)[0]);
  CHECK(avg.joints[0] == Joint{2, 2, 2});
}

TEST_CASE("k-nn class outputs are normalized") {
  Rng rng(3);
  std::vector<Frame> train;
  for (int i = 0; i < 30; ++i) {
    ClassProbs c{{0, 0, 0}};
    c.probs[i % 3] = 1.0;
    train.push_back(at(rng.uniform(-1, 1), rng.uniform(1, 4), c, 1 + i % 5));
  }
  KnnPredictor knn(5);
  knn.fit(train);
  std::vector<Frame> queries;
  for (int i = 0; i < 20; ++i)
    queries.push_back(at(rng.uniform(-1, 1), rng.uniform(1, 4), ClassProbs{{1, 0, 0}}, 3));
  for (const auto& l : knn.predict(queries)) {
    const auto& p = std::get<ClassProbs>(l).probs;
    CHECK(p.size() == 3);
    CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) <= 1e-9);
  }
}

TEST_CASE("k-nn descriptor and tie order") {
  KnnPredictor knn(1);
  std::vector<Frame> train{at(0, 2, Keypoints{{{1, 0, 0}}}, 2), at(0, 2, Keypoints{{{2, 0, 0}}}, 2)};
  knn.fit(train);
  // Exact tie: the earlier training frame wins.
  CHECK(std::get<Keypoints>(knn.predict(train)[1]).joints[0][0] == 1.0);
  Frame f;
  f.points = {{0, 1, 0, std::nullopt}, {2, 3, 0, std::nullopt}};
  const auto d = knn.describe(f);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 2.0);
  CHECK(d[3] == 1.0);
  CHECK(d[5] == 0.0);
  CHECK(d[6] == 1.0);  // 2 points / largest training count 2
  CHECK_THROWS(KnnPredictor(1).fit(std::span<const Frame>{}));
}

TEST_CASE("zero fine-tune rounds reproduce the baseline") {
  const auto source = domain(0.0, 1, 3, 30, "src");
  const auto target = domain(0.2, 2, 3, 30, "tgt");
  KnnPredictor knn(5);
  UdaConfig cfg;
  cfg.fine_tune_rounds = 0;
  const auto r = run_uda(source, target, knn, cfg);
  CHECK(r.error_after == r.error_before);
  CHECK(r.improvement == 0.0);
  CHECK(r.mixed_frames == 0);
}

TEST_CASE("report counts and metric") {
  const auto source = domain(0.0, 1, 3, 30, "src");
  const auto target = domain(0.2, 2, 3, 30, "tgt");
  KnnPredictor knn(5);
  UdaConfig cfg;
  cfg.seed = 4;
  const auto r = run_uda(source, target, knn, cfg);
  CHECK(r.metric == "mle_cm");
  CHECK(r.source_frames == 90);
  CHECK(r.target_train_frames == 45);
  CHECK(r.target_test_frames == 45);
  CHECK(r.mixed_frames == r.target_train_frames);  // no empty frames at this dropout
  CHECK(r.error_before > 0.0);
  CHECK(r.improvement == doctest::Approx((r.error_before - r.error_after) / r.error_before));
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j.at("error_before").get<double>() == r.error_before);
  CHECK(j.at("metric") == "mle_cm");
}

TEST_CASE("classification loop reports accuracy with flipped sign") {
  const auto source = domain(0.0, 1, 3, 30, "src", LabelKind::ClassProbs);
  const auto target = domain(0.2, 2, 3, 30, "tgt", LabelKind::ClassProbs);
  KnnPredictor knn(5);
  UdaConfig cfg;
  const auto r = run_uda(source, target, knn, cfg);
  CHECK(r.metric == "accuracy");
  CHECK(r.error_before >= 0.0);
  CHECK(r.error_before <= 1.0);
  if (r.error_before > 0.0)
    CHECK(r.improvement == doctest::Approx((r.error_after - r.error_before) / r.error_before));
}

TEST_CASE("runs are deterministic for both pairings and any thread count") {
  const auto source = domain(0.0, 5, 2, 25, "src");
  const auto target = domain(0.2, 6, 2, 25, "tgt");
  for (auto pairing : {Pairing::Cyclic, Pairing::Random}) {
    UdaConfig cfg;
    cfg.pairing = pairing;
    cfg.seed = 12;
    cfg.threads = 1;
    KnnPredictor k1(5), k2(5);
    const auto a = report_json(run_uda(source, target, k1, cfg));
    cfg.threads = 3;
    const auto b = report_json(run_uda(source, target, k2, cfg));
    CHECK(a == b);
  }
  CHECK(parse_pairing(pairing_name(Pairing::Cyclic)) == Pairing::Cyclic);
  CHECK_THROWS_AS(parse_pairing("nearest"), ConfigError);
}

// Guards against test labels leaking into training: a predictor that
// records everything it is fitted on must never see a target-test label.
TEST_CASE("target test labels never reach the predictor") {
  struct Spy final : Predictor {
    KnnPredictor inner{3};
    std::vector<Label> seen;
    void fit(std::span<const Frame> frames) override {
      for (const auto& f : frames) seen.push_back(f.label);
      inner.fit(frames);
    }
    std::vector<Label> predict(std::span<const Frame> frames) const override {
      for (const auto& f : frames) {
        const auto& kp = std::get<Keypoints>(f.label);
        for (const auto& j : kp.joints) REQUIRE(j == Joint{0, 0, 0});
      }
      return inner.predict(frames);
    }
  };
  const auto source = domain(0.0, 1, 2, 20, "src");
  auto target = domain(0.2, 2, 2, 20, "tgt");
  // Mark every target label with a sentinel the spy can look for.
  for (auto& f : target.frames)
    for (auto& j : std::get<Keypoints>(f.label).joints) j = {777.0, 777.0, 777.0};
  Spy spy;
  UdaConfig cfg;
  cfg.fine_tune_rounds = 2;
  run_uda(source, target, spy, cfg);
  for (const auto& l : spy.seen)
    for (const auto& j : std::get<Keypoints>(l).joints) CHECK(j[0] != 777.0);
}

TEST_CASE("invalid inputs") {
  const auto source = domain(0.0, 1, 2, 10, "src");
  const auto classes = domain(0.0, 1, 2, 10, "c", LabelKind::ClassProbs);
  KnnPredictor knn(3);
  UdaConfig cfg;
  CHECK_THROWS_AS(run_uda(source, classes, knn, cfg), DataError);
  cfg.target_train_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.target_train_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}  // TEST_SUITE
