#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "wixup/error.hpp"
#include "wixup/frames_io.hpp"
#include "wixup/synthetic.hpp"

using namespace wixup;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::string format(const Dataset& d) {
  std::ostringstream out;
  format_dataset(d, out);
  return out.str();
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("frames_io") {

TEST_CASE("class labels expand to one-hot probabilities") {
  const auto d =
      parse(R"({"seq":"a","t":0.0,"points":[[0,2,0]],"label":{"class":1,"num_classes":3}})"
            "\n");
  REQUIRE(d.frames.size() == 1);
  CHECK(std::get<ClassProbs>(d.frames[0].label).probs == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(d.meta.label == LabelKind::ClassProbs);
  CHECK(d.meta.label_size == 3);
  CHECK(d.frames[0].points[0] == Point{0.0, 2.0, 0.0, std::nullopt});
}

TEST_CASE("repeated timestamp within a sequence is rejected") {
  const std::string text =
      R"({"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}})"
      "\n"
      R"({"seq":"a","t":0.0,"points":[],"label":{"class":1,"num_classes":2}})"
      "\n";
  const auto msg = error_of(text);
  CHECK(msg.find("timestamp") != std::string::npos);
}

TEST_CASE("5D point in a dataset declared 3D is rejected") {
  const std::string text =
      R"({"meta":{"label":"class","C":3,"dims":3}})"
      "\n"
      R"({"seq":"a","t":0.0,"points":[[0,1,0,0.5,10]],"label":{"class":1,"num_classes":3}})"
      "\n";
  CHECK_FALSE(error_of(text).empty());
}

TEST_CASE("errors name the offending line") {
  const std::string text =
      R"({"seq":"a","t":0.0,"points":[[0,2,0]],"label":{"class":1,"num_classes":3}})"
      "\n"
      "{not json\n";
  CHECK(error_of(text).find("line 2") != std::string::npos);
  CHECK(error_of(R"({"seq":"a","t":0,"points":[[0,1]],"label":{"probs":[1]}})").find("line 1") !=
        std::string::npos);
}

TEST_CASE("mixed label variants are rejected") {
  const std::string text =
      R"({"seq":"a","t":0.0,"points":[],"label":{"class":0,"num_classes":2}})"
      "\n"
      R"({"seq":"a","t":1.0,"points":[],"label":{"keypoints":[[0,0,0],[1,1,1]]}})"
      "\n";
  CHECK_FALSE(error_of(text).empty());
}

TEST_CASE("probability vectors must sum to one") {
  CHECK_FALSE(
      error_of(R"({"seq":"a","t":0,"points":[],"label":{"probs":[0.5,0.4]}})").empty());
  CHECK(error_of(R"({"seq":"a","t":0,"points":[],"label":{"probs":[0.5,0.5]}})").empty());
}

TEST_CASE("frames are sorted by sequence then time") {
  const std::string text =
      R"({"seq":"b","t":1.0,"points":[],"label":{"class":0,"num_classes":2}})"
      "\n"
      R"({"seq":"a","t":2.0,"points":[],"label":{"class":0,"num_classes":2}})"
      "\n"
      R"({"seq":"b","t":3.0,"points":[],"label":{"class":1,"num_classes":2}})"
      "\n";
  const auto d = parse(text);
  REQUIRE(d.frames.size() == 3);
  CHECK(d.frames[0].seq_id == "a");
  CHECK(d.frames[1].t == 1.0);
  CHECK(d.frames[2].t == 3.0);
  CHECK(sequences(d).size() == 2);
}

TEST_CASE("empty dataset writes nothing and reads back empty") {
  CHECK(format(Dataset{}).empty());
  CHECK(parse("").frames.empty());
}

TEST_CASE("round trip is the identity over generated datasets") {
  for (int label = 0; label < 2; ++label) {
    for (int dims : {3, 5}) {
      SynthConfig cfg;
      cfg.label = label == 0 ? LabelKind::Keypoints : LabelKind::ClassProbs;
      cfg.dims = dims;
      cfg.sequences = 3;
      cfg.frames_per_sequence = 12;
      cfg.dropout = 0.7;  // some frames end up empty
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto d = generate_synthetic(cfg, seed);
        const auto text = format(d);
        const auto back = parse(text);
        CHECK(back == d);
        CHECK(format(back) == text);
      }
    }
  }
}

TEST_CASE("mixed-probability labels and awkward doubles survive a round trip") {
  Rng rng(3);
  Dataset d;
  d.meta = {LabelKind::ClassProbs, 3, 5};
  for (int i = 0; i < 40; ++i) {
    Frame f;
    f.seq_id = i % 2 ? "x\"y" : "plain";
    f.t = 0.1 * i + 1e-17 * i;
    const double p = rng.uniform();
    f.label = ClassProbs{{p, 1.0 - p, 0.0}};
    for (int k = 0; k < i % 4; ++k)
      f.points.push_back({rng.normal() * 1e-7, 1.0 / 3.0 + i, -rng.uniform() * 1e5,
                          PointExtras{rng.normal(), 5e-324}});
    d.frames.push_back(f);
  }
  normalize(d);
  // 5D with some points: inferable, so no header line.
  const auto text = format(d);
  CHECK(text.find("meta") == std::string::npos);
  CHECK(parse(text) == d);
}

TEST_CASE("header is written only when dims cannot be inferred") {
  Dataset d;
  d.meta = {LabelKind::Keypoints, 1, 5};
  Frame f;
  f.seq_id = "a";
  f.label = Keypoints{{{0, 0, 0}}};
  d.frames.push_back(f);
  const auto text = format(d);
  CHECK(text.rfind(R"({"meta":)", 0) == 0);
  CHECK(parse(text) == d);
}

TEST_CASE("writing twice gives identical files") {
  testing::TempDir dir("io");
  const auto d = generate_synthetic(SynthConfig{}, 11);
  write_dataset(d, dir.file("a.jsonl"));
  write_dataset(d, dir.file("b.jsonl"));
  const auto a = testing::slurp(dir.file("a.jsonl"));
  CHECK(a == testing::slurp(dir.file("b.jsonl")));
  CHECK(testing::count_lines(a) == 100);
  CHECK(read_dataset(dir.file("a.jsonl")) == d);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.0) == "-0");
  for (double v : {1.0 / 3.0, 6.02214076e23, -1e-300, 0.0375}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("generator is a pure function of config and seed") {
  SynthConfig cfg;
  CHECK(generate_synthetic(cfg, 5) == generate_synthetic(cfg, 5));
  CHECK_FALSE(generate_synthetic(cfg, 5) == generate_synthetic(cfg, 6));
  const auto d = generate_synthetic(cfg, 5);
  CHECK(d.frames.size() == 100);
  CHECK(sequences(d).size() == 2);
  cfg.frames_per_sequence = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg, 5), ConfigError);
}

TEST_CASE("noise 0 and dropout 0 give points equal to keypoints") {
  SynthConfig cfg;
  cfg.noise = 0.0;
  cfg.dropout = 0.0;
  const auto d = generate_synthetic(cfg, 9);
  for (const auto& f : d.frames) {
    const auto& kp = std::get<Keypoints>(f.label);
    REQUIRE(f.points.size() == kp.joints.size());
    for (std::size_t j = 0; j < kp.joints.size(); ++j) {
      CHECK(f.points[j].x == kp.joints[j][0]);
      CHECK(f.points[j].y == kp.joints[j][1]);
      CHECK(f.points[j].z == kp.joints[j][2]);
    }
  }
}

TEST_CASE("domain shift moves centroids by the offset") {
  SynthConfig cfg;
  cfg.noise = 0.02;
  const auto base = generate_synthetic(cfg, 21);
  cfg.shift = {0.2, 0.0, 0.0};
  const auto shifted = generate_synthetic(cfg, 21);
  auto centroid_x = [](const Dataset& d) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& f : d.frames)
      for (const auto& p : f.points) {
        s += p.x;
        ++n;
      }
    return s / static_cast<double>(n);
  };
  // Same seed: identical noise and dropout draws, so only the offset differs.
  CHECK(centroid_x(shifted) - centroid_x(base) == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("class datasets hold exactly one-hot labels") {
  SynthConfig cfg;
  cfg.label = LabelKind::ClassProbs;
  cfg.classes = 4;
  const auto d = generate_synthetic(cfg, 2);
  const auto back = parse(format(d));
  for (const auto& f : back.frames) {
    const auto& p = std::get<ClassProbs>(f.label).probs;
    CHECK(std::count(p.begin(), p.end(), 1.0) == 1);
    CHECK(std::count(p.begin(), p.end(), 0.0) == 3);
  }
}

}  // TEST_SUITE
