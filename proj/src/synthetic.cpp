#include "wixup/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "wixup/error.hpp"
#include "wixup/rng.hpp"

namespace wixup {
namespace {

constexpr double kSensorHeight = 1.0;  // meters above the floor

struct JointTemplate {
  Joint offset;     // relative to the body center on the floor
  double swing;     // limb swing amplitude, meters
  double phase;
};

std::vector<JointTemplate> make_template(std::size_t joints, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "skeleton", joints, 0));
  std::vector<JointTemplate> out(joints);
  for (std::size_t j = 0; j < joints; ++j) {
    // Rough human envelope: 0.5 m wide, 0.2 m deep, 1.75 m tall.
    out[j].offset = {rng.uniform(-0.25, 0.25), rng.uniform(-0.1, 0.1),
                     rng.uniform(0.05, 1.75)};
    out[j].swing = rng.uniform(0.0, 0.15);
    out[j].phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return out;
}

std::string seq_name(const std::string& prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04zu", index);
  return prefix + buf;
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  if (config.sequences == 0 || config.frames_per_sequence == 0)
    throw ConfigError("synthetic dataset needs at least one frame");
  if (!(config.frame_rate > 0.0)) throw ConfigError("frame_rate must be positive");
  if (config.dims != 3 && config.dims != 5) throw ConfigError("dims must be 3 or 5");
  if (config.noise < 0.0 || config.dropout < 0.0 || config.dropout > 1.0)
    throw ConfigError("noise must be >= 0 and dropout within [0, 1]");
  const bool keypoints = config.label == LabelKind::Keypoints;
  if (keypoints ? config.joints == 0 : config.classes == 0)
    throw ConfigError("label dimension must be positive");

  // Class datasets still need a skeleton to place points; 19 joints then.
  const std::size_t joints = keypoints ? config.joints : 19;
  const auto skeleton = make_template(joints, config.template_seed);

  Dataset dataset;
  dataset.meta = {config.label, keypoints ? config.joints : config.classes, config.dims};
  dataset.frames.reserve(config.sequences * config.frames_per_sequence);

  for (std::size_t s = 0; s < config.sequences; ++s) {
    Rng rng(derive_seed(seed, config.seq_prefix, s, 0));
    const std::size_t cls = keypoints ? 0 : rng.below(config.classes);
    const double c = config.classes > 1 ? static_cast<double>(cls) / (config.classes - 1) : 0.0;

    const double x0 = rng.uniform(-config.center_spread, config.center_spread);
    const double y0 = config.distance + rng.uniform(-config.center_spread, config.center_spread);
    const double ax = rng.uniform(0.05, 0.3), ay = rng.uniform(0.05, 0.3);
    const double wx = rng.uniform(0.2, 0.6), wy = rng.uniform(0.2, 0.6);
    const double px = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double py = rng.uniform(0.0, 2.0 * std::numbers::pi);
    // Actions differ in gait tempo and limb amplitude.
    const double gait = keypoints ? rng.uniform(1.0, 3.0) : 1.5 + 2.0 * c;
    const double swing_scale = keypoints ? rng.uniform(0.5, 1.5) : 0.5 + c;
    const double start = rng.uniform(0.0, 10.0);

    for (std::size_t k = 0; k < config.frames_per_sequence; ++k) {
      const double t = static_cast<double>(k) / config.frame_rate;
      const double tau = start + t;
      const double cx = x0 + ax * std::sin(wx * tau + px) + config.shift[0];
      const double cy = y0 + ay * std::sin(wy * tau + py) + config.shift[1];
      const double cz = -kSensorHeight + config.shift[2];
      const double vx = ax * wx * std::cos(wx * tau + px);
      const double vy = ay * wy * std::cos(wy * tau + py);

      Frame frame;
      frame.seq_id = seq_name(config.seq_prefix, s);
      frame.t = t;
      Keypoints kp;
      kp.joints.resize(joints);
      for (std::size_t j = 0; j < joints; ++j) {
        const auto& jt = skeleton[j];
        const double arg = gait * tau + jt.phase;
        const double sw = swing_scale * jt.swing;
        kp.joints[j] = {cx + jt.offset[0], cy + jt.offset[1] + sw * std::sin(arg),
                        cz + jt.offset[2] + 0.3 * sw * std::cos(arg)};

        const bool kept = rng.uniform() >= config.dropout;
        const double nx = rng.normal(), ny = rng.normal(), nz = rng.normal();
        const double intensity = rng.uniform(5.0, 15.0);
        if (!kept) continue;
        Point p;
        p.x = kp.joints[j][0] + config.noise * nx;
        p.y = kp.joints[j][1] + config.noise * ny;
        p.z = kp.joints[j][2] + config.noise * nz;
        if (config.dims == 5) {
          const double vyj = vy + sw * gait * std::cos(arg);
          const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
          const double doppler = r > 0.0 ? (p.x * vx + p.y * vyj) / r : 0.0;
          p.extras = PointExtras{doppler, intensity};
        }
        frame.points.push_back(p);
      }
      if (keypoints) {
        frame.label = std::move(kp);
      } else {
        ClassProbs probs;
        probs.probs.assign(config.classes, 0.0);
        probs.probs[cls] = 1.0;
        frame.label = std::move(probs);
      }
      dataset.frames.push_back(std::move(frame));
    }
  }
  normalize(dataset);
  return dataset;
}

}  // namespace wixup
