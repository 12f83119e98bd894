#include "wixup/augment.hpp"

#include <thread>

#include "wixup/error.hpp"

namespace wixup {

AugmentMethod parse_method(const std::string& name) {
  if (name == "wixup") return AugmentMethod::Wixup;
  if (name == "cga") return AugmentMethod::Cga;
  if (name == "stack") return AugmentMethod::Stack;
  if (name == "wixup+") return AugmentMethod::WixupPlus;
  throw ConfigError("unknown method '" + name + "' (expected wixup|cga|stack|wixup+)");
}

std::string method_name(AugmentMethod method) {
  switch (method) {
    case AugmentMethod::Wixup: return "wixup";
    case AugmentMethod::Cga: return "cga";
    case AugmentMethod::Stack: return "stack";
    case AugmentMethod::WixupPlus: return "wixup+";
  }
  return "?";
}

void AugmentConfig::validate() const {
  mix.validate();
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (!(cga_low > 0.0) || !(cga_low <= cga_high))
    throw ConfigError("cga range needs 0 < low <= high");
  if (stack_target_count < 1) throw ConfigError("stack_target_count must be >= 1");
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

PairPlan enumerate_pairs(const Dataset& dataset, std::size_t scale, bool cross_sequence) {
  std::vector<SequenceRange> groups;
  if (cross_sequence)
    groups.push_back({"", 0, dataset.frames.size()});
  else
    groups = sequences(dataset);

  PairPlan plan;
  for (const auto& g : groups) {
    for (std::size_t d = 1; d <= scale && d < g.size(); ++d) {
      for (std::size_t i = 0; i + d < g.size(); ++i) {
        const std::size_t a = g.begin + i, b = g.begin + i + d;
        if (dataset.frames[a].points.empty() || dataset.frames[b].points.empty()) continue;
        plan.push_back({a, b, d, i});
      }
    }
  }
  return plan;
}

std::uint64_t pair_seed(std::uint64_t seed, const std::string& seq_id, std::size_t position,
                        std::size_t distance) {
  return derive_seed(seed, seq_id, position, distance);
}

Frame cga_frame(const Frame& frame, Rng& rng, double low, double high) {
  const double u = low == high ? low : rng.uniform(low, high);
  Frame out = frame;
  for (auto& p : out.points) {
    p.x *= u;
    p.y *= u;
    p.z *= u;
  }
  if (auto* kp = std::get_if<Keypoints>(&out.label))
    for (auto& j : kp->joints)
      for (double& v : j) v *= u;
  return out;
}

std::vector<Frame> stack_frame(const Frame& frame, std::size_t k, std::size_t target_count,
                               Rng& rng, int dims) {
  std::vector<Point> padded = frame.points;
  const bool extras = dims == 5;
  Point zero;
  if (extras) zero.extras = PointExtras{};
  while (padded.size() < target_count) padded.push_back(zero);

  std::vector<Frame> out;
  out.reserve(k);
  for (std::size_t dup = 0; dup < k; ++dup) {
    Frame f;
    f.seq_id = frame.seq_id;
    f.t = frame.t;
    f.label = frame.label;
    f.points.reserve(target_count);
    for (std::size_t n = 0; n < target_count; ++n) f.points.push_back(padded[rng.below(padded.size())]);
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

std::string pair_group(const Frame& a, const Frame& b) {
  if (a.seq_id == b.seq_id) return a.seq_id;
  return std::min(a.seq_id, b.seq_id) + "+" + std::max(a.seq_id, b.seq_id);
}

// Position of each frame inside its sequence.
std::vector<std::size_t> positions(const Dataset& dataset) {
  std::vector<std::size_t> pos(dataset.frames.size());
  for (const auto& s : sequences(dataset))
    for (std::size_t i = s.begin; i < s.end; ++i) pos[i] = i - s.begin;
  return pos;
}

std::vector<Frame> mix_plan(const Dataset& dataset, const PairPlan& plan,
                            const AugmentConfig& cfg) {
  std::vector<Frame> mixed(plan.size());
  parallel_for(plan.size(), cfg.threads, [&](std::size_t n) {
    const auto& pair = plan[n];
    const auto& f0 = dataset.frames[pair.first];
    const auto& f1 = dataset.frames[pair.second];
    Rng rng(pair_seed(cfg.seed, f0.seq_id, pair.position, pair.distance));
    Frame m = mix_frames(f0, f1, cfg.mix, rng);
    m.seq_id = pair_group(f0, f1) + "~aug" + std::to_string(pair.distance);
    if (cfg.method == AugmentMethod::WixupPlus) {
      Rng scale_rng(pair_seed(cfg.seed, f0.seq_id + "#cga", pair.position, pair.distance));
      m = cga_frame(m, scale_rng, cfg.cga_low, cfg.cga_high);
    }
    mixed[n] = std::move(m);
  });
  return mixed;
}

}  // namespace

Dataset augment(const Dataset& dataset, const AugmentConfig& cfg) {
  cfg.validate();
  Dataset out;
  out.meta = dataset.meta;
  out.frames = dataset.frames;
  const auto pos = positions(dataset);
  const auto n = dataset.frames.size();

  switch (cfg.method) {
    case AugmentMethod::Wixup:
    case AugmentMethod::WixupPlus: {
      const auto plan = enumerate_pairs(dataset, cfg.scale, cfg.cross_sequence);
      auto mixed = mix_plan(dataset, plan, cfg);
      out.frames.insert(out.frames.end(), std::make_move_iterator(mixed.begin()),
                        std::make_move_iterator(mixed.end()));
      break;
    }
    case AugmentMethod::Cga: {
      std::vector<Frame> scaled(n);
      parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto& f = dataset.frames[i];
        Rng rng(pair_seed(cfg.seed, f.seq_id + "#cga", pos[i], 0));
        scaled[i] = cga_frame(f, rng, cfg.cga_low, cfg.cga_high);
        scaled[i].seq_id += "~cga";
      });
      out.frames.insert(out.frames.end(), std::make_move_iterator(scaled.begin()),
                        std::make_move_iterator(scaled.end()));
      break;
    }
    case AugmentMethod::Stack: {
      std::vector<std::vector<Frame>> stacks(n);
      parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto& f = dataset.frames[i];
        Rng rng(pair_seed(cfg.seed, f.seq_id + "#stack", pos[i], 0));
        stacks[i] = stack_frame(f, cfg.stack_k, cfg.stack_target_count, rng, dataset.meta.dims);
        for (std::size_t j = 0; j < stacks[i].size(); ++j)
          stacks[i][j].seq_id += "~stack" + std::to_string(j);
      });
      for (auto& s : stacks)
        out.frames.insert(out.frames.end(), std::make_move_iterator(s.begin()),
                          std::make_move_iterator(s.end()));
      break;
    }
  }
  normalize(out);
  return out;
}

}  // namespace wixup
