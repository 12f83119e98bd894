#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_config.hpp"
#include "wixup/error.hpp"
#include "wixup/frames_io.hpp"
#include "wixup/mixer.hpp"
#include "wixup/rng.hpp"

namespace wixup::cli {
namespace {

using nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + path);
}

std::size_t threads_from(const CLI::Option* opt, std::size_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("WIXUP_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ConfigError("WIXUP_THREADS must be a non-negative integer");
    }
  }
  return 0;
}

ordered_json dataset_stats(const Dataset& d) {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& f : d.frames) ++histogram[f.points.size()];
  ordered_json hist = ordered_json::object();
  for (const auto& [count, frames] : histogram) hist[std::to_string(count)] = frames;

  ordered_json j;
  j["frames"] = d.frames.size();
  j["sequences"] = sequences(d).size();
  if (d.frames.empty()) {
    j["label"] = nullptr;
    j["label_size"] = 0;
  } else {
    j["label"] = d.meta.label == LabelKind::Keypoints ? "keypoints" : "class";
    j["label_size"] = d.meta.label_size;
  }
  j["dims"] = d.meta.dims;
  j["point_count_histogram"] = hist;
  return j;
}

// Flags that map one-to-one onto settings keys.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::string*>> options;
  std::vector<std::string> keys;
  std::map<std::string, std::string> storage;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto& slot = storage[key];
    options.emplace_back(app->add_option(flag, slot, help), &slot);
    keys.push_back(key);
  }

  void apply(Settings& s) const {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (options[i].first->count() > 0) s.set(keys[i], *options[i].second);
  }
};

struct AugmentArgs {
  std::string input, output, config;
  std::size_t threads = 0;
  CLI::Option* threads_opt = nullptr;
  Overrides overrides;
};

int cmd_augment(const AugmentArgs& a, std::ostream& out) {
  Settings settings = pipeline_settings();
  if (!a.config.empty()) settings.load_file(a.config);
  a.overrides.apply(settings);
  auto cfg = augment_config(settings);
  cfg.threads = threads_from(a.threads_opt, a.threads);

  const auto input = read_dataset(a.input);
  const auto result = augment(input, cfg);
  write_dataset(result, a.output);

  ordered_json prov;
  prov["command"] = "augment";
  prov["config"] = settings.to_json();
  prov["input"] = a.input;
  prov["input_fnv1a64"] = file_hash(a.input);
  prov["input_frames"] = input.frames.size();
  prov["output_frames"] = result.frames.size();
  write_json(a.output + ".provenance.json", prov);

  out << "wrote " << result.frames.size() << " frames to " << a.output << '\n';
  return kExitOk;
}

struct SelftrainArgs {
  std::string source, target, config, output;
  std::size_t threads = 0;
  CLI::Option* threads_opt = nullptr;
  Overrides overrides;
};

int cmd_selftrain(const SelftrainArgs& a, std::ostream& out) {
  Settings settings = pipeline_settings();
  if (!a.config.empty()) settings.load_file(a.config);
  a.overrides.apply(settings);
  auto cfg = uda_config(settings);
  cfg.threads = threads_from(a.threads_opt, a.threads);

  const auto source = read_dataset(a.source);
  const auto target = read_dataset(a.target);
  KnnPredictor predictor(settings.get_u64("knn_k"));
  const auto report = run_uda(source, target, predictor, cfg);

  auto j = ordered_json::parse(report_json(report));
  ordered_json prov;
  prov["config"] = settings.to_json();
  prov["source_fnv1a64"] = file_hash(a.source);
  prov["target_fnv1a64"] = file_hash(a.target);
  j["provenance"] = prov;
  if (!a.output.empty()) write_json(a.output, j);
  out << j.dump() << '\n';
  return kExitOk;
}

struct StatsArgs {
  std::string input, gen, output;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  if (!a.gen.empty()) {
    if (a.output.empty()) throw ConfigError("stats --gen needs --output");
    if (a.seed_opt->count() == 0) throw ConfigError("stats --gen needs --seed");
    Settings settings = synth_settings();
    settings.load_file(a.gen);
    const auto data = generate_synthetic(synth_config(settings), a.seed);
    write_dataset(data, a.output);
    ordered_json prov;
    prov["command"] = "stats --gen";
    prov["config"] = settings.to_json();
    prov["seed"] = a.seed;
    prov["output_frames"] = data.frames.size();
    write_json(a.output + ".provenance.json", prov);
    out << dataset_stats(data).dump() << '\n';
    return kExitOk;
  }
  if (a.input.empty()) throw ConfigError("stats needs --input or --gen");
  out << dataset_stats(read_dataset(a.input)).dump() << '\n';
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> bins;
  std::size_t points = 16;
  std::size_t iters = 1000;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.bins.empty()) throw ConfigError("--bins needs at least one window size");
  const std::size_t smallest = *std::min_element(a.bins.begin(), a.bins.end());
  if (smallest < 2) throw ConfigError("window sizes must be >= 2");

  // Same point ranges for every W, all inside the smallest window.
  Rng rng(a.seed);
  const double res = ProfileConfig{}.range_resolution;
  Frame f0, f1;
  for (std::size_t i = 0; i < a.points; ++i) {
    const double r0 = rng.uniform(0.0, static_cast<double>(smallest - 1)) * res;
    const double r1 = rng.uniform(0.0, static_cast<double>(smallest - 1)) * res;
    f0.points.push_back({0.0, r0, 0.0, std::nullopt});
    f1.points.push_back({0.0, r1, 0.0, std::nullopt});
  }

  ordered_json j;
  j["bins"] = a.bins;
  j["points"] = a.points;
  j["iters"] = a.iters;
  j["repeats"] = a.repeats;
  std::vector<RangeProfile> p0, p1;
  for (std::size_t w : a.bins) {
    ProfileConfig cfg;
    cfg.window_size = w;
    p0.push_back(build_profile(f0, cfg, 0));
    p1.push_back(build_profile(f1, cfg, 1));
  }
  // Window sizes take turns inside each repeat so that drift in machine
  // speed hits all of them alike.
  std::vector<std::vector<double>> samples(a.bins.size());
  std::size_t sink = 0;
  for (std::size_t r = 0; r < a.repeats; ++r) {
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t it = 0; it < a.iters; ++it)
        sink += find_intersections(p0[k], p1[k], 1e-6).size();
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      samples[k].push_back(dt.count() / static_cast<double>(a.iters));
    }
  }
  std::vector<double> means;
  for (auto& s : samples) {
    std::sort(s.begin(), s.end());
    means.push_back(s[s.size() / 2]);
  }
  std::vector<double> ratios;
  for (std::size_t i = 1; i < means.size(); ++i) ratios.push_back(means[i] / means[i - 1]);
  j["mean_seconds"] = means;
  j["ratios"] = ratios;
  j["crossings_checksum"] = sink;
  out << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixing-based augmentation for wireless point-cloud datasets", "wixup"};
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment_cmd = app.add_subcommand("augment", "Augment a JSONL dataset");
  augment_cmd->add_option("--input", aug.input, "Input JSONL dataset")->required();
  augment_cmd->add_option("--output", aug.output, "Output JSONL dataset")->required();
  augment_cmd->add_option("--config", aug.config, "Flat key = value config file");
  aug.threads_opt = augment_cmd->add_option("--threads", aug.threads, "Worker threads (0 = all)");
  aug.overrides.add(augment_cmd, "--method", "method", "wixup|cga|stack|wixup+");
  aug.overrides.add(augment_cmd, "--scale", "scale", "Mix distances 1..scale");
  aug.overrides.add(augment_cmd, "--seed", "seed", "Random seed");

  SelftrainArgs st;
  auto* selftrain_cmd = app.add_subcommand("selftrain", "Self-training domain adaptation");
  selftrain_cmd->add_option("--source", st.source, "Labeled source dataset")->required();
  selftrain_cmd->add_option("--target", st.target, "Target dataset")->required();
  selftrain_cmd->add_option("--config", st.config, "Flat key = value config file");
  selftrain_cmd->add_option("--output", st.output, "Also write the report here");
  st.threads_opt = selftrain_cmd->add_option("--threads", st.threads, "Worker threads (0 = all)");
  st.overrides.add(selftrain_cmd, "--seed", "seed", "Random seed");
  st.overrides.add(selftrain_cmd, "--pairing", "pairing", "random|cyclic");
  st.overrides.add(selftrain_cmd, "--target-train-fraction", "target_train_fraction",
                   "Share of target frames used for self-training");

  StatsArgs sa;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize or generate a dataset");
  auto* stats_input = stats_cmd->add_option("--input", sa.input, "Dataset to summarize");
  auto* stats_gen = stats_cmd->add_option("--gen", sa.gen, "Synthetic generator config");
  stats_input->excludes(stats_gen);
  stats_cmd->add_option("--output", sa.output, "Where --gen writes the dataset");
  sa.seed_opt = stats_cmd->add_option("--seed", sa.seed, "Generator seed");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Time intersection detection per window size");
  bench_cmd->add_option("--bins", ba.bins, "Comma-separated window sizes")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--points", ba.points, "Points per frame");
  bench_cmd->add_option("--iters", ba.iters, "Calls per timing sample")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  bench_cmd->add_option("--repeats", ba.repeats, "Timing samples; the median is reported")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
  bench_cmd->add_option("--seed", ba.seed, "Seed for point placement");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == augment_cmd) return cmd_augment(aug, out);
    if (active == selftrain_cmd) return cmd_selftrain(st, out);
    if (active == stats_cmd) return cmd_stats(sa, out);
    return cmd_bench(ba, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace wixup::cli
