#include "cli_config.hpp"

#include <charconv>
#include <fstream>

#include "wixup/error.hpp"

namespace wixup::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Settings::Settings(std::vector<Entry> defaults) : entries_(std::move(defaults)) {}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
}

void Settings::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = value;
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

const std::string& Settings::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return e.value;
  throw ConfigError("unknown config key '" + key + "'");
}

double Settings::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_number(get(key), v)) throw ConfigError(key + " must be a number");
  return v;
}

std::uint64_t Settings::get_u64(const std::string& key) const {
  const auto& text = get(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(key + " must be a non-negative integer");
  return v;
}

bool Settings::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + " must be true or false");
}

nlohmann::ordered_json Settings::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& e : entries_) {
    double v = 0.0;
    long long i = 0;
    const char* end = e.value.data() + e.value.size();
    if (auto [ptr, ec] = std::from_chars(e.value.data(), end, i); ec == std::errc{} && ptr == end)
      j[e.key] = i;
    else if (parse_number(e.value, v))
      j[e.key] = v;
    else
      j[e.key] = e.value;
  }
  return j;
}

Settings pipeline_settings() {
  return Settings({
      {"method", "wixup"},
      {"scale", "1"},
      {"seed", "0"},
      {"window_size", "512"},
      {"range_resolution", "0.0375"},
      {"sigma", "1"},
      {"jitter_sigma", "0.25"},
      {"epsilon_height", "1e-06"},
      {"n_out", "auto"},
      {"cga_low", "0.8"},
      {"cga_high", "1.2"},
      {"stack_k", "5"},
      {"stack_target_count", "8"},
      {"cross_sequence", "false"},
      {"pairing", "random"},
      {"target_train_fraction", "0.5"},
      {"fine_tune_rounds", "1"},
      {"knn_k", "5"},
  });
}

Settings synth_settings() {
  return Settings({
      {"sequences", "2"},
      {"frames_per_sequence", "50"},
      {"frame_rate", "10"},
      {"label", "keypoints"},
      {"joints", "19"},
      {"classes", "3"},
      {"dims", "3"},
      {"noise", "0.02"},
      {"dropout", "0.4"},
      {"shift_x", "0"},
      {"shift_y", "0"},
      {"shift_z", "0"},
      {"center_spread", "0.5"},
      {"distance", "2.5"},
      {"seq_prefix", "s"},
      {"template_seed", "0"},
  });
}

namespace {

MixConfig mix_config(const Settings& s) {
  MixConfig mix;
  mix.profile.window_size = s.get_u64("window_size");
  mix.profile.range_resolution = s.get_double("range_resolution");
  mix.profile.sigma = s.get_double("sigma");
  mix.jitter_sigma = s.get_double("jitter_sigma");
  mix.epsilon_height = s.get_double("epsilon_height");
  if (s.get("n_out") != "auto") mix.n_out = s.get_u64("n_out");
  mix.validate();
  return mix;
}

}  // namespace

AugmentConfig augment_config(const Settings& s) {
  AugmentConfig cfg;
  cfg.method = parse_method(s.get("method"));
  cfg.scale = s.get_u64("scale");
  cfg.seed = s.get_u64("seed");
  cfg.mix = mix_config(s);
  cfg.cga_low = s.get_double("cga_low");
  cfg.cga_high = s.get_double("cga_high");
  cfg.stack_k = s.get_u64("stack_k");
  cfg.stack_target_count = s.get_u64("stack_target_count");
  cfg.cross_sequence = s.get_bool("cross_sequence");
  cfg.validate();
  return cfg;
}

UdaConfig uda_config(const Settings& s) {
  UdaConfig cfg;
  cfg.target_train_fraction = s.get_double("target_train_fraction");
  cfg.pairing = parse_pairing(s.get("pairing"));
  cfg.mix = mix_config(s);
  cfg.seed = s.get_u64("seed");
  cfg.fine_tune_rounds = s.get_u64("fine_tune_rounds");
  cfg.validate();
  return cfg;
}

SynthConfig synth_config(const Settings& s) {
  SynthConfig cfg;
  cfg.sequences = s.get_u64("sequences");
  cfg.frames_per_sequence = s.get_u64("frames_per_sequence");
  cfg.frame_rate = s.get_double("frame_rate");
  const auto& label = s.get("label");
  if (label == "keypoints")
    cfg.label = LabelKind::Keypoints;
  else if (label == "class")
    cfg.label = LabelKind::ClassProbs;
  else
    throw ConfigError("label must be keypoints or class");
  cfg.joints = s.get_u64("joints");
  cfg.classes = s.get_u64("classes");
  cfg.dims = static_cast<int>(s.get_u64("dims"));
  cfg.noise = s.get_double("noise");
  cfg.dropout = s.get_double("dropout");
  cfg.shift = {s.get_double("shift_x"), s.get_double("shift_y"), s.get_double("shift_z")};
  cfg.center_spread = s.get_double("center_spread");
  cfg.distance = s.get_double("distance");
  cfg.seq_prefix = s.get("seq_prefix");
  cfg.template_seed = s.get_u64("template_seed");
  return cfg;
}

}  // namespace wixup::cli
