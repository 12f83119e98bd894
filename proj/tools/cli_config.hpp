#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wixup/augment.hpp"
#include "wixup/self_training.hpp"
#include "wixup/synthetic.hpp"

namespace wixup::cli {

/// Flat `key = value` settings with a fixed key set. Lines starting with '#'
/// are comments. Unknown keys and malformed lines raise ConfigError.
class Settings {
 public:
  struct Entry {
    std::string key;
    std::string value;
  };

  explicit Settings(std::vector<Entry> defaults);

  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Every key in declaration order; numeric values as JSON numbers.
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<Entry> entries_;
};

/// Keys for augment and selftrain: profile, mixing, baselines, UDA, k-NN.
Settings pipeline_settings();
/// Keys of the synthetic generator used by `stats --gen`.
Settings synth_settings();

AugmentConfig augment_config(const Settings& s);
UdaConfig uda_config(const Settings& s);
SynthConfig synth_config(const Settings& s);

}  // namespace wixup::cli
