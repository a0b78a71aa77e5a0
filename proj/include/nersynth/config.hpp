#ifndef NERSYNTH_CONFIG_HPP
#define NERSYNTH_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nersynth/errors.hpp"

namespace nersynth {

// Flat "key = value" config file; '#' starts a comment, values may be
// quoted. Dotted keys group related settings.
struct FlatConfig {
  std::vector<std::pair<std::string, std::string>> entries;  // file order

  static FlatConfig parse_file(const std::string& path);
  static FlatConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  void set(const std::string& key, const std::string& value);
  std::string dump() const;
};

struct PipelineConfig {
  std::string input_path;
  std::string output_dir;
  std::optional<std::string> translations_path;

  std::optional<std::string> mask_patterns_path;
  std::map<std::string, std::string> pool_paths;  // category name -> file
  std::optional<std::string> abbreviations_path;

  int align_iterations = 5;
  double align_tension = 4.0;
  double align_p_null = 0.08;
  double filter_threshold = 1.8;

  std::vector<std::string> labels = {"Drug",      "Route", "Strength",
                                     "Frequency", "Duration", "Form",
                                     "Dosage"};
  std::vector<std::string> exclude = {"Reason", "ADE"};

  std::uint64_t seed = 42;

  FlatConfig raw;

  static PipelineConfig from_flat(const FlatConfig& cfg);
  static PipelineConfig from_file(const std::string& path);

  // Checks referenced files exist and parameters are sane. Throws
  // ConfigError.
  void validate() const;
};

// Default config path env var, consulted when --config is not given.
inline constexpr const char* kConfigEnvVar = "NERSYNTH_CONFIG";

}  // namespace nersynth

#endif
