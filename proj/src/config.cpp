#include "nersynth/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace nersynth {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

}  // namespace

FlatConfig FlatConfig::parse_string(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool FlatConfig::has(const std::string& key) const {
  for (const auto& [k, _] : entries)
    if (k == key) return true;
  return false;
}

std::string FlatConfig::get(const std::string& key,
                            const std::string& fallback) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  return fallback;
}

std::string FlatConfig::require(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw ConfigError("missing required config key: " + key);
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stod(get(key, ""));
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number");
  }
}

std::int64_t FlatConfig::get_int(const std::string& key,
                                 std::int64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stoll(get(key, ""));
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not an integer");
  }
}

std::vector<std::string> FlatConfig::get_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> out;
  std::istringstream in(get(key, ""));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void FlatConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries)
    if (k == key) {
      v = value;
      return;
    }
  entries.emplace_back(key, value);
}

std::string FlatConfig::dump() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
  return os.str();
}

PipelineConfig PipelineConfig::from_flat(const FlatConfig& cfg) {
  PipelineConfig pc;
  pc.raw = cfg;
  pc.input_path = cfg.get("input", "");
  pc.output_dir = cfg.get("output_dir", "out");
  if (cfg.has("translations")) pc.translations_path = cfg.get("translations", "");
  if (cfg.has("masks.patterns")) pc.mask_patterns_path = cfg.get("masks.patterns", "");
  for (const auto& [k, v] : cfg.entries)
    if (k.rfind("pools.", 0) == 0) pc.pool_paths[k.substr(6)] = v;
  if (cfg.has("split.abbreviations"))
    pc.abbreviations_path = cfg.get("split.abbreviations", "");
  pc.align_iterations = static_cast<int>(cfg.get_int("align.iterations", 5));
  pc.align_tension = cfg.get_double("align.tension", 4.0);
  pc.align_p_null = cfg.get_double("align.p_null", 0.08);
  pc.filter_threshold = cfg.get_double("filter.threshold", 1.8);
  pc.labels = cfg.get_list("labels", pc.labels);
  pc.exclude = cfg.get_list("exclude_labels", pc.exclude);
  pc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
  return pc;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  return from_flat(FlatConfig::parse_file(path));
}

void PipelineConfig::validate() const {
  namespace fs = std::filesystem;
  auto check_file = [](const std::string& what, const std::string& path) {
    if (!fs::exists(path))
      throw ConfigError(what + " does not exist: " + path);
  };
  if (input_path.empty()) throw ConfigError("config key \"input\" is required");
  check_file("input corpus", input_path);
  if (translations_path) check_file("translations file", *translations_path);
  if (mask_patterns_path) check_file("mask pattern file", *mask_patterns_path);
  for (const auto& [cat, path] : pool_paths)
    check_file("surrogate pool (" + cat + ")", path);
  if (abbreviations_path) check_file("abbreviation file", *abbreviations_path);
  if (filter_threshold <= 0.0)
    throw ConfigError("filter.threshold must be positive");
  if (align_iterations < 1) throw ConfigError("align.iterations must be >= 1");
  if (align_tension <= 0.0) throw ConfigError("align.tension must be positive");
  if (align_p_null < 0.0 || align_p_null >= 1.0)
    throw ConfigError("align.p_null must be in [0, 1)");
}

}  // namespace nersynth
