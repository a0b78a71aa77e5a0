#ifndef NERSYNTH_INFILL_HPP
#define NERSYNTH_INFILL_HPP

#include <cstdint>
#include <map>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "nersynth/corpus.hpp"

namespace nersynth {

enum class MaskCategory {
  FirstName,
  LastName,
  FullName,
  Date,
  Year,
  Phone,
  IdNumber,
  Hospital,
  Age,
  Other,
};

const char* to_string(MaskCategory c);
MaskCategory mask_category_from_string(const std::string& s);

struct MaskPattern {
  std::string regex_text;
  MaskCategory category = MaskCategory::Other;
  std::regex compiled;

  MaskPattern() = default;
  MaskPattern(std::string re, MaskCategory cat);
};

// Clinical-deidentification-style [** ... **] masks.
std::vector<MaskPattern> default_mask_patterns();

// Pattern config file: one "Category = regex" per line, '#' comments.
std::vector<MaskPattern> load_mask_patterns(const std::string& path);

struct SurrogatePool {
  // List-backed categories; numeric/date categories are generator-backed.
  std::map<MaskCategory, std::vector<std::string>> lists;
  std::vector<std::string> date_formats = {"DD.MM.YYYY", "YYYY-MM-DD",
                                           "MM/DD/YYYY"};
  std::string phone_format = "0ddd ddddddd";  // 'd' digits, rest literal

  static SurrogatePool builtin_german();
  void load_list(MaskCategory cat, const std::string& path);
};

struct MaskRegion {
  std::size_t start = 0;  // codepoint offsets
  std::size_t end = 0;
  MaskCategory category = MaskCategory::Other;
};

struct InfillRecord {
  std::string doc_id;
  MaskCategory category;
  std::size_t original_start = 0;
  std::size_t original_end = 0;
  std::size_t replacement_length = 0;
};

struct InfillReport {
  std::map<MaskCategory, std::size_t> counts;
  std::vector<InfillRecord> records;
};

// Non-overlapping mask regions ordered by start. Throws
// MaskOverlapsAnnotation when a region intersects an entity span.
std::vector<MaskRegion> detect_masks(const AnnotatedText& doc,
                                     const std::vector<MaskPattern>& patterns);

std::string sample_replacement(MaskCategory category, std::mt19937_64& rng,
                               const SurrogatePool& pool);

// Per-document RNG stream derived from (seed, doc_id) so that documents can
// be processed in any order with identical results.
std::mt19937_64 document_rng(std::uint64_t seed, const std::string& doc_id);

std::pair<AnnotatedText, InfillReport> infill_document(
    const AnnotatedText& doc, const std::vector<MaskPattern>& patterns,
    const SurrogatePool& pool, std::uint64_t seed);

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0);

}  // namespace nersynth

#endif
