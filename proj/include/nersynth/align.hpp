#ifndef NERSYNTH_ALIGN_HPP
#define NERSYNTH_ALIGN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "nersynth/corpus.hpp"

namespace nersynth {

struct ParallelPair {
  AnnotatedText source;  // annotated (English in the original setting)
  AnnotatedText target;  // raw translation (German); spans usually empty
  std::string pair_id;
};

// t(f|e) with a diagonal position prior. Source id 0 is the null word.
struct TranslationTable {
  std::unordered_map<std::string, std::uint32_t> source_ids;  // word -> id, null excluded
  std::unordered_map<std::string, std::uint32_t> target_ids;
  // probs[e] maps target id -> t(f|e); e = 0 is null. std::map keeps
  // iteration deterministic.
  std::vector<std::map<std::uint32_t, double>> probs;
  double tension = 4.0;
  double p_null = 0.08;

  static constexpr std::uint32_t kNull = 0;

  std::uint32_t source_id(const std::string& w) const;  // kNull when unseen
  double prob(std::uint32_t e, std::uint32_t f) const;
};

// Boolean matrix, rows = target tokens, cols = source tokens. Under
// asymmetric decoding each row holds at most one link.
struct AlignmentMatrix {
  std::size_t n_target = 0;
  std::size_t n_source = 0;
  std::vector<std::uint8_t> cells;  // row-major, n_target * n_source

  AlignmentMatrix() = default;
  AlignmentMatrix(std::size_t rows, std::size_t cols)
      : n_target(rows), n_source(cols), cells(rows * cols, 0) {}

  bool at(std::size_t i, std::size_t j) const {
    return cells[i * n_source + j] != 0;
  }
  void set(std::size_t i, std::size_t j, bool v = true) {
    cells[i * n_source + j] = v ? 1 : 0;
  }
  std::size_t link_count() const;

  // Pharaoh: space-separated "j-i" pairs, source index - target index.
  std::string to_pharaoh() const;
  std::string to_jsonl_line(const std::string& pair_id) const;
  static std::pair<std::string, AlignmentMatrix> from_jsonl_line(
      const std::string& line, std::size_t lineno);
};

struct EmTrainResult {
  TranslationTable table;
  std::vector<double> log_likelihood;  // one entry per iteration
  std::vector<std::string> skipped_pairs;  // degenerate pairs, by id
};

EmTrainResult em_train(const std::vector<ParallelPair>& pairs, int iterations,
                       double tension = 4.0, double p_null = 0.08);

AlignmentMatrix decode(const ParallelPair& pair, const TranslationTable& table);

// Pair files: either one JSONL with {"src":…, "tgt":…} objects, or two
// parallel files with equal line counts.
std::vector<ParallelPair> make_pairs(const std::vector<AnnotatedText>& source,
                                     const std::vector<std::string>& target_lines);

}  // namespace nersynth

#endif
