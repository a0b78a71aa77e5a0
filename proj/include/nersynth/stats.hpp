#ifndef NERSYNTH_STATS_HPP
#define NERSYNTH_STATS_HPP

#include <map>
#include <string>
#include <vector>

#include "nersynth/corpus.hpp"

namespace nersynth {

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
  std::map<std::string, std::size_t> label_counts;  // spans, not tokens
  double mean_annotations_per_sentence = 0.0;

  std::size_t total_annotations() const;
};

CorpusStats compute_stats(const std::vector<AnnotatedText>& corpus);

std::string format_stats(const CorpusStats& s, bool tsv);

// Removes spans carrying any of the given labels, then drops sentences left
// without annotations.
std::vector<AnnotatedText> exclude_labels(
    const std::vector<AnnotatedText>& corpus,
    const std::vector<std::string>& labels);

}  // namespace nersynth

#endif
