#ifndef NERSYNTH_SEGMENT_HPP
#define NERSYNTH_SEGMENT_HPP

#include <set>
#include <string>
#include <vector>

#include "nersynth/corpus.hpp"

namespace nersynth {

struct SplitConfig {
  // Entries suppress a boundary after the matching token ("Dr.", "z.B.").
  std::vector<std::string> abbreviations;
  std::set<char32_t> terminators = {U'.', U'!', U'?'};

  static SplitConfig builtin_german();
  static SplitConfig load(const std::string& abbreviation_file);
};

// Rule-based splitting: terminator followed by whitespace ends a sentence,
// unless suppressed by an abbreviation, a digit.digit context, or a boundary
// falling strictly inside an annotation span. A blank line always splits.
// Output spans are rebased to sentence-local offsets; sent_id runs from 0.
std::vector<AnnotatedText> split_sentences(const AnnotatedText& doc,
                                           const SplitConfig& cfg);

std::vector<AnnotatedText> drop_unannotated(
    const std::vector<AnnotatedText>& sentences);

}  // namespace nersynth

#endif
