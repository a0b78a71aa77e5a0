#ifndef NERSYNTH_PROJECT_HPP
#define NERSYNTH_PROJECT_HPP

#include <string>
#include <vector>

#include "nersynth/align.hpp"
#include "nersynth/corpus.hpp"

namespace nersynth {

struct FilterParams {
  double threshold = 1.8;
};

enum class DropReason {
  NoAlignedTokens,
  ProjectionCollision,
};

const char* to_string(DropReason r);

struct DroppedSpan {
  Span source_span;
  DropReason reason;
};

struct ProjectionResult {
  AnnotatedText target;
  std::vector<DroppedSpan> dropped_spans;
  double filter_score = 0.0;
  bool kept = true;
};

// Average normalized distance of nonzero entries to the corner-to-corner
// diagonal, divided by the longer sentence length. A 1x1 matrix scores 0.
double filter_score(const AlignmentMatrix& A);

// Keep while the score does not exceed the threshold (strict inequality
// discards).
bool apply_filter(const AlignmentMatrix& A, const FilterParams& params);

ProjectionResult project_spans(const ParallelPair& pair,
                               const AlignmentMatrix& A);

}  // namespace nersynth

#endif
