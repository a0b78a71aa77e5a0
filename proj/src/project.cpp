#include "nersynth/project.hpp"

#include <algorithm>
#include <cmath>

namespace nersynth {

const char* to_string(DropReason r) {
  switch (r) {
    case DropReason::NoAlignedTokens: return "NoAlignedTokens";
    case DropReason::ProjectionCollision: return "ProjectionCollision";
  }
  return "?";
}

double filter_score(const AlignmentMatrix& A) {
  const std::size_t w_de = A.n_target, w_en = A.n_source;
  if (w_de < 1 || w_en < 1)
    throw DimensionMismatch("filter_score: empty matrix");
  if (A.cells.size() != w_de * w_en)
    throw DimensionMismatch("filter_score: cell count disagrees with dims");
  if (w_de == 1 && w_en == 1) return 0.0;  // single cell sits on the diagonal

  const double en = static_cast<double>(w_en), de = static_cast<double>(w_de);
  const double denom = std::sqrt((en - 1.0) * (en - 1.0) + (de - 1.0) * (de - 1.0));
  double sum = 0.0;
  for (std::size_t i = 1; i <= w_de; ++i) {
    for (std::size_t j = 1; j <= w_en; ++j) {
      if (!A.at(i - 1, j - 1)) continue;
      const double di = static_cast<double>(i), dj = static_cast<double>(j);
      sum += std::abs(en - di * en + di - de + dj * de - dj) / denom;
    }
  }
  return sum / std::max(en, de);
}

bool apply_filter(const AlignmentMatrix& A, const FilterParams& params) {
  return filter_score(A) <= params.threshold;
}

ProjectionResult project_spans(const ParallelPair& pair,
                               const AlignmentMatrix& A) {
  std::vector<TokenSpan> src_tokens = tokenize(pair.source.text);
  std::vector<TokenSpan> tgt_tokens = tokenize(pair.target.text);
  if (src_tokens.size() != A.n_source || tgt_tokens.size() != A.n_target)
    throw DimensionMismatch("project_spans: matrix dims do not match pair " +
                            pair.pair_id);

  ProjectionResult result;
  result.target.text = pair.target.text;
  result.target.doc_id = pair.target.doc_id.empty() ? pair.source.doc_id
                                                    : pair.target.doc_id;
  result.target.sent_id = pair.source.sent_id;
  result.filter_score = filter_score(A);

  struct Candidate {
    Span projected;
    Span source;
  };
  std::vector<Candidate> candidates;
  for (const Span& s : pair.source.spans) {
    std::vector<std::size_t> covered =
        char_span_to_token_indices(pair.source, s);
    std::size_t lo = A.n_target, hi = 0;
    bool any = false;
    for (std::size_t i = 0; i < A.n_target; ++i)
      for (std::size_t j : covered)
        if (A.at(i, j)) {
          lo = std::min(lo, i);
          hi = std::max(hi, i);
          any = true;
        }
    if (!any) {
      result.dropped_spans.push_back({s, DropReason::NoAlignedTokens});
      continue;
    }
    // Contiguous closure over the aligned target tokens, char offsets
    // recomputed from the target tokenization.
    Span proj{tgt_tokens[lo].start, tgt_tokens[hi].end, s.label};
    candidates.push_back({proj, s});
  }

  // Source spans arrive sorted by start; earlier source span wins collisions.
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    bool collides = false;
    for (const Candidate& k : kept)
      if (c.projected.start < k.projected.end &&
          k.projected.start < c.projected.end) {
        collides = true;
        break;
      }
    if (collides)
      result.dropped_spans.push_back({c.source, DropReason::ProjectionCollision});
    else
      kept.push_back(c);
  }
  for (const Candidate& c : kept) result.target.spans.push_back(c.projected);
  std::sort(result.target.spans.begin(), result.target.spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  result.target.validate();
  return result;
}

}  // namespace nersynth
