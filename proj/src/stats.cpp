#include "nersynth/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace nersynth {

std::size_t CorpusStats::total_annotations() const {
  std::size_t n = 0;
  for (const auto& [_, c] : label_counts) n += c;
  return n;
}

CorpusStats compute_stats(const std::vector<AnnotatedText>& corpus) {
  CorpusStats s;
  s.sentence_count = corpus.size();
  for (const AnnotatedText& doc : corpus) {
    s.token_count += tokenize(doc.text).size();
    for (const Span& sp : doc.spans) s.label_counts[sp.label] += 1;
  }
  s.mean_annotations_per_sentence =
      s.sentence_count == 0
          ? 0.0
          : static_cast<double>(s.total_annotations()) /
                static_cast<double>(s.sentence_count);
  return s;
}

std::string format_stats(const CorpusStats& s, bool tsv) {
  std::ostringstream os;
  if (tsv) {
    os << "metric\tvalue\n";
    os << "sentences\t" << s.sentence_count << "\n";
    os << "tokens\t" << s.token_count << "\n";
    os << "annotations\t" << s.total_annotations() << "\n";
    for (const auto& [label, c] : s.label_counts)
      os << "label:" << label << "\t" << c << "\n";
  } else {
    os << "sentences:   " << s.sentence_count << "\n";
    os << "tokens:      " << s.token_count << "\n";
    os << "annotations: " << s.total_annotations() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", s.mean_annotations_per_sentence);
    os << "mean annotations per sentence: " << buf << "\n";
    for (const auto& [label, c] : s.label_counts)
      os << "  " << label << ": " << c << "\n";
  }
  return os.str();
}

std::vector<AnnotatedText> exclude_labels(
    const std::vector<AnnotatedText>& corpus,
    const std::vector<std::string>& labels) {
  std::vector<AnnotatedText> filtered;
  filtered.reserve(corpus.size());
  for (const AnnotatedText& doc : corpus) {
    AnnotatedText d = doc;
    d.spans.erase(std::remove_if(d.spans.begin(), d.spans.end(),
                                 [&](const Span& s) {
                                   return std::find(labels.begin(), labels.end(),
                                                    s.label) != labels.end();
                                 }),
                  d.spans.end());
    // Only sentences emptied by the exclusion are dropped; sentences that
    // had no annotations to begin with pass through unchanged.
    if (!d.spans.empty() || doc.spans.empty()) filtered.push_back(std::move(d));
  }
  return filtered;
}

}  // namespace nersynth
