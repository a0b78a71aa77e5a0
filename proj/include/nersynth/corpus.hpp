#ifndef NERSYNTH_CORPUS_HPP
#define NERSYNTH_CORPUS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nersynth/errors.hpp"

namespace nersynth {

// The default tag inventory. Reason and ADE exist in the source scheme but
// are excluded by default; see LabelSet.
struct LabelSet {
  std::vector<std::string> labels = {"Drug",     "Route",    "Strength",
                                     "Frequency", "Duration", "Form",
                                     "Dosage"};

  bool contains(const std::string& name) const;
  int index_of(const std::string& name) const;  // -1 when absent
  std::size_t size() const { return labels.size(); }
};

// Character offsets count unicode scalar values, not bytes.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  bool operator==(const Span&) const = default;
};

struct AnnotatedText {
  std::string text;  // UTF-8
  std::vector<Span> spans;  // sorted by start, non-overlapping
  std::string doc_id;
  std::optional<int> sent_id;

  bool operator==(const AnnotatedText&) const = default;

  // Throws OffsetError / SpanOutOfBounds on invariant violations.
  void validate() const;

  // Substring covered by a span, in codepoint coordinates.
  std::string surface(const Span& s) const;
};

struct TokenSpan {
  std::size_t token_index = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;

  bool operator==(const TokenSpan&) const = default;
};

// Whitespace tokenization with punctuation kept attached.
std::vector<TokenSpan> tokenize(const std::string& text);
std::vector<TokenSpan> tokenize(const std::u32string& text);

// All tokens overlapping the span; the result is a contiguous non-empty run.
// Throws SpanOutOfBounds / EmptyCover.
std::vector<std::size_t> char_span_to_token_indices(const AnnotatedText& doc,
                                                    const Span& span);

// JSONL, one document per line:
// {"doc_id": str, "sent_id": int|null, "text": str, "spans": [...]}
std::vector<AnnotatedText> read_jsonl(const std::string& path);
std::vector<AnnotatedText> read_jsonl_stream(std::istream& in);
void write_jsonl(const std::string& path,
                 const std::vector<AnnotatedText>& docs);
std::string to_jsonl_line(const AnnotatedText& doc);
AnnotatedText from_jsonl_line(const std::string& line, std::size_t lineno);

}  // namespace nersynth

#endif
