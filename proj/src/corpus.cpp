#include "nersynth/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nersynth/utf8.hpp"

namespace nersynth {

using json = nlohmann::ordered_json;

bool LabelSet::contains(const std::string& name) const {
  return index_of(name) >= 0;
}

int LabelSet::index_of(const std::string& name) const {
  auto it = std::find(labels.begin(), labels.end(), name);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

void AnnotatedText::validate() const {
  const std::size_t n = utf8::length(text);
  std::size_t prev_end = 0;
  bool first = true;
  for (const Span& s : spans) {
    if (s.start >= s.end)
      throw OffsetError("span start " + std::to_string(s.start) +
                        " >= end " + std::to_string(s.end) + " in doc " +
                        doc_id);
    if (s.end > n)
      throw SpanOutOfBounds("span end " + std::to_string(s.end) +
                            " > text length " + std::to_string(n) +
                            " in doc " + doc_id);
    if (!first && s.start < prev_end)
      throw OffsetError("overlapping or unsorted spans in doc " + doc_id);
    prev_end = s.end;
    first = false;
  }
}

std::string AnnotatedText::surface(const Span& s) const {
  return utf8::substr(text, s.start, s.end);
}

std::vector<TokenSpan> tokenize(const std::string& text) {
  return tokenize(utf8::decode(text));
}

std::vector<TokenSpan> tokenize(const std::u32string& text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && utf8::is_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !utf8::is_space(text[i])) ++i;
    TokenSpan t;
    t.token_index = out.size();
    t.start = start;
    t.end = i;
    t.surface = utf8::encode(std::u32string_view(text).substr(start, i - start));
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::size_t> char_span_to_token_indices(const AnnotatedText& doc,
                                                    const Span& span) {
  const std::size_t n = utf8::length(doc.text);
  if (span.end > n || span.start >= span.end)
    throw SpanOutOfBounds("span (" + std::to_string(span.start) + "," +
                          std::to_string(span.end) + ") out of bounds for doc " +
                          doc.doc_id);
  std::vector<std::size_t> hits;
  for (const TokenSpan& t : tokenize(doc.text)) {
    if (t.start < span.end && span.start < t.end) hits.push_back(t.token_index);
  }
  if (hits.empty())
    throw EmptyCover("span (" + std::to_string(span.start) + "," +
                     std::to_string(span.end) + ") covers no token in doc " +
                     doc.doc_id);
  return hits;
}

std::string to_jsonl_line(const AnnotatedText& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  if (doc.sent_id)
    j["sent_id"] = *doc.sent_id;
  else
    j["sent_id"] = nullptr;
  j["text"] = doc.text;
  json spans = json::array();
  for (const Span& s : doc.spans) {
    json sp;
    sp["start"] = s.start;
    sp["end"] = s.end;
    sp["label"] = s.label;
    spans.push_back(std::move(sp));
  }
  j["spans"] = std::move(spans);
  return j.dump();
}

AnnotatedText from_jsonl_line(const std::string& line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(lineno, e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
  if (!j.contains("text") || !j["text"].is_string())
    throw ParseError(lineno, "missing or non-string \"text\" field");
  AnnotatedText doc;
  doc.text = j["text"].get<std::string>();
  doc.doc_id = j.value("doc_id", std::string{});
  if (j.contains("sent_id") && !j["sent_id"].is_null())
    doc.sent_id = j["sent_id"].get<int>();
  if (j.contains("spans")) {
    if (!j["spans"].is_array()) throw ParseError(lineno, "\"spans\" must be an array");
    for (const auto& sp : j["spans"]) {
      if (!sp.contains("start") || !sp.contains("end") || !sp.contains("label"))
        throw ParseError(lineno, "span missing start/end/label");
      Span s;
      s.start = sp["start"].get<std::size_t>();
      s.end = sp["end"].get<std::size_t>();
      s.label = sp["label"].get<std::string>();
      doc.spans.push_back(std::move(s));
    }
  }
  // Ingest trims whitespace off span edges, adjusting offsets.
  const std::u32string u = utf8::decode(doc.text);
  for (Span& s : doc.spans) {
    if (s.end > u.size())
      throw OffsetError("span end " + std::to_string(s.end) +
                        " > text length (line " + std::to_string(lineno) + ")");
    while (s.start < s.end && utf8::is_space(u[s.start])) ++s.start;
    while (s.end > s.start && utf8::is_space(u[s.end - 1])) --s.end;
    if (s.start >= s.end)
      throw OffsetError("whitespace-only span at line " +
                        std::to_string(lineno));
  }
  std::sort(doc.spans.begin(), doc.spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  doc.validate();
  return doc;
}

std::vector<AnnotatedText> read_jsonl_stream(std::istream& in) {
  std::vector<AnnotatedText> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    docs.push_back(from_jsonl_line(line, lineno));
  }
  return docs;
}

std::vector<AnnotatedText> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_jsonl_stream(in);
}

void write_jsonl(const std::string& path,
                 const std::vector<AnnotatedText>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const AnnotatedText& d : docs) out << to_jsonl_line(d) << '\n';
}

}  // namespace nersynth
