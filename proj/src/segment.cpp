#include "nersynth/segment.hpp"

#include <algorithm>
#include <fstream>

#include "nersynth/utf8.hpp"

namespace nersynth {

SplitConfig SplitConfig::builtin_german() {
  SplitConfig cfg;
  cfg.abbreviations = {"Dr.",  "Prof.", "Hr.",   "Fr.",   "z.B.", "bzw.",
                       "ca.",  "u.a.",  "evtl.", "tgl.",  "Tbl.", "inkl.",
                       "St.",  "Nr.",   "bspw.", "ggf.",  "mind.", "max."};
  return cfg;
}

SplitConfig SplitConfig::load(const std::string& abbreviation_file) {
  SplitConfig cfg;
  std::ifstream in(abbreviation_file);
  if (!in) throw ConfigError("cannot open abbreviation file " + abbreviation_file);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.back() != '.')
      throw ConfigError("abbreviation entries must end with '.': " + line);
    cfg.abbreviations.push_back(line);
  }
  return cfg;
}

namespace {

bool strictly_inside_any_span(const std::vector<Span>& spans, std::size_t pos) {
  for (const Span& s : spans)
    if (s.start < pos && pos < s.end) return true;
  return false;
}

// Maximal non-space run ending at (and including) position p.
std::u32string token_ending_at(const std::u32string& u, std::size_t p) {
  std::size_t start = p;
  while (start > 0 && !utf8::is_space(u[start - 1])) --start;
  return u.substr(start, p - start + 1);
}

}  // namespace

std::vector<AnnotatedText> split_sentences(const AnnotatedText& doc,
                                           const SplitConfig& cfg) {
  const std::u32string u = utf8::decode(doc.text);
  std::vector<std::u32string> abbrevs;
  abbrevs.reserve(cfg.abbreviations.size());
  for (const std::string& a : cfg.abbreviations)
    abbrevs.push_back(utf8::decode(a));

  std::vector<std::size_t> boundaries;
  for (std::size_t p = 0; p < u.size(); ++p) {
    char32_t c = u[p];
    bool candidate = false;
    if (cfg.terminators.count(c) &&
        (p + 1 == u.size() || utf8::is_space(u[p + 1]))) {
      candidate = true;
      if (c == U'.') {
        if (p > 0 && utf8::is_digit(u[p - 1]) && p + 1 < u.size() &&
            utf8::is_digit(u[p + 1]))
          candidate = false;  // digit.digit never terminates
        if (candidate) {
          std::u32string tok = token_ending_at(u, p);
          for (const auto& a : abbrevs)
            if (tok == a) {
              candidate = false;
              break;
            }
        }
      }
    } else if (c == U'\n') {
      // blank line: newline, optional horizontal whitespace, newline
      std::size_t q = p + 1;
      while (q < u.size() && (u[q] == U' ' || u[q] == U'\t' || u[q] == U'\r'))
        ++q;
      if (q < u.size() && u[q] == U'\n') candidate = true;
    }
    if (!candidate) continue;
    std::size_t pos = p + 1;
    if (pos >= u.size()) continue;
    if (strictly_inside_any_span(doc.spans, pos)) continue;
    boundaries.push_back(pos);
  }

  std::vector<AnnotatedText> out;
  std::size_t seg_start = 0;
  boundaries.push_back(u.size());
  int next_sent_id = 0;
  for (std::size_t b : boundaries) {
    std::size_t lo = seg_start, hi = b;
    seg_start = b;
    while (lo < hi && utf8::is_space(u[lo])) ++lo;
    while (hi > lo && utf8::is_space(u[hi - 1])) --hi;
    if (lo >= hi) continue;
    AnnotatedText sent;
    sent.doc_id = doc.doc_id;
    sent.sent_id = next_sent_id++;
    sent.text = utf8::encode(u.substr(lo, hi - lo));
    for (const Span& s : doc.spans) {
      if (s.start >= lo && s.end <= hi)
        sent.spans.push_back({s.start - lo, s.end - lo, s.label});
    }
    sent.validate();
    out.push_back(std::move(sent));
  }
  return out;
}

std::vector<AnnotatedText> drop_unannotated(
    const std::vector<AnnotatedText>& sentences) {
  std::vector<AnnotatedText> out;
  for (const AnnotatedText& s : sentences)
    if (!s.spans.empty()) out.push_back(s);
  return out;
}

}  // namespace nersynth
