#include "nersynth/infill.hpp"

#include <algorithm>
#include <fstream>

#include "nersynth/utf8.hpp"

namespace nersynth {

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ (seed * 1099511628211ULL);
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

const char* to_string(MaskCategory c) {
  switch (c) {
    case MaskCategory::FirstName: return "FirstName";
    case MaskCategory::LastName: return "LastName";
    case MaskCategory::FullName: return "FullName";
    case MaskCategory::Date: return "Date";
    case MaskCategory::Year: return "Year";
    case MaskCategory::Phone: return "Phone";
    case MaskCategory::IdNumber: return "IdNumber";
    case MaskCategory::Hospital: return "Hospital";
    case MaskCategory::Age: return "Age";
    case MaskCategory::Other: return "Other";
  }
  return "Other";
}

MaskCategory mask_category_from_string(const std::string& s) {
  static const std::map<std::string, MaskCategory> m = {
      {"FirstName", MaskCategory::FirstName},
      {"LastName", MaskCategory::LastName},
      {"FullName", MaskCategory::FullName},
      {"Date", MaskCategory::Date},
      {"Year", MaskCategory::Year},
      {"Phone", MaskCategory::Phone},
      {"IdNumber", MaskCategory::IdNumber},
      {"Hospital", MaskCategory::Hospital},
      {"Age", MaskCategory::Age},
      {"Other", MaskCategory::Other},
  };
  auto it = m.find(s);
  if (it == m.end()) throw UnknownCategory("unknown mask category: " + s);
  return it->second;
}

MaskPattern::MaskPattern(std::string re, MaskCategory cat)
    : regex_text(std::move(re)), category(cat) {
  compiled = std::regex(regex_text);
}

std::vector<MaskPattern> default_mask_patterns() {
  std::vector<MaskPattern> out;
  out.emplace_back(R"(\[\*\*\s*(?:Known firstname|First Name[^\]]*|NAME)\s*\*\*\])",
                   MaskCategory::FirstName);
  out.emplace_back(R"(\[\*\*\s*(?:Known lastname|Last Name[^\]]*|SURNAME)\s*\*\*\])",
                   MaskCategory::LastName);
  out.emplace_back(R"(\[\*\*\s*(?:Name[^\]]*|Doctor[^\]]*)\s*\*\*\])",
                   MaskCategory::FullName);
  out.emplace_back(R"(\[\*\*\s*(?:\d{4}-\d{1,2}-\d{1,2}|Date[^\]]*|DATE)\s*\*\*\])",
                   MaskCategory::Date);
  out.emplace_back(R"(\[\*\*\s*(?:Year[^\]]*|YEAR|\d{4})\s*\*\*\])",
                   MaskCategory::Year);
  out.emplace_back(R"(\[\*\*\s*(?:Telephone[^\]]*|Phone[^\]]*|PHONE)\s*\*\*\])",
                   MaskCategory::Phone);
  out.emplace_back(R"(\[\*\*\s*(?:Medical Record Number[^\]]*|Numeric Identifier[^\]]*|ID)\s*\*\*\])",
                   MaskCategory::IdNumber);
  out.emplace_back(R"(\[\*\*\s*(?:Hospital[^\]]*|Location[^\]]*)\s*\*\*\])",
                   MaskCategory::Hospital);
  out.emplace_back(R"(\[\*\*\s*(?:Age[^\]]*|AGE)\s*\*\*\])", MaskCategory::Age);
  out.emplace_back(R"(\[\*\*[^\]]*\*\*\])", MaskCategory::Other);
  return out;
}

std::vector<MaskPattern> load_mask_patterns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mask pattern file " + path);
  std::vector<MaskPattern> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string cat = line.substr(0, eq);
    std::string re = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.pop_back();
    };
    trim(cat);
    trim(re);
    if (cat.empty() || re.empty()) continue;
    try {
      out.emplace_back(re, mask_category_from_string(cat));
    } catch (const std::regex_error& e) {
      throw ConfigError("bad regex at " + path + ":" + std::to_string(lineno) +
                        ": " + e.what());
    }
  }
  return out;
}

SurrogatePool SurrogatePool::builtin_german() {
  SurrogatePool p;
  p.lists[MaskCategory::FirstName] = {
      "Anna",   "Lukas",  "Maria",  "Felix",   "Sophie", "Jonas",
      "Laura",  "Elias",  "Lena",   "Maximilian", "Clara", "Paul"};
  p.lists[MaskCategory::LastName] = {
      "Müller",  "Schmidt", "Schneider", "Fischer", "Weber",  "Meyer",
      "Wagner",  "Becker",  "Schulz",    "Hoffmann", "Koch",  "Bauer"};
  p.lists[MaskCategory::Hospital] = {
      "Universitätsklinikum Augsburg", "Klinikum München",
      "Charité Berlin",                "Klinikum Stuttgart",
      "Uniklinik Köln",                "Klinikum Nürnberg"};
  return p;
}

void SurrogatePool::load_list(MaskCategory cat, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open surrogate pool file " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (!line.empty()) entries.push_back(line);
  }
  if (entries.empty())
    throw ConfigError("surrogate pool file is empty: " + path);
  lists[cat] = std::move(entries);
}

namespace {

// Map byte offsets to codepoint offsets for regex match positions.
std::vector<std::size_t> byte_to_cp_map(const std::string& s) {
  std::vector<std::size_t> m(s.size() + 1, 0);
  std::size_t cp = 0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    m[b] = cp;
    unsigned char nb = b + 1 < s.size() ? static_cast<unsigned char>(s[b + 1]) : 0xFF;
    if ((nb & 0xC0) != 0x80) ++cp;
  }
  m[s.size()] = cp;
  return m;
}

const std::vector<std::string>& require_list(const SurrogatePool& pool,
                                             MaskCategory cat) {
  auto it = pool.lists.find(cat);
  if (it == pool.lists.end() || it->second.empty())
    throw UnknownCategory(std::string("no surrogate pool for category ") +
                          to_string(cat));
  return it->second;
}

std::string format_digits(std::mt19937_64& rng, const std::string& fmt) {
  std::uniform_int_distribution<int> digit(0, 9);
  std::string out;
  for (char c : fmt)
    out.push_back(c == 'd' ? static_cast<char>('0' + digit(rng)) : c);
  return out;
}

std::string pad2(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

}  // namespace

std::string sample_replacement(MaskCategory category, std::mt19937_64& rng,
                               const SurrogatePool& pool) {
  switch (category) {
    case MaskCategory::FirstName:
    case MaskCategory::LastName:
    case MaskCategory::Hospital: {
      const auto& list = require_list(pool, category);
      std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
      return list[pick(rng)];
    }
    case MaskCategory::FullName: {
      const auto& first = require_list(pool, MaskCategory::FirstName);
      const auto& last = require_list(pool, MaskCategory::LastName);
      std::uniform_int_distribution<std::size_t> pf(0, first.size() - 1);
      std::uniform_int_distribution<std::size_t> pl(0, last.size() - 1);
      std::string f = first[pf(rng)];
      return f + " " + last[pl(rng)];
    }
    case MaskCategory::Date: {
      std::uniform_int_distribution<std::size_t> pick_fmt(
          0, pool.date_formats.size() - 1);
      std::uniform_int_distribution<int> day(1, 28), month(1, 12),
          year(1950, 2030);
      int d = day(rng), m = month(rng), y = year(rng);
      const std::string& fmt = pool.date_formats[pick_fmt(rng)];
      if (fmt == "DD.MM.YYYY") return pad2(d) + "." + pad2(m) + "." + std::to_string(y);
      if (fmt == "YYYY-MM-DD") return std::to_string(y) + "-" + pad2(m) + "-" + pad2(d);
      if (fmt == "MM/DD/YYYY") return pad2(m) + "/" + pad2(d) + "/" + std::to_string(y);
      throw ConfigError("unknown date format: " + fmt);
    }
    case MaskCategory::Year: {
      std::uniform_int_distribution<int> year(1950, 2030);
      return std::to_string(year(rng));
    }
    case MaskCategory::Phone:
      return format_digits(rng, pool.phone_format);
    case MaskCategory::IdNumber:
      return format_digits(rng, "ddddddd");
    case MaskCategory::Age: {
      std::uniform_int_distribution<int> age(18, 99);
      return std::to_string(age(rng));
    }
    case MaskCategory::Other: {
      auto it = pool.lists.find(MaskCategory::Other);
      if (it != pool.lists.end() && !it->second.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
        return it->second[pick(rng)];
      }
      return format_digits(rng, "dddddd");
    }
  }
  throw UnknownCategory("unsupported mask category");
}

std::vector<MaskRegion> detect_masks(const AnnotatedText& doc,
                                     const std::vector<MaskPattern>& patterns) {
  struct Raw {
    std::size_t start, end;
    MaskCategory cat;
    std::size_t pattern_rank;
  };
  std::vector<Raw> raw;
  const auto b2c = byte_to_cp_map(doc.text);
  for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
    auto begin = std::sregex_iterator(doc.text.begin(), doc.text.end(),
                                      patterns[pi].compiled);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      Raw r;
      r.start = b2c[static_cast<std::size_t>(it->position())];
      r.end = b2c[static_cast<std::size_t>(it->position() + it->length())];
      r.cat = patterns[pi].category;
      r.pattern_rank = pi;
      raw.push_back(r);
    }
  }
  // Earliest start wins; on equal start the longer match, then pattern order.
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    return a.pattern_rank < b.pattern_rank;
  });
  std::vector<MaskRegion> out;
  std::size_t covered_to = 0;
  for (const Raw& r : raw) {
    if (!out.empty() && r.start < covered_to) continue;
    for (const Span& s : doc.spans) {
      if (s.start < r.end && r.start < s.end)
        throw MaskOverlapsAnnotation(
            "mask region (" + std::to_string(r.start) + "," +
            std::to_string(r.end) + ") intersects span on \"" +
            doc.surface(s) + "\" in doc " + doc.doc_id);
    }
    out.push_back({r.start, r.end, r.cat});
    covered_to = r.end;
  }
  return out;
}

std::mt19937_64 document_rng(std::uint64_t seed, const std::string& doc_id) {
  return std::mt19937_64(fnv1a64(doc_id, seed));
}

std::pair<AnnotatedText, InfillReport> infill_document(
    const AnnotatedText& doc, const std::vector<MaskPattern>& patterns,
    const SurrogatePool& pool, std::uint64_t seed) {
  std::vector<MaskRegion> regions = detect_masks(doc, patterns);
  InfillReport report;
  if (regions.empty()) return {doc, report};

  std::mt19937_64 rng = document_rng(seed, doc.doc_id);
  const std::u32string u = utf8::decode(doc.text);
  std::u32string out;
  out.reserve(u.size());
  std::vector<std::pair<std::size_t, std::ptrdiff_t>> deltas;  // (orig pos, delta)
  std::size_t cursor = 0;
  for (const MaskRegion& r : regions) {
    out.append(u, cursor, r.start - cursor);
    std::string rep = sample_replacement(r.category, rng, pool);
    std::u32string urep = utf8::decode(rep);
    out.append(urep);
    deltas.emplace_back(r.start, static_cast<std::ptrdiff_t>(urep.size()) -
                                     static_cast<std::ptrdiff_t>(r.end - r.start));
    report.counts[r.category] += 1;
    report.records.push_back({doc.doc_id, r.category, r.start, r.end, urep.size()});
    cursor = r.end;
  }
  out.append(u, cursor, u.size() - cursor);

  AnnotatedText result;
  result.doc_id = doc.doc_id;
  result.sent_id = doc.sent_id;
  result.text = utf8::encode(out);
  for (Span s : doc.spans) {
    std::ptrdiff_t shift = 0;
    for (const auto& [pos, d] : deltas)
      if (pos < s.start) shift += d;
    s.start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.start) + shift);
    s.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + shift);
    result.spans.push_back(s);
  }
  result.validate();

  // Surrogates must not themselves look like masks.
  AnnotatedText bare = result;
  bare.spans.clear();
  if (!detect_masks(bare, patterns).empty())
    throw Error("surrogate reintroduced a mask pattern in doc " + doc.doc_id);
  return {std::move(result), std::move(report)};
}

}  // namespace nersynth
