#include "nersynth/align.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace nersynth {

using json = nlohmann::ordered_json;

std::uint32_t TranslationTable::source_id(const std::string& w) const {
  auto it = source_ids.find(w);
  return it == source_ids.end() ? kNull : it->second;
}

double TranslationTable::prob(std::uint32_t e, std::uint32_t f) const {
  if (e >= probs.size()) return 0.0;
  auto it = probs[e].find(f);
  return it == probs[e].end() ? 0.0 : it->second;
}

std::size_t AlignmentMatrix::link_count() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells) n += c;
  return n;
}

std::string AlignmentMatrix::to_pharaoh() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < n_target; ++i)
    for (std::size_t j = 0; j < n_source; ++j)
      if (at(i, j)) {
        if (!first) os << ' ';
        os << j << '-' << i;
        first = false;
      }
  return os.str();
}

std::string AlignmentMatrix::to_jsonl_line(const std::string& pair_id) const {
  json j;
  j["pair_id"] = pair_id;
  j["n_tgt"] = n_target;
  j["n_src"] = n_source;
  json links = json::array();
  for (std::size_t i = 0; i < n_target; ++i)
    for (std::size_t jj = 0; jj < n_source; ++jj)
      if (at(i, jj)) links.push_back(json::array({i, jj}));
  j["links"] = std::move(links);
  return j.dump();
}

std::pair<std::string, AlignmentMatrix> AlignmentMatrix::from_jsonl_line(
    const std::string& line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(lineno, e.what());
  }
  AlignmentMatrix m(j.at("n_tgt").get<std::size_t>(),
                    j.at("n_src").get<std::size_t>());
  for (const auto& link : j.at("links")) {
    std::size_t i = link.at(0).get<std::size_t>();
    std::size_t jj = link.at(1).get<std::size_t>();
    if (i >= m.n_target || jj >= m.n_source)
      throw DimensionMismatch("alignment link out of bounds at line " +
                              std::to_string(lineno));
    m.set(i, jj);
  }
  return {j.value("pair_id", std::string{}), m};
}

namespace {

struct EncodedPair {
  std::vector<std::uint32_t> src;  // without null
  std::vector<std::uint32_t> tgt;
};

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids,
                     const std::string& w, std::uint32_t base) {
  auto [it, inserted] = ids.emplace(w, base + static_cast<std::uint32_t>(ids.size()));
  return it->second;
}

// Diagonal prior over source positions for one target position, plus null.
// Real position j gets (1 - p_null) * exp(-lambda * |i/m - j/n|), normalized
// over the real positions; null gets p_null. 1-based i, j.
void diagonal_prior(std::size_t i, std::size_t m, std::size_t n, double lambda,
                    double p_null, std::vector<double>& out) {
  out.resize(n);
  double z = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double d = std::abs(static_cast<double>(i) / static_cast<double>(m) -
                        static_cast<double>(j) / static_cast<double>(n));
    out[j - 1] = std::exp(-lambda * d);
    z += out[j - 1];
  }
  for (double& v : out) v *= (1.0 - p_null) / z;
}

}  // namespace

EmTrainResult em_train(const std::vector<ParallelPair>& pairs, int iterations,
                       double tension, double p_null) {
  if (pairs.empty()) throw EmptyCorpus("em_train: no sentence pairs");
  if (iterations < 1) throw Error("em_train: iterations must be >= 1");

  EmTrainResult result;
  TranslationTable& table = result.table;
  table.tension = tension;
  table.p_null = p_null;

  std::vector<EncodedPair> enc;
  enc.reserve(pairs.size());
  for (const ParallelPair& p : pairs) {
    EncodedPair ep;
    for (const TokenSpan& t : tokenize(p.source.text))
      ep.src.push_back(intern(table.source_ids, t.surface, 1));
    for (const TokenSpan& t : tokenize(p.target.text))
      ep.tgt.push_back(intern(table.target_ids, t.surface, 0));
    if (ep.src.empty() || ep.tgt.empty()) {
      std::cerr << "warning: skipping degenerate pair " << p.pair_id << "\n";
      result.skipped_pairs.push_back(p.pair_id);
      continue;
    }
    enc.push_back(std::move(ep));
  }
  if (enc.empty()) throw EmptyCorpus("em_train: all pairs degenerate");

  const std::size_t n_source_words = table.source_ids.size() + 1;  // + null
  table.probs.assign(n_source_words, {});

  // Uniform init over co-occurring target words per source word; the null
  // word co-occurs with every target word of its pair.
  for (const EncodedPair& p : enc)
    for (std::uint32_t f : p.tgt) {
      table.probs[TranslationTable::kNull][f] = 1.0;
      for (std::uint32_t e : p.src) table.probs[e][f] = 1.0;
    }
  for (auto& dist : table.probs) {
    if (dist.empty()) continue;
    double z = static_cast<double>(dist.size());
    for (auto& [f, v] : dist) v = 1.0 / z;
  }

  std::vector<double> prior;
  for (int iter = 0; iter < iterations; ++iter) {
    std::vector<std::map<std::uint32_t, double>> counts(n_source_words);
    double ll = 0.0;
    for (const EncodedPair& p : enc) {
      const std::size_t n = p.src.size(), m = p.tgt.size();
      for (std::size_t i = 1; i <= m; ++i) {
        const std::uint32_t f = p.tgt[i - 1];
        diagonal_prior(i, m, n, tension, p_null, prior);
        double null_score = p_null * table.prob(TranslationTable::kNull, f);
        double denom = null_score;
        for (std::size_t j = 1; j <= n; ++j)
          denom += prior[j - 1] * table.prob(p.src[j - 1], f);
        if (denom <= 0.0) continue;
        ll += std::log(denom);
        counts[TranslationTable::kNull][f] += null_score / denom;
        for (std::size_t j = 1; j <= n; ++j)
          counts[p.src[j - 1]][f] += prior[j - 1] * table.prob(p.src[j - 1], f) / denom;
      }
    }
    result.log_likelihood.push_back(ll);
    for (std::size_t e = 0; e < n_source_words; ++e) {
      double z = 0.0;
      for (const auto& [f, c] : counts[e]) z += c;
      if (z <= 0.0) continue;
      table.probs[e].clear();
      for (const auto& [f, c] : counts[e]) table.probs[e][f] = c / z;
    }
  }
  return result;
}

AlignmentMatrix decode(const ParallelPair& pair, const TranslationTable& table) {
  std::vector<TokenSpan> src = tokenize(pair.source.text);
  std::vector<TokenSpan> tgt = tokenize(pair.target.text);
  if (src.empty() || tgt.empty())
    throw DegeneratePair("decode: pair " + pair.pair_id +
                         " has an empty side after tokenization");
  const std::size_t n = src.size(), m = tgt.size();
  AlignmentMatrix A(m, n);
  std::vector<double> prior;
  for (std::size_t i = 1; i <= m; ++i) {
    auto fit = table.target_ids.find(tgt[i - 1].surface);
    const bool known_f = fit != table.target_ids.end();
    diagonal_prior(i, m, n, table.tension, table.p_null, prior);
    double null_score =
        known_f ? table.p_null * table.prob(TranslationTable::kNull, fit->second)
                : 0.0;
    double best = null_score;  // null wins ties against real positions
    std::ptrdiff_t best_j = -1;
    double best_dist = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      double score = 0.0;
      if (known_f) {
        std::uint32_t e = table.source_id(src[j - 1].surface);
        if (e != TranslationTable::kNull)
          score = prior[j - 1] * table.prob(e, fit->second);
      }
      double dist = std::abs(static_cast<double>(i) / static_cast<double>(m) -
                             static_cast<double>(j) / static_cast<double>(n));
      bool take = false;
      if (score > best) {
        take = true;
      } else if (score == best && best_j >= 0 && score > 0.0) {
        if (dist < best_dist) take = true;  // tie: closer to the diagonal, then smaller j
      }
      if (take) {
        best = score;
        best_j = static_cast<std::ptrdiff_t>(j) - 1;
        best_dist = dist;
      }
    }
    if (best_j >= 0 && best > null_score)
      A.set(i - 1, static_cast<std::size_t>(best_j));
  }
  return A;
}

std::vector<ParallelPair> make_pairs(const std::vector<AnnotatedText>& source,
                                     const std::vector<std::string>& target_lines) {
  if (source.size() != target_lines.size())
    throw LineCountMismatch("source has " + std::to_string(source.size()) +
                            " sentences but target has " +
                            std::to_string(target_lines.size()) + " lines");
  std::vector<ParallelPair> pairs;
  pairs.reserve(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) {
    ParallelPair p;
    p.source = source[k];
    p.target.text = target_lines[k];
    p.target.doc_id = source[k].doc_id;
    p.target.sent_id = source[k].sent_id;
    p.pair_id = source[k].doc_id + "#" +
                (source[k].sent_id ? std::to_string(*source[k].sent_id) : std::to_string(k));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace nersynth
