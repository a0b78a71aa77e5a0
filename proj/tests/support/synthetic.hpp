#ifndef NERSYNTH_TESTS_SYNTHETIC_HPP
#define NERSYNTH_TESTS_SYNTHETIC_HPP

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "nersynth/align.hpp"
#include "nersynth/corpus.hpp"
#include "nersynth/utf8.hpp"

namespace nersynth::testsupport {

struct CipherCorpus {
  std::vector<ParallelPair> pairs;
  // gold[pair][target_pos] = source_pos
  std::vector<std::vector<std::size_t>> gold;
};

// 1:1 word cipher with word order shuffled by adjacent swaps (at most one
// position of displacement).
inline CipherCorpus make_cipher_corpus(std::size_t n_pairs, int vocab,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(3, 10);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  CipherCorpus out;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    int L = len(rng);
    // distinct source words per sentence
    std::vector<int> ids(vocab);
    for (int i = 0; i < vocab; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(L);

    std::vector<std::size_t> perm(L);
    for (int i = 0; i < L; ++i) perm[i] = static_cast<std::size_t>(i);
    for (int i = 0; i + 1 < L; ++i)
      if (coin(rng) < 0.3) {
        std::swap(perm[i], perm[i + 1]);
        ++i;  // keep displacement within one position
      }

    ParallelPair p;
    p.pair_id = "c" + std::to_string(k);
    std::string src, tgt;
    for (int i = 0; i < L; ++i) {
      if (i) src += ' ';
      src += "src" + std::to_string(ids[i]);
    }
    std::vector<std::size_t> gold(L);
    for (int i = 0; i < L; ++i) {
      if (i) tgt += ' ';
      tgt += "tgt" + std::to_string(ids[perm[i]]);
      gold[i] = perm[i];
    }
    p.source.text = src;
    p.source.doc_id = p.pair_id;
    p.target.text = tgt;
    p.target.doc_id = p.pair_id;
    out.pairs.push_back(std::move(p));
    out.gold.push_back(std::move(gold));
  }
  return out;
}

// Templated German-ish medication sentences with token-aligned gold spans;
// separable by construction (each tag has a disjoint surface vocabulary).
inline std::vector<AnnotatedText> make_medication_corpus(std::size_t n,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> drugs = {
      "Aspirin",   "Ibuprofen", "Metformin", "Ramipril",  "Simvastatin",
      "Pantoprazol", "Amoxicillin", "Zyprexa", "Marcumar", "Torasemid"};
  const std::vector<std::string> strengths = {"100", "250", "400", "500", "20",
                                              "40",  "75",  "850"};
  const std::vector<std::string> units = {"mg", "ml", "µg"};
  const std::vector<std::string> forms = {"Tablette", "Kapsel", "Tropfen",
                                          "Saft", "Spritze"};
  const std::vector<std::string> routes = {"oral", "intravenös", "subkutan",
                                           "topisch"};
  const std::vector<std::string> freqs = {"täglich", "morgens", "abends",
                                          "wöchentlich", "stündlich"};
  const std::vector<std::string> doses = {"eine", "zwei", "drei", "vier"};
  const std::vector<std::string> durations = {"Wochen", "Tage", "Monate"};
  const std::vector<std::string> fillers = {"Patient", "erhielt", "nimmt",
                                            "bekam",   "weiterhin", "zusätzlich"};

  auto pick = [&rng](const std::vector<std::string>& v) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
  };
  std::uniform_int_distribution<int> variant(0, 3);

  std::vector<AnnotatedText> out;
  for (std::size_t k = 0; k < n; ++k) {
    // Built in codepoint space so offsets stay correct past umlauts.
    std::u32string text;
    std::vector<Span> spans;
    auto append = [&](const std::string& word, const char* label) {
      if (!text.empty()) text += U' ';
      std::size_t start = text.size();
      text += utf8::decode(word);
      if (label) spans.push_back({start, text.size(), label});
    };
    append(pick(fillers), nullptr);
    append(pick(fillers), nullptr);
    switch (variant(rng)) {
      case 0:
        append(pick(doses), "Dosage");
        append(pick(forms), "Form");
        append(pick(drugs), "Drug");
        append(pick(strengths), "Strength");
        append(pick(units), nullptr);
        append(pick(freqs), "Frequency");
        break;
      case 1:
        append(pick(drugs), "Drug");
        append(pick(strengths), "Strength");
        append(pick(units), nullptr);
        append(pick(routes), "Route");
        append(pick(freqs), "Frequency");
        break;
      case 2:
        append(pick(drugs), "Drug");
        append("über", nullptr);
        append(pick(doses), "Dosage");
        append(pick(durations), "Duration");
        append(pick(routes), "Route");
        break;
      default:
        append(pick(doses), "Dosage");
        append(pick(forms), "Form");
        append(pick(drugs), "Drug");
        append(pick(freqs), "Frequency");
        break;
    }
    AnnotatedText doc;
    doc.text = utf8::encode(text);
    doc.spans = spans;
    doc.doc_id = "syn" + std::to_string(k);
    doc.sent_id = static_cast<int>(k);
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace nersynth::testsupport

#endif
