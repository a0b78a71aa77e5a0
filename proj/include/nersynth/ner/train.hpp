#ifndef NERSYNTH_NER_TRAIN_HPP
#define NERSYNTH_NER_TRAIN_HPP

#include <map>
#include <string>
#include <vector>

#include "nersynth/ner/model.hpp"
#include "nersynth/ner/network.hpp"

namespace nersynth::ner {

struct TagScores {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // percentages

  void finalize();
};

struct EvalResult {
  std::map<std::string, TagScores> per_tag;
  TagScores total;  // micro-averaged from pooled counts
};

// Entity-level exact match: (start, end, label) must all agree.
EvalResult score_predictions(
    const std::vector<std::vector<Span>>& gold,
    const std::vector<std::vector<Span>>& predicted,
    const LabelSet& labels);

EvalResult evaluate(const NerModel& model,
                    const std::vector<AnnotatedText>& testset);

// Per-tag rows plus a total row, percentages with
// two decimals.
std::string format_eval_table(const EvalResult& r, bool tsv);

// Expands spans to token boundaries where needed, logging a warning per
// adjusted span. Sentences whose spans cannot cover any token are dropped.
std::vector<AnnotatedText> snap_spans_to_tokens(
    const std::vector<AnnotatedText>& docs);

struct EvalPoint {
  int iteration = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct TrainResult {
  NerModel model;  // best checkpoint by validation F1
  std::vector<EvalPoint> log;
  double best_f1 = 0.0;
  int best_iteration = 0;
  std::vector<std::size_t> train_idx, dev_idx, test_idx;
  double final_loss = 0.0;  // mean cross-entropy of the last batch
};

TrainResult train(const std::vector<AnnotatedText>& dataset,
                  const TrainConfig& tc, const EmbedConfig& ec,
                  const EncoderConfig& cc, const LabelSet& labels);

void write_training_log_csv(const std::string& path,
                            const std::vector<EvalPoint>& log);

}  // namespace nersynth::ner

#endif
