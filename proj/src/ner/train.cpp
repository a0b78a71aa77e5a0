#include "nersynth/ner/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace nersynth::ner {

void TagScores::finalize() {
  precision = (tp + fp) == 0 ? 0.0 : 100.0 * tp / static_cast<double>(tp + fp);
  recall = (tp + fn) == 0 ? 0.0 : 100.0 * tp / static_cast<double>(tp + fn);
  f1 = (precision + recall) == 0.0
           ? 0.0
           : 2.0 * precision * recall / (precision + recall);
}

EvalResult score_predictions(const std::vector<std::vector<Span>>& gold,
                             const std::vector<std::vector<Span>>& predicted,
                             const LabelSet& labels) {
  EvalResult r;
  for (const std::string& l : labels.labels) r.per_tag[l];
  for (std::size_t d = 0; d < gold.size(); ++d) {
    const auto& g = gold[d];
    const auto& p = d < predicted.size() ? predicted[d] : std::vector<Span>{};
    for (const Span& ps : p) {
      bool hit = std::find(g.begin(), g.end(), ps) != g.end();
      TagScores& t = r.per_tag[ps.label];
      if (hit) {
        ++t.tp;
        ++r.total.tp;
      } else {
        ++t.fp;
        ++r.total.fp;
      }
    }
    for (const Span& gs : g) {
      if (std::find(p.begin(), p.end(), gs) == p.end()) {
        ++r.per_tag[gs.label].fn;
        ++r.total.fn;
      }
    }
  }
  for (auto& [_, t] : r.per_tag) t.finalize();
  r.total.finalize();
  return r;
}

EvalResult evaluate(const NerModel& model,
                    const std::vector<AnnotatedText>& testset) {
  std::vector<std::vector<Span>> gold, predicted;
  gold.reserve(testset.size());
  predicted.reserve(testset.size());
  for (const AnnotatedText& doc : testset) {
    gold.push_back(doc.spans);
    predicted.push_back(parse(tokenize(doc.text), model));
  }
  return score_predictions(gold, predicted, model.labels);
}

std::string format_eval_table(const EvalResult& r, bool tsv) {
  std::ostringstream os;
  auto row = [&](const std::string& name, const TagScores& t) {
    char buf[128];
    if (tsv)
      std::snprintf(buf, sizeof buf, "%s\t%.2f\t%.2f\t%.2f\n", name.c_str(),
                    t.precision, t.recall, t.f1);
    else
      std::snprintf(buf, sizeof buf, "%-12s %8.2f %8.2f %8.2f\n", name.c_str(),
                    t.precision, t.recall, t.f1);
    os << buf;
  };
  if (tsv)
    os << "tag\tprecision\trecall\tf1\n";
  else
    os << "tag          precision   recall       f1\n";
  for (const auto& [name, t] : r.per_tag) row(name, t);
  row("total", r.total);
  return os.str();
}

std::vector<AnnotatedText> snap_spans_to_tokens(
    const std::vector<AnnotatedText>& docs) {
  std::vector<AnnotatedText> out;
  out.reserve(docs.size());
  for (const AnnotatedText& doc : docs) {
    std::vector<TokenSpan> tokens = tokenize(doc.text);
    AnnotatedText snapped = doc;
    snapped.spans.clear();
    for (const Span& s : doc.spans) {
      std::vector<std::size_t> cover;
      try {
        cover = char_span_to_token_indices(doc, s);
      } catch (const EmptyCover&) {
        std::cerr << "warning: dropping whitespace-only span in doc "
                  << doc.doc_id << "\n";
        continue;
      }
      Span snap{tokens[cover.front()].start, tokens[cover.back()].end, s.label};
      if (snap.start != s.start || snap.end != s.end)
        std::cerr << "warning: snapped span (" << s.start << "," << s.end
                  << ") to token boundaries (" << snap.start << "," << snap.end
                  << ") in doc " << doc.doc_id << "\n";
      snapped.spans.push_back(snap);
    }
    // Snapping can merge adjacent spans into overlap; keep the earlier one.
    std::sort(snapped.spans.begin(), snapped.spans.end(),
              [](const Span& a, const Span& b) { return a.start < b.start; });
    std::vector<Span> kept;
    for (const Span& s : snapped.spans) {
      if (!kept.empty() && s.start < kept.back().end) {
        std::cerr << "warning: dropping span overlapping after snap in doc "
                  << doc.doc_id << "\n";
        continue;
      }
      kept.push_back(s);
    }
    snapped.spans = std::move(kept);
    out.push_back(std::move(snapped));
  }
  return out;
}

namespace {

struct Adam {
  ParamSet m, v;
  long t = 0;

  explicit Adam(const ParamSet& like) : m(like.zeros_like()), v(like.zeros_like()) {}

  void step(ParamSet& params, const ParamSet& grads, const TrainConfig& tc) {
    ++t;
    const double bc1 = 1.0 - std::pow(tc.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(tc.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
      auto& p = params.tensors[i].value;
      const auto& g = grads.tensors[i].value;
      auto& mi = m.tensors[i].value;
      auto& vi = v.tensors[i].value;
      mi = tc.beta1 * mi + (1.0 - tc.beta1) * g;
      vi = tc.beta2 * vi + (1.0 - tc.beta2) * g.cwiseProduct(g);
      p.array() -= tc.learning_rate * (mi.array() / bc1) /
                   ((vi.array() / bc2).sqrt() + tc.epsilon);
    }
  }
};

}  // namespace

TrainResult train(const std::vector<AnnotatedText>& dataset,
                  const TrainConfig& tc, const EmbedConfig& ec,
                  const EncoderConfig& cc, const LabelSet& labels) {
  if (dataset.empty()) throw EmptyDataset("train: empty dataset");
  const double frac_sum = tc.train_fraction + tc.dev_fraction;
  if (frac_sum > 1.0 + 1e-9)
    throw ConfigError("train/dev fractions exceed 1");

  std::vector<AnnotatedText> docs = snap_spans_to_tokens(dataset);

  std::mt19937_64 rng(tc.seed);
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  TrainResult result;
  result.model = NerModel::init(ec, cc, labels, tc.seed);
  const std::size_t n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(tc.train_fraction * docs.size())));
  const std::size_t n_dev = static_cast<std::size_t>(
      std::floor(tc.dev_fraction * docs.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train)
      result.train_idx.push_back(order[i]);
    else if (i < n_train + n_dev)
      result.dev_idx.push_back(order[i]);
    else
      result.test_idx.push_back(order[i]);
  }

  std::vector<const AnnotatedText*> dev_docs;
  for (std::size_t i : result.dev_idx) dev_docs.push_back(&docs[i]);
  // Small corpora may leave the validation split empty; fall back to the
  // training split so model selection stays defined.
  if (dev_docs.empty())
    for (std::size_t i : result.train_idx) dev_docs.push_back(&docs[i]);

  std::vector<std::size_t> train_order = result.train_idx;
  std::shuffle(train_order.begin(), train_order.end(), rng);
  std::size_t cursor = 0;

  NerModel& model = result.model;
  ParamSet grads = model.params.zeros_like();
  Adam adam(model.params);
  ParamSet best_params = model.params;
  result.best_f1 = -1.0;

  auto run_eval = [&](int iteration) {
    std::vector<std::vector<Span>> gold, predicted;
    for (const AnnotatedText* d : dev_docs) {
      gold.push_back(d->spans);
      predicted.push_back(parse(tokenize(d->text), model));
    }
    EvalResult er = score_predictions(gold, predicted, labels);
    result.log.push_back(
        {iteration, er.total.precision, er.total.recall, er.total.f1});
    if (er.total.f1 > result.best_f1) {
      result.best_f1 = er.total.f1;
      result.best_iteration = iteration;
      best_params = model.params;
    }
  };

  for (int iter = 1; iter <= tc.max_iterations; ++iter) {
    grads.set_zero();
    double loss_sum = 0.0;
    std::size_t step_count = 0;
    for (int b = 0; b < tc.batch_size; ++b) {
      if (cursor >= train_order.size()) {
        std::shuffle(train_order.begin(), train_order.end(), rng);
        cursor = 0;
      }
      const AnnotatedText& doc = docs[train_order[cursor++]];
      std::vector<TokenSpan> tokens = tokenize(doc.text);
      if (tokens.empty()) continue;
      std::vector<Transition> gold = gold_transitions(tokens, doc.spans, labels);
      SentenceForward fwd = forward_teacher(tokens, gold, model);
      loss_sum += backward(fwd, model, grads);
      step_count += fwd.steps.size();
    }
    if (step_count == 0) continue;
    const double scale = 1.0 / static_cast<double>(step_count);
    for (Tensor& t : grads.tensors) t.value *= scale;
    result.final_loss = loss_sum * scale;
    if (!std::isfinite(result.final_loss))
      throw DivergedLoss("training loss diverged (NaN/Inf) at iteration " +
                         std::to_string(iter));
    adam.step(model.params, grads, tc);
    if (!model.params.all_finite())
      throw DivergedLoss("model weights diverged at iteration " +
                         std::to_string(iter));
    if (tc.eval_every > 0 && iter % tc.eval_every == 0) run_eval(iter);
  }
  if (result.log.empty() || result.log.back().iteration != tc.max_iterations)
    run_eval(tc.max_iterations);

  model.params = best_params;
  return result;
}

void write_training_log_csv(const std::string& path,
                            const std::vector<EvalPoint>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "iteration,precision,recall,f1\n";
  char buf[128];
  for (const EvalPoint& p : log) {
    std::snprintf(buf, sizeof buf, "%d,%.4f,%.4f,%.4f\n", p.iteration,
                  p.precision, p.recall, p.f1);
    out << buf;
  }
}

}  // namespace nersynth::ner
