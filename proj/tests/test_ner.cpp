#include <doctest.h>

#include <cstdio>
#include <random>
#include <set>

#include "nersynth/ner/model.hpp"
#include "nersynth/ner/network.hpp"
#include "nersynth/ner/train.hpp"
#include "nersynth/ner/transitions.hpp"
#include "support/synthetic.hpp"

using namespace nersynth;
using namespace nersynth::ner;

namespace {

EmbedConfig tiny_embed() {
  EmbedConfig ec;
  ec.rows = 50;
  ec.width = 12;
  return ec;
}

EncoderConfig tiny_encoder() {
  EncoderConfig cc;
  cc.depth = 2;
  return cc;
}

NerModel tiny_model(std::uint64_t seed = 7) {
  return NerModel::init(tiny_embed(), tiny_encoder(), LabelSet{},
                        seed);
}

}  // namespace

TEST_CASE("transition id round-trip covers the whole inventory") {
  const std::size_t n_labels = 7;
  for (int id = 0; id < action_count(n_labels); ++id) {
    Transition t = transition_from_id(id);
    CHECK(transition_id(t) == id);
  }
  CHECK(transition_id({Action::Out, -1}) == 0);
}

TEST_CASE("legality constraints") {
  const std::size_t n = 4, L = 7;
  ParserState s;

  SUBCASE("closed state") {
    CHECK(is_legal(s, {Action::Out, -1}, n, L));
    CHECK(is_legal(s, {Action::Begin, 2}, n, L));
    CHECK(is_legal(s, {Action::Unit, 2}, n, L));
    CHECK_FALSE(is_legal(s, {Action::In, 2}, n, L));
    CHECK_FALSE(is_legal(s, {Action::Last, 2}, n, L));
  }

  SUBCASE("open state restricts to the matching label") {
    apply(s, {Action::Begin, 2});
    CHECK(is_legal(s, {Action::In, 2}, n, L));
    CHECK(is_legal(s, {Action::Last, 2}, n, L));
    CHECK_FALSE(is_legal(s, {Action::In, 3}, n, L));
    CHECK_FALSE(is_legal(s, {Action::Last, 3}, n, L));
    CHECK_FALSE(is_legal(s, {Action::Out, -1}, n, L));
    CHECK_FALSE(is_legal(s, {Action::Begin, 2}, n, L));
    CHECK_FALSE(is_legal(s, {Action::Unit, 2}, n, L));
  }

  SUBCASE("an entity may not be left open at the last token") {
    s.position = n - 1;
    CHECK_FALSE(is_legal(s, {Action::Begin, 0}, n, L));
    CHECK(is_legal(s, {Action::Unit, 0}, n, L));
    apply(s, {Action::Unit, 0});  // hypothetical open at last token
    ParserState open;
    apply(open, {Action::Begin, 1});
    open.position = n - 1;
    CHECK_FALSE(is_legal(open, {Action::In, 1}, n, L));
    CHECK(is_legal(open, {Action::Last, 1}, n, L));
  }
}

TEST_CASE("gold transitions for the reference sentences") {
  LabelSet labels = LabelSet{};

  AnnotatedText a{"Er nahm Aspirin täglich", {{8, 15, "Drug"}}, "d", 0};
  auto toks = tokenize(a.text);
  auto gold = gold_transitions(toks, a.spans, labels);
  REQUIRE(gold.size() == 4);
  CHECK(gold[0] == Transition{Action::Out, -1});
  CHECK(gold[1] == Transition{Action::Out, -1});
  CHECK(gold[2].action == Action::Unit);
  CHECK(labels.labels[gold[2].label] == "Drug");
  CHECK(gold[3] == Transition{Action::Out, -1});

  AnnotatedText b{"dreimal pro Woche", {{0, 17, "Frequency"}}, "d", 0};
  auto btoks = tokenize(b.text);
  auto bgold = gold_transitions(btoks, b.spans, labels);
  REQUIRE(bgold.size() == 3);
  CHECK(bgold[0].action == Action::Begin);
  CHECK(bgold[1].action == Action::In);
  CHECK(bgold[2].action == Action::Last);
  CHECK(bgold[0].label == bgold[2].label);
}

TEST_CASE("misaligned span boundaries throw") {
  LabelSet labels = LabelSet{};
  AnnotatedText a{"Er nahm Aspirin", {{8, 11, "Drug"}}, "d", 0};  // "Asp"
  CHECK_THROWS_AS(gold_transitions(tokenize(a.text), a.spans, labels),
                  MisalignedSpan);
}

TEST_CASE("property: decode(gold(x)) == x over 1000 random sentences") {
  LabelSet labels = LabelSet{};
  auto docs = testsupport::make_medication_corpus(1000, 99);
  for (const AnnotatedText& d : docs) {
    auto toks = tokenize(d.text);
    auto gold = gold_transitions(toks, d.spans, labels);
    REQUIRE(gold.size() == toks.size());
    auto back = decode_transitions(toks, gold, labels);
    CHECK(back == d.spans);
  }
}

TEST_CASE("embedding: identical surfaces share rows, normalization holds") {
  NerModel m = tiny_model();
  auto toks = tokenize("Aspirin half Aspirin aspirin");
  Eigen::MatrixXd E = embed(toks, m);
  REQUIRE(E.rows() == 4);
  REQUIRE(E.cols() == m.embed_cfg.width);

  CHECK((E.row(0) - E.row(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((E.row(0) - E.row(3)).cwiseAbs().maxCoeff() > 0.0);  // case matters

  // The pre-gain layer-normalized activations have mean 0, variance 1.
  // Recover them by undoing gain/bias.
  const Eigen::VectorXd gain = m.params[m.ln_gain].col(0);
  const Eigen::VectorXd bias = m.params[m.ln_bias].col(0);
  for (Eigen::Index r = 0; r < E.rows(); ++r) {
    Eigen::VectorXd normed =
        (E.row(r).transpose() - bias).cwiseQuotient(gain);
    double mean = normed.mean();
    double var = (normed.array() - mean).square().mean();
    CHECK(std::abs(mean) < 1e-5);
    CHECK(std::abs(var - 1.0) < 1e-3);
  }
}

TEST_CASE("token_features shape feature collapses long runs") {
  auto f = token_features("Abc123");
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "abc123");
  CHECK(f[1] == "abc");
  CHECK(f[2] == "123");
  CHECK(f[3] == "Xxxddd");
  CHECK(token_features("ABCDEFGH")[3] == "XXX");
  CHECK(token_features("ABCDEFGH")[3] == token_features("ABCD")[3]);
  CHECK(token_features("a")[1] == "a");
  CHECK(token_features("a")[2] == "a");
}

TEST_CASE("encoder receptive field grows by one token per layer") {
  NerModel m = tiny_model(3);
  auto toks = tokenize("t0 t1 t2 t3 t4 t5 t6 t7");
  Eigen::MatrixXd E = embed(toks, m);
  Eigen::MatrixXd base = encode(E, m);

  Eigen::MatrixXd E2 = E;
  E2.row(0).array() += 0.5;
  Eigen::MatrixXd shifted = encode(E2, m);

  // depth=2, window=1: token 0 can reach outputs 0..2 but not 3.
  int depth = m.enc_cfg.depth * m.enc_cfg.window;
  for (Eigen::Index r = 0; r < base.rows(); ++r) {
    double delta = (shifted.row(r) - base.row(r)).cwiseAbs().maxCoeff();
    if (r <= depth)
      CHECK(delta > 0.0);
    else
      CHECK(delta == 0.0);
  }
}

TEST_CASE("encoder residual passes zero input through zero weights") {
  NerModel m = tiny_model();
  for (int d = 0; d < m.enc_cfg.depth; ++d) {
    m.params[m.conv_w[d]].setZero();
    m.params[m.conv_b[d]].setZero();
  }
  auto toks = tokenize("eins zwei drei");
  Eigen::MatrixXd E = embed(toks, m);
  Eigen::MatrixXd H = encode(E, m);
  CHECK((H - E).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-token sentence flows through the full stack") {
  NerModel m = tiny_model();
  auto toks = tokenize("Aspirin");
  auto spans = parse(toks, m);
  for (const Span& s : spans) {
    CHECK(s.start == 0);
    CHECK(s.end == 7);
  }
  LabelSet labels = LabelSet{};
  auto gold = gold_transitions(toks, {{0, 7, "Drug"}}, labels);
  REQUIRE(gold.size() == 1);
  CHECK(gold[0].action == Action::Unit);
}

TEST_CASE("parse runs the encoder exactly once per sentence") {
  NerModel m = tiny_model();
  auto toks = tokenize("Er nahm Aspirin und Ibuprofen täglich");
  long before = encode_call_count();
  parse(toks, m);
  CHECK(encode_call_count() - before == 1);
}

TEST_CASE("parse emits structurally valid spans under random weights") {
  auto toks = tokenize("Er nahm zwei Tabletten Aspirin 500 mg oral täglich");
  AnnotatedText probe{"Er nahm zwei Tabletten Aspirin 500 mg oral täglich",
                      {}, "p", 0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    NerModel m = tiny_model(seed);
    auto spans = parse(toks, m);
    AnnotatedText check = probe;
    check.spans = spans;
    CHECK_NOTHROW(check.validate());  // ordered, non-overlapping, in bounds
    for (const Span& s : spans) {
      bool starts_on_token = false, ends_on_token = false;
      for (const TokenSpan& t : toks) {
        starts_on_token |= t.start == s.start;
        ends_on_token |= t.end == s.end;
      }
      CHECK(starts_on_token);
      CHECK(ends_on_token);
    }
  }
}

TEST_CASE("score_predictions on a hand-counted fixture") {
  LabelSet labels({"Drug", "Strength"});
  // gold: 2 Drug, 2 Strength. predicted: both Drugs right,
  // both Strengths wrong (one boundary miss, one spurious Drug).
  std::vector<std::vector<Span>> gold = {
      {{0, 7, "Drug"}, {8, 11, "Strength"}},
      {{0, 9, "Drug"}, {10, 13, "Strength"}},
  };
  std::vector<std::vector<Span>> pred = {
      {{0, 7, "Drug"}, {8, 12, "Strength"}},
      {{0, 9, "Drug"}, {10, 13, "Drug"}},
  };
  EvalResult r = score_predictions(gold, pred, labels);
  CHECK(r.per_tag.at("Drug").tp == 2);
  CHECK(r.per_tag.at("Drug").fp == 1);
  CHECK(r.per_tag.at("Drug").fn == 0);
  CHECK(r.per_tag.at("Drug").precision == doctest::Approx(100.0 * 2 / 3));
  CHECK(r.per_tag.at("Drug").recall == doctest::Approx(100.0));
  CHECK(r.per_tag.at("Strength").tp == 0);
  CHECK(r.per_tag.at("Strength").f1 == 0.0);
  // micro totals: tp=2, fp=2, fn=2 -> P=R=F1=50
  CHECK(r.total.tp == 2);
  CHECK(r.total.fp == 2);
  CHECK(r.total.fn == 2);
  CHECK(r.total.f1 == doctest::Approx(50.0));

  std::string table = format_eval_table(r, false);
  CHECK(table.find("50.00") != std::string::npos);
  CHECK(table.find("Drug") != std::string::npos);
}

TEST_CASE("snap_spans_to_tokens expands to covering tokens") {
  AnnotatedText doc{"Er nahm Aspirin", {{8, 11, "Drug"}}, "d", 0};
  auto out = snap_spans_to_tokens({doc});
  REQUIRE(out.size() == 1);
  REQUIRE(out[0].spans.size() == 1);
  CHECK(out[0].spans[0].start == 8);
  CHECK(out[0].spans[0].end == 15);
}

TEST_CASE("gradient check against central differences") {
  EmbedConfig ec;
  ec.rows = 40;
  ec.width = 8;
  EncoderConfig cc;
  cc.depth = 2;
  LabelSet labels({"Drug", "Form"});
  NerModel m = NerModel::init(ec, cc, labels, 11);

  AnnotatedText doc{"Er nahm zwei Tabletten Aspirin", {{13, 22, "Form"},
                                                       {23, 30, "Drug"}},
                    "g", 0};
  auto toks = tokenize(doc.text);
  auto gold = gold_transitions(toks, doc.spans, labels);

  ParamSet grads = m.params.zeros_like();
  SentenceForward fwd = forward_teacher(toks, gold, m);
  backward(fwd, m, grads);

  auto loss_at = [&]() {
    return forward_teacher(toks, gold, m).loss;
  };

  std::mt19937_64 rng(5);
  const double h = 1e-4;
  for (std::size_t t = 0; t < m.params.tensors.size(); ++t) {
    Eigen::MatrixXd& W = m.params.tensors[t].value;
    std::uniform_int_distribution<Eigen::Index> ri(0, W.rows() - 1),
        ci(0, W.cols() - 1);
    for (int probe = 0; probe < 4; ++probe) {
      Eigen::Index r = ri(rng), c = ci(rng);
      double orig = W(r, c);
      W(r, c) = orig + h;
      double up = loss_at();
      W(r, c) = orig - h;
      double down = loss_at();
      W(r, c) = orig;
      double numeric = (up - down) / (2 * h);
      double analytic = grads.tensors[t].value(r, c);
      double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      if (std::abs(numeric) < 1e-12 && std::abs(analytic) < 1e-12) continue;
      INFO(m.params.tensors[t].name, " (", r, ",", c, ") numeric=", numeric,
           " analytic=", analytic);
      CHECK(std::abs(numeric - analytic) / denom < 1e-4);
    }
  }
}

TEST_CASE("model save/load round-trip") {
  NerModel m = tiny_model(13);
  std::string path = std::string(NERSYNTH_TEST_DIR) + "/tmp_model.json";
  m.save(path);
  NerModel back = NerModel::load(path);
  std::remove(path.c_str());

  REQUIRE(back.params.tensors.size() == m.params.tensors.size());
  for (std::size_t t = 0; t < m.params.tensors.size(); ++t) {
    CHECK(back.params.tensors[t].name == m.params.tensors[t].name);
    CHECK(back.params.tensors[t].value == m.params.tensors[t].value);
  }
  auto toks = tokenize("Er nahm Aspirin");
  CHECK(parse(toks, back) == parse(toks, m));
}

TEST_CASE("training overfits a small corpus") {
  auto docs = testsupport::make_medication_corpus(12, 4);
  TrainConfig tc;
  tc.max_iterations = 320;
  tc.eval_every = 40;
  tc.train_fraction = 1.0;
  tc.dev_fraction = 0.0;
  tc.batch_size = 4;
  EmbedConfig ec;
  ec.rows = 300;
  ec.width = 24;
  EncoderConfig cc;
  cc.depth = 2;
  TrainResult r = train(docs, tc, ec, cc, LabelSet{});
  CHECK(r.best_f1 == doctest::Approx(100.0));
  CHECK_FALSE(r.log.empty());
  for (std::size_t k = 1; k < r.log.size(); ++k)
    CHECK(r.log[k].iteration > r.log[k - 1].iteration);
}
