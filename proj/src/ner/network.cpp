#include "nersynth/ner/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "nersynth/infill.hpp"  // fnv1a64
#include "nersynth/utf8.hpp"

namespace nersynth::ner {

namespace {

std::atomic<long> g_encode_calls{0};

constexpr double kLnEps = 1e-8;

std::string shape_of(const std::u32string& u) {
  std::u32string out;
  char32_t prev = 0;
  int run = 0;
  for (char32_t c : u) {
    char32_t s;
    if (utf8::is_upper(c))
      s = U'X';
    else if (utf8::is_lower(c))
      s = U'x';
    else if (utf8::is_digit(c))
      s = U'd';
    else
      s = c;
    if (s == prev) {
      if (++run >= 4) continue;  // collapse long runs
    } else {
      run = 1;
      prev = s;
    }
    out.push_back(s);
  }
  return utf8::encode(out);
}

}  // namespace

std::vector<std::string> token_features(const std::string& surface) {
  std::u32string u = utf8::decode(surface);
  std::u32string lower;
  lower.reserve(u.size());
  for (char32_t c : u) lower.push_back(utf8::to_lower(c));
  std::u32string prefix = lower.substr(0, std::min<std::size_t>(3, lower.size()));
  std::u32string suffix =
      lower.size() <= 3 ? lower : lower.substr(lower.size() - 3);
  return {utf8::encode(lower), utf8::encode(prefix), utf8::encode(suffix),
          shape_of(u)};
}

Eigen::MatrixXi feature_buckets(const std::vector<TokenSpan>& tokens,
                                const EmbedConfig& cfg) {
  Eigen::MatrixXi out(static_cast<Eigen::Index>(tokens.size()), cfg.n_embed);
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    std::vector<std::string> feats = token_features(tokens[r].surface);
    for (int k = 0; k < cfg.n_embed; ++k) {
      const std::string& f = feats[k % feats.size()];
      out(static_cast<Eigen::Index>(r), k) =
          static_cast<int>(fnv1a64(f, cfg.seeds[k]) %
                           static_cast<std::uint64_t>(cfg.rows));
    }
  }
  return out;
}

EmbedCache embed_forward(const std::vector<TokenSpan>& tokens,
                         const NerModel& model) {
  const EmbedConfig& cfg = model.embed_cfg;
  const int W = cfg.width, P = cfg.pieces, K = cfg.n_embed;
  const Eigen::Index T = static_cast<Eigen::Index>(tokens.size());
  EmbedCache c;
  c.buckets = feature_buckets(tokens, cfg);
  c.concat.resize(T, K * W);
  for (Eigen::Index r = 0; r < T; ++r)
    for (int k = 0; k < K; ++k)
      c.concat.row(r).segment(k * W, W) =
          model.params[model.tables[k]].row(c.buckets(r, k));

  c.pre_pool = Eigen::MatrixXd::Zero(T, P * W);
  for (int k = 0; k < K; ++k) {
    c.pre_pool.noalias() +=
        c.concat * model.params[model.embed_dense_w[k]].transpose();
    c.pre_pool.rowwise() += model.params[model.embed_dense_b[k]].col(0).transpose();
  }

  c.pool_arg.resize(T, W);
  c.pooled.resize(T, W);
  for (Eigen::Index r = 0; r < T; ++r)
    for (int w = 0; w < W; ++w) {
      int best_p = 0;
      double best = c.pre_pool(r, w);
      for (int p = 1; p < P; ++p)
        if (c.pre_pool(r, p * W + w) > best) {
          best = c.pre_pool(r, p * W + w);
          best_p = p;
        }
      c.pool_arg(r, w) = best_p;
      c.pooled(r, w) = best;
    }

  c.mean.resize(T);
  c.inv_std.resize(T);
  c.normed.resize(T, W);
  c.out.resize(T, W);
  const auto& gain = model.params[model.ln_gain].col(0);
  const auto& bias = model.params[model.ln_bias].col(0);
  for (Eigen::Index r = 0; r < T; ++r) {
    double mu = c.pooled.row(r).mean();
    double var = (c.pooled.row(r).array() - mu).square().mean();
    double inv = 1.0 / std::sqrt(var + kLnEps);
    c.mean(r) = mu;
    c.inv_std(r) = inv;
    c.normed.row(r) = (c.pooled.row(r).array() - mu) * inv;
    c.out.row(r) = c.normed.row(r).cwiseProduct(gain.transpose()) +
                   bias.transpose();
  }
  return c;
}

EncodeCache encode_forward(const Eigen::MatrixXd& embedded,
                           const NerModel& model) {
  ++g_encode_calls;
  const EncoderConfig& cfg = model.enc_cfg;
  const int W = static_cast<int>(embedded.cols());
  const int P = cfg.pieces;
  const int win = 2 * cfg.window + 1;
  const Eigen::Index T = embedded.rows();
  EncodeCache cache;
  Eigen::MatrixXd x = embedded;
  for (int d = 0; d < cfg.depth; ++d) {
    ConvLayerCache layer;
    layer.input = x;
    // Window-concatenated inputs with zero padding at the boundaries.
    Eigen::MatrixXd windows = Eigen::MatrixXd::Zero(T, win * W);
    for (Eigen::Index r = 0; r < T; ++r)
      for (int o = -cfg.window; o <= cfg.window; ++o) {
        Eigen::Index rr = r + o;
        if (rr < 0 || rr >= T) continue;
        windows.row(r).segment((o + cfg.window) * W, W) = x.row(rr);
      }
    layer.pre_pool.noalias() =
        windows * model.params[model.conv_w[d]].transpose();
    layer.pre_pool.rowwise() +=
        model.params[model.conv_b[d]].col(0).transpose();
    layer.pool_arg.resize(T, W);
    Eigen::MatrixXd pooled(T, W);
    for (Eigen::Index r = 0; r < T; ++r)
      for (int w = 0; w < W; ++w) {
        int best_p = 0;
        double best = layer.pre_pool(r, w);
        for (int p = 1; p < P; ++p)
          if (layer.pre_pool(r, p * W + w) > best) {
            best = layer.pre_pool(r, p * W + w);
            best_p = p;
          }
        layer.pool_arg(r, w) = best_p;
        pooled(r, w) = best;
      }
    x = x + pooled;  // residual
    cache.layers.push_back(std::move(layer));
  }
  cache.out = std::move(x);
  return cache;
}

long encode_call_count() { return g_encode_calls.load(); }

Eigen::MatrixXd embed(const std::vector<TokenSpan>& tokens,
                      const NerModel& model) {
  return embed_forward(tokens, model).out;
}

Eigen::MatrixXd encode(const Eigen::MatrixXd& embedded, const NerModel& model) {
  return encode_forward(embedded, model).out;
}

Eigen::MatrixXd precompute_state_features(const Eigen::MatrixXd& encoded,
                                          const NerModel& model) {
  Eigen::MatrixXd out =
      encoded * model.params[model.state_w].transpose();
  out.rowwise() += model.params[model.state_b].col(0).transpose();
  return out;
}

namespace {

Eigen::VectorXd state_feature_sum(const Eigen::MatrixXd& state_features,
                                  int current, int last_entity, int previous) {
  Eigen::VectorXd fsum = Eigen::VectorXd::Zero(state_features.cols());
  if (current != kSentinel) fsum += state_features.row(current).transpose();
  if (last_entity != kSentinel) fsum += state_features.row(last_entity).transpose();
  if (previous != kSentinel) fsum += state_features.row(previous).transpose();
  return fsum;
}

std::vector<int> legal_ids(const ParserState& state, std::size_t n_tokens,
                           std::size_t n_labels) {
  std::vector<int> out;
  const int n = action_count(n_labels);
  for (int id = 0; id < n; ++id)
    if (is_legal(state, transition_from_id(id), n_tokens, n_labels))
      out.push_back(id);
  return out;
}

}  // namespace

SentenceForward forward_teacher(const std::vector<TokenSpan>& tokens,
                                const std::vector<Transition>& gold,
                                const NerModel& model) {
  SentenceForward f;
  f.tokens = tokens;
  if (tokens.empty()) return f;
  f.embed = embed_forward(tokens, model);
  f.encode = encode_forward(f.embed.out, model);
  f.state_features = precompute_state_features(f.encode.out, model);

  const auto& Aw = model.params[model.action_w];
  const auto& Ab = model.params[model.action_b];
  ParserState state;
  for (const Transition& t : gold) {
    StepCache step;
    step.current = static_cast<int>(state.position);
    step.last_entity = state.last_entity_start;
    step.previous = state.position > 0 ? static_cast<int>(state.position) - 1
                                       : kSentinel;
    step.legal = legal_ids(state, tokens.size(), model.labels.size());
    const int gold_id = transition_id(t);
    auto it = std::find(step.legal.begin(), step.legal.end(), gold_id);
    if (it == step.legal.end())
      throw Error("gold transition is illegal at position " +
                  std::to_string(state.position));
    step.gold_pos = static_cast<int>(it - step.legal.begin());

    Eigen::VectorXd fsum = state_feature_sum(f.state_features, step.current,
                                             step.last_entity, step.previous);
    Eigen::VectorXd logits(step.legal.size());
    for (std::size_t k = 0; k < step.legal.size(); ++k)
      logits(static_cast<Eigen::Index>(k)) =
          Aw.row(step.legal[k]).dot(fsum) + Ab(step.legal[k], 0);
    const double mx = logits.maxCoeff();
    Eigen::VectorXd ex = (logits.array() - mx).exp();
    step.probs = ex / ex.sum();
    f.loss += -std::log(std::max(step.probs(step.gold_pos), 1e-300));
    f.steps.push_back(std::move(step));
    apply(state, t);
  }
  return f;
}

double backward(const SentenceForward& f, const NerModel& model,
                ParamSet& grads) {
  if (f.tokens.empty()) return 0.0;
  const EmbedConfig& ec = model.embed_cfg;
  const EncoderConfig& cc = model.enc_cfg;
  const int W = ec.width, P = ec.pieces, K = ec.n_embed;
  const Eigen::Index T = static_cast<Eigen::Index>(f.tokens.size());

  const auto& Aw = model.params[model.action_w];
  Eigen::MatrixXd d_state = Eigen::MatrixXd::Zero(T, W);

  for (const StepCache& step : f.steps) {
    Eigen::VectorXd fsum = state_feature_sum(f.state_features, step.current,
                                             step.last_entity, step.previous);
    Eigen::VectorXd dlogits = step.probs;
    dlogits(step.gold_pos) -= 1.0;
    Eigen::VectorXd dfsum = Eigen::VectorXd::Zero(W);
    for (std::size_t k = 0; k < step.legal.size(); ++k) {
      const double g = dlogits(static_cast<Eigen::Index>(k));
      if (g == 0.0) continue;
      grads[model.action_w].row(step.legal[k]) += g * fsum.transpose();
      grads[model.action_b](step.legal[k], 0) += g;
      dfsum += g * Aw.row(step.legal[k]).transpose();
    }
    if (step.current != kSentinel) d_state.row(step.current) += dfsum.transpose();
    if (step.last_entity != kSentinel)
      d_state.row(step.last_entity) += dfsum.transpose();
    if (step.previous != kSentinel)
      d_state.row(step.previous) += dfsum.transpose();
  }

  // State-feature dense layer.
  Eigen::MatrixXd d_encoded(T, W);
  grads[model.state_w].noalias() += d_state.transpose() * f.encode.out;
  grads[model.state_b].col(0) += d_state.colwise().sum().transpose();
  d_encoded.noalias() = d_state * model.params[model.state_w];

  // Encoder layers, in reverse.
  Eigen::MatrixXd d_out = std::move(d_encoded);
  for (int d = cc.depth - 1; d >= 0; --d) {
    const ConvLayerCache& layer = f.encode.layers[d];
    Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(T, P * W);
    for (Eigen::Index r = 0; r < T; ++r)
      for (int w = 0; w < W; ++w)
        ds(r, layer.pool_arg(r, w) * W + w) = d_out(r, w);
    const int win = 2 * cc.window + 1;
    Eigen::MatrixXd windows = Eigen::MatrixXd::Zero(T, win * W);
    for (Eigen::Index r = 0; r < T; ++r)
      for (int o = -cc.window; o <= cc.window; ++o) {
        Eigen::Index rr = r + o;
        if (rr < 0 || rr >= T) continue;
        windows.row(r).segment((o + cc.window) * W, W) = layer.input.row(rr);
      }
    grads[model.conv_w[d]].noalias() += ds.transpose() * windows;
    grads[model.conv_b[d]].col(0) += ds.colwise().sum().transpose();
    Eigen::MatrixXd d_windows = ds * model.params[model.conv_w[d]];
    Eigen::MatrixXd d_in = d_out;  // residual path
    for (Eigen::Index r = 0; r < T; ++r)
      for (int o = -cc.window; o <= cc.window; ++o) {
        Eigen::Index rr = r + o;
        if (rr < 0 || rr >= T) continue;
        d_in.row(rr) += d_windows.row(r).segment((o + cc.window) * W, W);
      }
    d_out = std::move(d_in);
  }

  // Layer norm.
  const auto& gain = model.params[model.ln_gain].col(0);
  Eigen::MatrixXd d_pooled(T, W);
  for (Eigen::Index r = 0; r < T; ++r) {
    Eigen::RowVectorXd d_normed =
        d_out.row(r).cwiseProduct(gain.transpose());
    grads[model.ln_gain].col(0) +=
        d_out.row(r).cwiseProduct(f.embed.normed.row(r)).transpose();
    grads[model.ln_bias].col(0) += d_out.row(r).transpose();
    const double m1 = d_normed.mean();
    const double m2 = d_normed.cwiseProduct(f.embed.normed.row(r)).mean();
    d_pooled.row(r) =
        f.embed.inv_std(r) *
        (d_normed.array() - m1 - f.embed.normed.row(r).array() * m2);
  }

  // Embedding maxout + dense layers + tables.
  Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(T, P * W);
  for (Eigen::Index r = 0; r < T; ++r)
    for (int w = 0; w < W; ++w)
      ds(r, f.embed.pool_arg(r, w) * W + w) = d_pooled(r, w);
  Eigen::MatrixXd d_concat = Eigen::MatrixXd::Zero(T, K * W);
  for (int k = 0; k < K; ++k) {
    grads[model.embed_dense_w[k]].noalias() += ds.transpose() * f.embed.concat;
    grads[model.embed_dense_b[k]].col(0) += ds.colwise().sum().transpose();
    d_concat.noalias() += ds * model.params[model.embed_dense_w[k]];
  }
  for (Eigen::Index r = 0; r < T; ++r)
    for (int k = 0; k < K; ++k)
      grads[model.tables[k]].row(f.embed.buckets(r, k)) +=
          d_concat.row(r).segment(k * W, W);

  return f.loss;
}

std::vector<Span> parse(const std::vector<TokenSpan>& tokens,
                        const NerModel& model) {
  if (tokens.empty()) return {};
  Eigen::MatrixXd embedded = embed(tokens, model);
  Eigen::MatrixXd encoded = encode(embedded, model);
  Eigen::MatrixXd state_features = precompute_state_features(encoded, model);

  const auto& Aw = model.params[model.action_w];
  const auto& Ab = model.params[model.action_b];
  ParserState state;
  std::vector<Transition> chosen;
  while (state.position < tokens.size()) {
    const int current = static_cast<int>(state.position);
    const int previous = state.position > 0
                             ? static_cast<int>(state.position) - 1
                             : kSentinel;
    Eigen::VectorXd fsum = state_feature_sum(state_features, current,
                                             state.last_entity_start, previous);
    std::vector<int> legal = legal_ids(state, tokens.size(), model.labels.size());
    int best_id = legal.front();
    double best = -std::numeric_limits<double>::infinity();
    for (int id : legal) {
      double score = Aw.row(id).dot(fsum) + Ab(id, 0);
      if (score > best) {
        best = score;
        best_id = id;
      }
    }
    Transition t = transition_from_id(best_id);
    chosen.push_back(t);
    apply(state, t);
  }
  return decode_transitions(tokens, chosen, model.labels);
}

}  // namespace nersynth::ner
