#ifndef NERSYNTH_NER_NETWORK_HPP
#define NERSYNTH_NER_NETWORK_HPP

#include <vector>

#include <Eigen/Dense>

#include "nersynth/ner/model.hpp"
#include "nersynth/ner/transitions.hpp"

namespace nersynth::ner {

// Hash-feature extraction. One bucket per (token, feature).
std::vector<std::string> token_features(const std::string& surface);
Eigen::MatrixXi feature_buckets(const std::vector<TokenSpan>& tokens,
                                const EmbedConfig& cfg);

struct EmbedCache {
  Eigen::MatrixXi buckets;   // tokens x n_embed
  Eigen::MatrixXd concat;    // tokens x (n_embed*width)
  Eigen::MatrixXd pre_pool;  // tokens x (pieces*width)
  Eigen::MatrixXi pool_arg;  // tokens x width
  Eigen::MatrixXd pooled;    // tokens x width
  Eigen::VectorXd mean, inv_std;
  Eigen::MatrixXd normed;  // tokens x width
  Eigen::MatrixXd out;     // tokens x width
};

struct ConvLayerCache {
  Eigen::MatrixXd input;     // tokens x width
  Eigen::MatrixXd pre_pool;  // tokens x (pieces*width)
  Eigen::MatrixXi pool_arg;  // tokens x width
};

struct EncodeCache {
  std::vector<ConvLayerCache> layers;
  Eigen::MatrixXd out;  // tokens x width
};

// Per-transition scoring record captured during teacher forcing.
struct StepCache {
  int current = kSentinel;
  int last_entity = kSentinel;
  int previous = kSentinel;
  std::vector<int> legal;     // legal transition ids
  Eigen::VectorXd probs;      // softmax over `legal`
  int gold_pos = -1;          // index into `legal`
};

struct SentenceForward {
  std::vector<TokenSpan> tokens;
  EmbedCache embed;
  EncodeCache encode;
  Eigen::MatrixXd state_features;  // tokens x width
  std::vector<StepCache> steps;
  double loss = 0.0;  // summed over steps
};

Eigen::MatrixXd embed(const std::vector<TokenSpan>& tokens,
                      const NerModel& model);
Eigen::MatrixXd encode(const Eigen::MatrixXd& embedded, const NerModel& model);
Eigen::MatrixXd precompute_state_features(const Eigen::MatrixXd& encoded,
                                          const NerModel& model);

// Cached variants used by training.
EmbedCache embed_forward(const std::vector<TokenSpan>& tokens,
                         const NerModel& model);
EncodeCache encode_forward(const Eigen::MatrixXd& embedded,
                           const NerModel& model);

// Counts encode invocations; used to verify the precompute contract.
long encode_call_count();

// Teacher-forced forward pass over a gold transition sequence.
SentenceForward forward_teacher(const std::vector<TokenSpan>& tokens,
                                const std::vector<Transition>& gold,
                                const NerModel& model);

// Accumulates gradients for one sentence into `grads` (same layout as
// model.params). Returns the summed loss.
double backward(const SentenceForward& fwd, const NerModel& model,
                ParamSet& grads);

// Greedy decoding; runs the encoder exactly once per sentence.
std::vector<Span> parse(const std::vector<TokenSpan>& tokens,
                        const NerModel& model);

}  // namespace nersynth::ner

#endif
