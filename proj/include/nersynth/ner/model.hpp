#ifndef NERSYNTH_NER_MODEL_HPP
#define NERSYNTH_NER_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nersynth/corpus.hpp"

namespace nersynth::ner {

struct EmbedConfig {
  int n_embed = 4;    // feature sub-tables: lowercase, prefix, suffix, shape
  int rows = 2000;    // hash buckets per table
  int width = 96;     // embedding dimension
  int pieces = 3;     // maxout pieces
  std::vector<std::uint64_t> seeds = {0x9E3779B97F4A7C15ULL, 0xC2B2AE3D27D4EB4FULL,
                                      0x165667B19E3779F9ULL, 0x27D4EB2F165667C5ULL};
};

struct EncoderConfig {
  int depth = 4;
  int window = 1;  // tokens of context per side and layer
  int pieces = 3;
};

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double train_fraction = 0.8;
  double dev_fraction = 0.1;  // test gets the remainder
  int eval_every = 200;
  int max_iterations = 2000;
  int batch_size = 8;
  std::uint64_t seed = 1;
};

struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
};

// Flat named-tensor store; gradients and Adam moments reuse the same layout.
struct ParamSet {
  std::vector<Tensor> tensors;

  int add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Eigen::MatrixXd& operator[](int idx) { return tensors[idx].value; }
  const Eigen::MatrixXd& operator[](int idx) const { return tensors[idx].value; }
  ParamSet zeros_like() const;
  void set_zero();
  bool all_finite() const;
};

struct NerModel {
  EmbedConfig embed_cfg;
  EncoderConfig enc_cfg;
  LabelSet labels;
  ParamSet params;

  // Tensor handles into params.
  std::vector<int> tables;         // n_embed of rows x width
  std::vector<int> embed_dense_w;  // n_embed of (pieces*width) x (n_embed*width)
  std::vector<int> embed_dense_b;  // n_embed of (pieces*width) x 1
  int ln_gain = -1, ln_bias = -1;  // width x 1
  std::vector<int> conv_w;         // depth of (pieces*width) x ((2*window+1)*width)
  std::vector<int> conv_b;         // depth of (pieces*width) x 1
  int state_w = -1, state_b = -1;  // width x width, width x 1
  int action_w = -1, action_b = -1;  // n_actions x width, n_actions x 1

  int n_actions() const;

  static NerModel init(const EmbedConfig& ec, const EncoderConfig& cc,
                       const LabelSet& labels, std::uint64_t seed);

  void save(const std::string& path) const;
  static NerModel load(const std::string& path);
};

}  // namespace nersynth::ner

#endif
