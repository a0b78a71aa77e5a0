#include "nersynth/ner/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "nersynth/ner/transitions.hpp"

namespace nersynth::ner {

using json = nlohmann::ordered_json;

int ParamSet::add(const std::string& name, Eigen::Index rows,
                  Eigen::Index cols) {
  tensors.push_back({name, Eigen::MatrixXd::Zero(rows, cols)});
  return static_cast<int>(tensors.size()) - 1;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  out.tensors.reserve(tensors.size());
  for (const Tensor& t : tensors)
    out.tensors.push_back(
        {t.name, Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols())});
  return out;
}

void ParamSet::set_zero() {
  for (Tensor& t : tensors) t.value.setZero();
}

bool ParamSet::all_finite() const {
  for (const Tensor& t : tensors)
    if (!t.value.allFinite()) return false;
  return true;
}

int NerModel::n_actions() const { return action_count(labels.size()); }

namespace {

void xavier_init(Eigen::MatrixXd& m, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
}

}  // namespace

NerModel NerModel::init(const EmbedConfig& ec, const EncoderConfig& cc,
                        const LabelSet& labels, std::uint64_t seed) {
  NerModel m;
  m.embed_cfg = ec;
  m.enc_cfg = cc;
  m.labels = labels;
  if (ec.seeds.size() < static_cast<std::size_t>(ec.n_embed))
    throw ConfigError("embed config needs one hash seed per feature");

  const int W = ec.width, P = ec.pieces, K = ec.n_embed;
  for (int k = 0; k < K; ++k)
    m.tables.push_back(m.params.add("table_" + std::to_string(k), ec.rows, W));
  for (int k = 0; k < K; ++k) {
    m.embed_dense_w.push_back(
        m.params.add("embed_dense_w_" + std::to_string(k), P * W, K * W));
    m.embed_dense_b.push_back(
        m.params.add("embed_dense_b_" + std::to_string(k), P * W, 1));
  }
  m.ln_gain = m.params.add("ln_gain", W, 1);
  m.ln_bias = m.params.add("ln_bias", W, 1);
  const int win = 2 * cc.window + 1;
  for (int d = 0; d < cc.depth; ++d) {
    m.conv_w.push_back(
        m.params.add("conv_w_" + std::to_string(d), cc.pieces * W, win * W));
    m.conv_b.push_back(
        m.params.add("conv_b_" + std::to_string(d), cc.pieces * W, 1));
  }
  m.state_w = m.params.add("state_w", W, W);
  m.state_b = m.params.add("state_b", W, 1);
  m.action_w = m.params.add("action_w", m.n_actions(), W);
  m.action_b = m.params.add("action_b", m.n_actions(), 1);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> table_u(-0.1, 0.1);
  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXd& t = m.params[m.tables[k]];
    for (Eigen::Index c = 0; c < t.cols(); ++c)
      for (Eigen::Index r = 0; r < t.rows(); ++r) t(r, c) = table_u(rng);
    xavier_init(m.params[m.embed_dense_w[k]], rng);
  }
  m.params[m.ln_gain].setOnes();
  for (int d = 0; d < cc.depth; ++d) xavier_init(m.params[m.conv_w[d]], rng);
  xavier_init(m.params[m.state_w], rng);
  xavier_init(m.params[m.action_w], rng);
  return m;
}

void NerModel::save(const std::string& path) const {
  json j;
  j["format"] = "nersynth-ner-model-v1";
  j["embed"] = {{"n_embed", embed_cfg.n_embed},
                {"rows", embed_cfg.rows},
                {"width", embed_cfg.width},
                {"pieces", embed_cfg.pieces},
                {"seeds", embed_cfg.seeds}};
  j["encoder"] = {{"depth", enc_cfg.depth},
                  {"window", enc_cfg.window},
                  {"pieces", enc_cfg.pieces}};
  j["labels"] = labels.labels;
  json tensors = json::object();
  for (const Tensor& t : params.tensors) {
    json tj;
    tj["rows"] = t.value.rows();
    tj["cols"] = t.value.cols();
    std::vector<double> data(t.value.data(), t.value.data() + t.value.size());
    tj["data"] = data;  // column-major
    tensors[t.name] = std::move(tj);
  }
  j["tensors"] = std::move(tensors);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path);
  out << j.dump();
}

NerModel NerModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("model file: ") + e.what());
  }
  if (j.value("format", std::string{}) != "nersynth-ner-model-v1")
    throw Error("unrecognized model format in " + path);
  EmbedConfig ec;
  ec.n_embed = j["embed"]["n_embed"].get<int>();
  ec.rows = j["embed"]["rows"].get<int>();
  ec.width = j["embed"]["width"].get<int>();
  ec.pieces = j["embed"]["pieces"].get<int>();
  ec.seeds = j["embed"]["seeds"].get<std::vector<std::uint64_t>>();
  EncoderConfig cc;
  cc.depth = j["encoder"]["depth"].get<int>();
  cc.window = j["encoder"]["window"].get<int>();
  cc.pieces = j["encoder"]["pieces"].get<int>();
  LabelSet labels;
  labels.labels = j["labels"].get<std::vector<std::string>>();
  NerModel m = NerModel::init(ec, cc, labels, 0);
  for (Tensor& t : m.params.tensors) {
    const json& tj = j["tensors"].at(t.name);
    if (tj["rows"].get<Eigen::Index>() != t.value.rows() ||
        tj["cols"].get<Eigen::Index>() != t.value.cols())
      throw DimensionMismatch("tensor " + t.name + " has unexpected shape");
    std::vector<double> data = tj["data"].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != t.value.size())
      throw DimensionMismatch("tensor " + t.name + " has unexpected size");
    std::copy(data.begin(), data.end(), t.value.data());
  }
  return m;
}

}  // namespace nersynth::ner
