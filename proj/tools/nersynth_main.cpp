#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nersynth/align.hpp"
#include "nersynth/config.hpp"
#include "nersynth/corpus.hpp"
#include "nersynth/infill.hpp"
#include "nersynth/ner/train.hpp"
#include "nersynth/pipeline.hpp"
#include "nersynth/project.hpp"
#include "nersynth/segment.hpp"
#include "nersynth/stats.hpp"

using namespace nersynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitStageFailure = 2;

std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

std::vector<std::pair<std::string, AlignmentMatrix>> read_alignments(
    const std::string& path) {
  std::vector<std::pair<std::string, AlignmentMatrix>> out;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines_file(path)) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(AlignmentMatrix::from_jsonl_line(line, lineno));
  }
  return out;
}

SurrogatePool pool_from_args(const std::vector<std::string>& pool_args) {
  SurrogatePool pool = SurrogatePool::builtin_german();
  for (const std::string& spec : pool_args) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--pool expects CATEGORY=path, got: " + spec);
    pool.load_list(mask_category_from_string(spec.substr(0, eq)),
                   spec.substr(eq + 1));
  }
  return pool;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nersynth: cross-lingual NER corpus synthesis and training"};
  app.require_subcommand(1);

  // ---- infill ----
  auto* cmd_infill = app.add_subcommand(
      "infill", "Replace anonymization masks with surrogate values");
  std::string in_path, out_path, report_path, patterns_path;
  std::vector<std::string> pool_args;
  std::uint64_t seed = 42;
  cmd_infill->add_option("-i,--input", in_path)->required();
  cmd_infill->add_option("-o,--output", out_path)->required();
  cmd_infill->add_option("--report", report_path);
  cmd_infill->add_option("--patterns", patterns_path);
  cmd_infill->add_option("--pool", pool_args, "CATEGORY=path, repeatable");
  cmd_infill->add_option("--seed", seed);

  // ---- split ----
  auto* cmd_split = app.add_subcommand(
      "split", "Split documents into sentences, dropping unannotated ones");
  std::string abbrev_path;
  bool keep_unannotated = false;
  cmd_split->add_option("-i,--input", in_path)->required();
  cmd_split->add_option("-o,--output", out_path)->required();
  cmd_split->add_option("--abbreviations", abbrev_path);
  cmd_split->add_flag("--keep-unannotated", keep_unannotated);

  // ---- align ----
  auto* cmd_align = app.add_subcommand(
      "align", "Train IBM-2 style alignments over parallel sentences");
  std::string src_path, tgt_path, align_out;
  int iterations = 5;
  double tension = 4.0, p_null = 0.08;
  cmd_align->add_option("--src", src_path, "source JSONL")->required();
  cmd_align->add_option("--tgt", tgt_path, "target text, one line per sentence")
      ->required();
  cmd_align->add_option("-o,--output", align_out,
                        "output prefix (.pharaoh/.jsonl)")
      ->required();
  cmd_align->add_option("--iterations", iterations);
  cmd_align->add_option("--tension", tension);
  cmd_align->add_option("--p-null", p_null);

  // ---- filter ----
  auto* cmd_filter = app.add_subcommand(
      "filter", "Discard pairs whose alignment strays from the diagonal");
  std::string alignments_path, rejections_path, out_prefix;
  double threshold = 1.8;
  cmd_filter->add_option("--src", src_path)->required();
  cmd_filter->add_option("--tgt", tgt_path)->required();
  cmd_filter->add_option("--alignments", alignments_path)->required();
  cmd_filter->add_option("-o,--output", out_prefix,
                         "output prefix (_src.jsonl/_tgt.txt/_alignments.jsonl)")
      ->required();
  cmd_filter->add_option("--rejections", rejections_path);
  cmd_filter->add_option("-t,--threshold", threshold);

  // ---- project ----
  auto* cmd_project = app.add_subcommand(
      "project", "Project source spans onto target sentences");
  std::string drops_path;
  cmd_project->add_option("--src", src_path)->required();
  cmd_project->add_option("--tgt", tgt_path)->required();
  cmd_project->add_option("--alignments", alignments_path)->required();
  cmd_project->add_option("-o,--output", out_path)->required();
  cmd_project->add_option("--drops", drops_path);

  // ---- stats ----
  auto* cmd_stats = app.add_subcommand("stats", "Corpus statistics");
  bool stats_tsv = false;
  cmd_stats->add_option("-i,--input", in_path)->required();
  cmd_stats->add_flag("--tsv", stats_tsv);

  // ---- train ----
  auto* cmd_train = app.add_subcommand("train", "Train the NER model");
  std::string model_path, log_path, split_spec = "0.8,0.1,0.1";
  ner::TrainConfig tc;
  ner::EmbedConfig ec;
  ner::EncoderConfig cc;
  cmd_train->add_option("-i,--input", in_path)->required();
  cmd_train->add_option("-o,--model", model_path)->required();
  cmd_train->add_option("--log", log_path);
  cmd_train->add_option("--lr", tc.learning_rate);
  cmd_train->add_option("--beta1", tc.beta1);
  cmd_train->add_option("--beta2", tc.beta2);
  cmd_train->add_option("--split", split_spec, "train,dev,test fractions");
  cmd_train->add_option("--eval-every", tc.eval_every);
  cmd_train->add_option("--max-iter", tc.max_iterations);
  cmd_train->add_option("--batch-size", tc.batch_size);
  cmd_train->add_option("--seed", tc.seed);
  cmd_train->add_option("--width", ec.width);
  cmd_train->add_option("--rows", ec.rows);
  cmd_train->add_option("--depth", cc.depth);

  // ---- eval ----
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate a trained model");
  bool eval_tsv = false;
  cmd_eval->add_option("-m,--model", model_path)->required();
  cmd_eval->add_option("-i,--input", in_path)->required();
  cmd_eval->add_flag("--tsv", eval_tsv);

  // ---- pipeline ----
  auto* cmd_pipeline =
      app.add_subcommand("pipeline", "Run the full synthesis pipeline");
  std::string config_path, output_dir, translations;
  double pipe_threshold = -1.0;
  std::int64_t pipe_seed = -1;
  cmd_pipeline->add_option("-c,--config", config_path);
  cmd_pipeline->add_option("-i,--input", in_path);
  cmd_pipeline->add_option("--output-dir", output_dir);
  cmd_pipeline->add_option("--translations", translations);
  cmd_pipeline->add_option("--threshold", pipe_threshold);
  cmd_pipeline->add_option("--seed", pipe_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_infill) {
      auto patterns = patterns_path.empty() ? default_mask_patterns()
                                            : load_mask_patterns(patterns_path);
      SurrogatePool pool = pool_from_args(pool_args);
      std::vector<AnnotatedText> out_docs;
      std::string report = "doc_id\tcategory\tstart\tend\treplacement_length\n";
      for (const AnnotatedText& doc : read_jsonl(in_path)) {
        auto [result, rep] = infill_document(doc, patterns, pool, seed);
        out_docs.push_back(std::move(result));
        for (const InfillRecord& r : rep.records)
          report += r.doc_id + "\t" + to_string(r.category) + "\t" +
                    std::to_string(r.original_start) + "\t" +
                    std::to_string(r.original_end) + "\t" +
                    std::to_string(r.replacement_length) + "\n";
      }
      write_jsonl(out_path, out_docs);
      if (!report_path.empty()) write_file(report_path, report);
    } else if (*cmd_split) {
      SplitConfig cfg = abbrev_path.empty() ? SplitConfig::builtin_german()
                                            : SplitConfig::load(abbrev_path);
      std::vector<AnnotatedText> sentences;
      for (const AnnotatedText& doc : read_jsonl(in_path))
        for (AnnotatedText& s : split_sentences(doc, cfg))
          sentences.push_back(std::move(s));
      if (!keep_unannotated) sentences = drop_unannotated(sentences);
      write_jsonl(out_path, sentences);
    } else if (*cmd_align) {
      std::vector<AnnotatedText> src = read_jsonl(src_path);
      std::vector<ParallelPair> pairs =
          make_pairs(src, read_lines_file(tgt_path));
      EmTrainResult em = em_train(pairs, iterations, tension, p_null);
      std::string pharaoh, matrix_jsonl;
      for (const ParallelPair& p : pairs) {
        AlignmentMatrix A = decode(p, em.table);
        pharaoh += A.to_pharaoh() + "\n";
        matrix_jsonl += A.to_jsonl_line(p.pair_id) + "\n";
      }
      write_file(align_out + ".pharaoh", pharaoh);
      write_file(align_out + ".jsonl", matrix_jsonl);
    } else if (*cmd_filter) {
      std::vector<AnnotatedText> src = read_jsonl(src_path);
      std::vector<std::string> tgt = read_lines_file(tgt_path);
      auto alignments = read_alignments(alignments_path);
      std::vector<ParallelPair> pairs = make_pairs(src, tgt);
      if (alignments.size() != pairs.size())
        throw LineCountMismatch("alignment count does not match pair count");
      std::vector<AnnotatedText> kept_src;
      std::string kept_tgt, kept_align, rejections = "pair_id\tscore\n";
      char buf[64];
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        double score = filter_score(alignments[k].second);
        if (score > threshold) {
          std::snprintf(buf, sizeof buf, "%.6f", score);
          rejections += pairs[k].pair_id + "\t" + buf + "\n";
          continue;
        }
        kept_src.push_back(pairs[k].source);
        kept_tgt += pairs[k].target.text + "\n";
        kept_align += alignments[k].second.to_jsonl_line(pairs[k].pair_id) + "\n";
      }
      write_jsonl(out_prefix + "_src.jsonl", kept_src);
      write_file(out_prefix + "_tgt.txt", kept_tgt);
      write_file(out_prefix + "_alignments.jsonl", kept_align);
      if (!rejections_path.empty()) write_file(rejections_path, rejections);
    } else if (*cmd_project) {
      std::vector<AnnotatedText> src = read_jsonl(src_path);
      std::vector<std::string> tgt = read_lines_file(tgt_path);
      auto alignments = read_alignments(alignments_path);
      std::vector<ParallelPair> pairs = make_pairs(src, tgt);
      if (alignments.size() != pairs.size())
        throw LineCountMismatch("alignment count does not match pair count");
      std::vector<AnnotatedText> projected;
      std::string drops = "pair_id\tlabel\tstart\tend\treason\n";
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        ProjectionResult r = project_spans(pairs[k], alignments[k].second);
        for (const DroppedSpan& d : r.dropped_spans)
          drops += pairs[k].pair_id + "\t" + d.source_span.label + "\t" +
                   std::to_string(d.source_span.start) + "\t" +
                   std::to_string(d.source_span.end) + "\t" +
                   to_string(d.reason) + "\n";
        if (!r.target.spans.empty()) projected.push_back(std::move(r.target));
      }
      write_jsonl(out_path, projected);
      if (!drops_path.empty()) write_file(drops_path, drops);
    } else if (*cmd_stats) {
      CorpusStats s = compute_stats(read_jsonl(in_path));
      std::cout << format_stats(s, stats_tsv);
    } else if (*cmd_train) {
      std::istringstream ss(split_spec);
      std::string part;
      std::vector<double> fracs;
      while (std::getline(ss, part, ',')) fracs.push_back(std::stod(part));
      if (fracs.size() != 3 ||
          std::abs(fracs[0] + fracs[1] + fracs[2] - 1.0) > 1e-9)
        throw ConfigError("--split expects three fractions summing to 1");
      tc.train_fraction = fracs[0];
      tc.dev_fraction = fracs[1];
      std::vector<AnnotatedText> dataset = read_jsonl(in_path);
      LabelSet labels;
      ner::TrainResult r = ner::train(dataset, tc, ec, cc, labels);
      r.model.save(model_path);
      if (!log_path.empty()) ner::write_training_log_csv(log_path, r.log);
      std::printf("best validation F1 %.2f at iteration %d\n", r.best_f1,
                  r.best_iteration);
    } else if (*cmd_eval) {
      ner::NerModel model = ner::NerModel::load(model_path);
      ner::EvalResult r = ner::evaluate(model, read_jsonl(in_path));
      std::cout << ner::format_eval_table(r, eval_tsv);
    } else if (*cmd_pipeline) {
      if (config_path.empty())
        if (const char* env = std::getenv(kConfigEnvVar)) config_path = env;
      PipelineConfig cfg = config_path.empty()
                               ? PipelineConfig::from_flat(FlatConfig{})
                               : PipelineConfig::from_file(config_path);
      // Flags override config file values.
      if (!in_path.empty()) {
        cfg.input_path = in_path;
        cfg.raw.set("input", in_path);
      }
      if (!output_dir.empty()) {
        cfg.output_dir = output_dir;
        cfg.raw.set("output_dir", output_dir);
      }
      if (!translations.empty()) {
        cfg.translations_path = translations;
        cfg.raw.set("translations", translations);
      }
      if (pipe_threshold > 0.0) {
        cfg.filter_threshold = pipe_threshold;
        cfg.raw.set("filter.threshold", std::to_string(pipe_threshold));
      }
      if (pipe_seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(pipe_seed);
        cfg.raw.set("seed", std::to_string(pipe_seed));
      }
      run_pipeline(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
  return kExitOk;
}
