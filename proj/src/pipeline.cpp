#include "nersynth/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nersynth/align.hpp"
#include "nersynth/corpus.hpp"
#include "nersynth/infill.hpp"
#include "nersynth/project.hpp"
#include "nersynth/segment.hpp"
#include "nersynth/stats.hpp"

namespace nersynth {

namespace fs = std::filesystem;

namespace {

struct StageError : Error {
  StageError(const std::string& stage, const std::string& what)
      : Error("[" + stage + "] " + what) {}
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::vector<std::string> read_lines(const std::string& path) {
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

}  // namespace

PipelineOutcome run_pipeline(const PipelineConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  write_text(out / "config.resolved", config.raw.dump());

  // -------- infill --------
  std::vector<AnnotatedText> corpus;
  std::vector<MaskPattern> patterns =
      config.mask_patterns_path ? load_mask_patterns(*config.mask_patterns_path)
                                : default_mask_patterns();
  SurrogatePool pool = SurrogatePool::builtin_german();
  for (const auto& [cat, path] : config.pool_paths)
    pool.load_list(mask_category_from_string(cat), path);

  std::vector<AnnotatedText> infilled;
  std::string infill_report_tsv = "doc_id\tcategory\tstart\tend\treplacement_length\n";
  try {
    corpus = read_jsonl(config.input_path);
    for (const AnnotatedText& doc : corpus) {
      auto [result, report] = infill_document(doc, patterns, pool, config.seed);
      infilled.push_back(std::move(result));
      for (const InfillRecord& r : report.records)
        infill_report_tsv += r.doc_id + "\t" + to_string(r.category) + "\t" +
                             std::to_string(r.original_start) + "\t" +
                             std::to_string(r.original_end) + "\t" +
                             std::to_string(r.replacement_length) + "\n";
    }
  } catch (const Error& e) {
    throw StageError("infill", e.what());
  }
  write_jsonl((out / "01_infilled.jsonl").string(), infilled);
  write_text(out / "01_infill_report.tsv", infill_report_tsv);

  // -------- split / exclude / drop --------
  std::vector<AnnotatedText> sentences;
  std::string drop_tsv = "doc_id\tsent_id\treason\tspan_count\n";
  try {
    SplitConfig split_cfg = config.abbreviations_path
                                ? SplitConfig::load(*config.abbreviations_path)
                                : SplitConfig::builtin_german();
    std::vector<AnnotatedText> all;
    for (const AnnotatedText& doc : infilled)
      for (AnnotatedText& s : split_sentences(doc, split_cfg))
        all.push_back(std::move(s));
    all = exclude_labels(all, config.exclude);
    for (const AnnotatedText& s : all)
      if (s.spans.empty())
        drop_tsv += s.doc_id + "\t" +
                    (s.sent_id ? std::to_string(*s.sent_id) : "-") +
                    "\tunannotated\t0\n";
    sentences = drop_unannotated(all);
  } catch (const Error& e) {
    throw StageError("split", e.what());
  }
  write_jsonl((out / "02_sentences.jsonl").string(), sentences);
  write_text(out / "02_dropped_sentences.tsv", drop_tsv);

  // -------- export for external translation --------
  std::string export_text;
  for (const AnnotatedText& s : sentences) export_text += s.text + "\n";
  const fs::path export_path = out / "03_export_src.txt";
  write_text(export_path, export_text);

  PipelineOutcome outcome;
  outcome.export_path = export_path.string();
  if (!config.translations_path) {
    std::cerr << "pipeline paused: translate " << export_path.string()
              << " and rerun with the translations file configured\n";
    return outcome;
  }

  // -------- align --------
  std::vector<ParallelPair> pairs;
  std::vector<AlignmentMatrix> matrices;
  try {
    std::vector<std::string> translations = read_lines(*config.translations_path);
    if (translations.size() != sentences.size())
      throw LineCountMismatch(
          "exported " + std::to_string(sentences.size()) +
          " sentences but translations file has " +
          std::to_string(translations.size()) + " lines");
    pairs = make_pairs(sentences, translations);
    EmTrainResult em = em_train(pairs, config.align_iterations,
                                config.align_tension, config.align_p_null);
    std::string pharaoh, matrix_jsonl;
    for (const ParallelPair& p : pairs) {
      AlignmentMatrix A = decode(p, em.table);
      pharaoh += A.to_pharaoh() + "\n";
      matrix_jsonl += A.to_jsonl_line(p.pair_id) + "\n";
      matrices.push_back(std::move(A));
    }
    write_text(out / "04_alignments.pharaoh", pharaoh);
    write_text(out / "04_alignments.jsonl", matrix_jsonl);
  } catch (const Error& e) {
    throw StageError("align", e.what());
  }

  // -------- filter + project --------
  std::vector<AnnotatedText> projected;
  try {
    FilterParams params{config.filter_threshold};
    std::string rejections = "pair_id\tscore\n";
    std::string drops = "pair_id\tlabel\tstart\tend\treason\n";
    char buf[64];
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      double score = filter_score(matrices[k]);
      if (score > params.threshold) {
        std::snprintf(buf, sizeof buf, "%.6f", score);
        rejections += pairs[k].pair_id + "\t" + buf + "\n";
        continue;
      }
      ProjectionResult r = project_spans(pairs[k], matrices[k]);
      r.kept = true;
      for (const DroppedSpan& d : r.dropped_spans)
        drops += pairs[k].pair_id + "\t" + d.source_span.label + "\t" +
                 std::to_string(d.source_span.start) + "\t" +
                 std::to_string(d.source_span.end) + "\t" +
                 to_string(d.reason) + "\n";
      if (!r.target.spans.empty()) projected.push_back(std::move(r.target));
    }
    write_text(out / "05_filter_rejections.tsv", rejections);
    write_text(out / "06_projection_drops.tsv", drops);
  } catch (const Error& e) {
    throw StageError("project", e.what());
  }
  write_jsonl((out / "06_projected.jsonl").string(), projected);

  // -------- stats --------
  CorpusStats stats = compute_stats(projected);
  write_text(out / "07_stats.txt", format_stats(stats, false));
  write_text(out / "07_stats.tsv", format_stats(stats, true));

  outcome.completed = true;
  return outcome;
}

}  // namespace nersynth
