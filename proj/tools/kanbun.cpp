#include <fmt/format.h>

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "kanbun/corpus.hpp"
#include "kanbun/error.hpp"

namespace {

using namespace kanbun;
using namespace kanbun::cli;

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

int fail(std::string_view code, const std::string& where, const std::string& message, int status) {
  std::cerr << fmt::format("error\t{}\t{}\t{}\n", code, where, one_line(message));
  return status;
}

void add_char_table(CLI::App* cmd, CharTableOption& o) {
  auto* path = cmd->add_option("--char-table", o.path, "Old-to-new character form table (TSV)")
                   ->check(CLI::ExistingFile);
  cmd->add_flag("--no-char-table", o.disabled, "Skip character form normalization")->excludes(path);
}

void add_output(CLI::App* cmd, std::string& out) {
  cmd->add_option("-o,--output", out, "Output file, '-' for stdout")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical Chinese to Kanbun toolkit: reading orders, return marks, reordering and evaluation"};
  app.require_subcommand(1);
  app.fallthrough(false);

  ExtractOptions extract;
  auto* c_extract = app.add_subcommand("extract", "Extract reading orders from a raw parallel file");
  c_extract->add_option("input", extract.input, "Raw file: id, poem_id, source, kanbun")
      ->required()
      ->check(CLI::ExistingFile);
  c_extract->add_option("-a,--annotations", extract.annotations, "Escape sidecar: id, kind, position[, kana]")
      ->check(CLI::ExistingFile);
  add_output(c_extract, extract.output);
  add_char_table(c_extract, extract.char_table);
  c_extract->add_flag("--keep-going", extract.keep_going, "Report failing lines and continue");

  RenderOptions render;
  auto* c_render = app.add_subcommand("render-kaeriten", "Write each corpus sentence with return marks");
  c_render->add_option("input", render.input, "Corpus file")->required()->check(CLI::ExistingFile);
  add_output(c_render, render.output);
  c_render->add_flag("--keep-going", render.keep_going, "Report unrepresentable orders and continue");

  ParseMarksOptions parse_marks_opts;
  auto* c_parse = app.add_subcommand("parse-kaeriten", "Read marked sentences back into reading orders");
  c_parse->add_option("input", parse_marks_opts.input, "Marked file: id, marked text")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(c_parse, parse_marks_opts.output);
  c_parse->add_flag("--keep-going", parse_marks_opts.keep_going, "Report malformed lines and continue");

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Fit the baseline rank predictor");
  c_train->add_option("input", train.input, "Training corpus")->required()->check(CLI::ExistingFile);
  c_train->add_option("-m,--model", train.model, "Model output file, '-' for stdout")->required();

  ReorderOptions reorder;
  auto* c_reorder = app.add_subcommand("reorder", "Predict reading orders with a trained model");
  c_reorder->add_option("input", reorder.input, "Corpus file")->required()->check(CLI::ExistingFile);
  c_reorder->add_option("-m,--model", reorder.model, "Model file")->required()->check(CLI::ExistingFile);
  add_output(c_reorder, reorder.output);
  c_reorder->add_option("-j,--jobs", reorder.jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();

  EvalOrderOptions eval_order;
  auto* c_eval_order = app.add_subcommand("eval-order", "Kendall's tau and PMR of predicted orders");
  c_eval_order->add_option("gold", eval_order.gold, "Gold corpus or orders file")->required()->check(CLI::ExistingFile);
  c_eval_order->add_option("predicted", eval_order.predicted, "Predicted orders file")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(c_eval_order, eval_order.output);

  EvalMtOptions eval_mt;
  auto* c_eval_mt = app.add_subcommand("eval-mt", "Character BLEU, RIBES and ROUGE-L");
  c_eval_mt->add_option("candidates", eval_mt.candidates, "Candidate lines: text or id<TAB>text")
      ->required()
      ->check(CLI::ExistingFile);
  c_eval_mt->add_option("references", eval_mt.references, "Reference lines: text or id<TAB>text")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(c_eval_mt, eval_mt.output);
  c_eval_mt->add_option("--max-n", eval_mt.max_n, "Highest BLEU n-gram order")
      ->check(CLI::Range(1, 9))
      ->capture_default_str();
  c_eval_mt->add_option("--smoothing", eval_mt.smoothing, "BLEU smoothing for zero counts")
      ->check(CLI::IsMember({"exp", "none"}))
      ->capture_default_str();
  add_char_table(c_eval_mt, eval_mt.char_table);

  SplitOptions split;
  std::vector<double> ratios{0.8, 0.1, 0.1};
  auto* c_split = app.add_subcommand("split", "Group shuffle split by poem");
  c_split->add_option("input", split.input, "Corpus file")->required()->check(CLI::ExistingFile);
  c_split->add_option("-o,--out-dir", split.out_dir, "Directory for train.tsv, validation.tsv, test.tsv")
      ->required();
  c_split->add_option("--ratios", ratios, "train,validation,test")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  c_split->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();

  StatsOptions stats;
  auto* c_stats = app.add_subcommand("stats", "Poem, sentence and character counts");
  c_stats->add_option("input", stats.input, "Corpus file")->required()->check(CLI::ExistingFile);

  CorrelateOptions correlate;
  auto* c_correlate = app.add_subcommand("correlate", "Metric/human correlation and rater agreement");
  c_correlate->add_option("auto", correlate.auto_scores, "Automatic scores: id, one column per metric")
      ->required()
      ->check(CLI::ExistingFile);
  c_correlate->add_option("human", correlate.human_scores, "Human ratings: id, <criterion>/<rater> columns")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(c_correlate, correlate.output);

  PipelineOptions pipeline;
  auto* c_pipeline = app.add_subcommand("pipeline", "Reorder, then optionally translate and score");
  c_pipeline->add_option("input", pipeline.input, "Corpus file")->required()->check(CLI::ExistingFile);
  auto* model_opt =
      c_pipeline->add_option("-m,--model", pipeline.model, "Model file")->check(CLI::ExistingFile);
  auto* no_reorder = c_pipeline->add_flag("--no-reorder", pipeline.no_reorder, "Feed sources in original order");
  model_opt->excludes(no_reorder);
  c_pipeline->add_option("--translator", pipeline.translator,
                         "Shell command reading one sentence per line on stdin, writing one kanbun line each");
  c_pipeline->add_option("--format", pipeline.format, "tsv or report")
      ->check(CLI::IsMember({"tsv", "report"}))
      ->capture_default_str();
  add_output(c_pipeline, pipeline.output);
  add_char_table(c_pipeline, pipeline.char_table);
  c_pipeline->add_option("-j,--jobs", pipeline.jobs, "Worker threads")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (c_split->parsed()) {
      if (ratios.size() != 3) throw CLI::ValidationError("--ratios", "needs three values");
      split.ratios = {ratios[0], ratios[1], ratios[2]};
      SplitSpec{split.ratios[0], split.ratios[1], split.ratios[2], split.seed}.validate();
    }
    if (c_pipeline->parsed() && pipeline.model.empty() && !pipeline.no_reorder) {
      throw CLI::RequiredError("--model (or --no-reorder)");
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("Usage", "-:0", e.what(), 2);
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), "-:0", e.what(), 2);
  }

  try {
    if (c_extract->parsed()) return run_extract(extract);
    if (c_render->parsed()) return run_render_kaeriten(render);
    if (c_parse->parsed()) return run_parse_kaeriten(parse_marks_opts);
    if (c_train->parsed()) return run_train(train);
    if (c_reorder->parsed()) return run_reorder(reorder);
    if (c_eval_order->parsed()) return run_eval_order(eval_order);
    if (c_eval_mt->parsed()) return run_eval_mt(eval_mt);
    if (c_split->parsed()) return run_split(split);
    if (c_stats->parsed()) return run_stats(stats);
    if (c_correlate->parsed()) return run_correlate(correlate);
    if (c_pipeline->parsed()) return run_pipeline(pipeline);
  } catch (const LocatedError& e) {
    return fail(error_code_name(e.code()), fmt::format("{}:{}", e.file(), e.line()), e.what(), 1);
  } catch (const Error& e) {
    return fail(error_code_name(e.code()), "-:0", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("Internal", "-:0", e.what(), 1);
  }
  return 0;
}
