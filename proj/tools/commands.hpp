#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace kanbun::cli {

/// Where the character-form table comes from.
struct CharTableOption {
  std::string path;
  bool disabled = false;
};

struct ExtractOptions {
  std::string input;
  std::string annotations;
  std::string output = "-";
  CharTableOption char_table;
  bool keep_going = false;
};

struct RenderOptions {
  std::string input;
  std::string output = "-";
  bool keep_going = false;
};

struct ParseMarksOptions {
  std::string input;
  std::string output = "-";
  bool keep_going = false;
};

struct TrainOptions {
  std::string input;
  std::string model;
};

struct ReorderOptions {
  std::string input;
  std::string model;
  std::string output = "-";
  unsigned jobs = 1;
};

struct EvalOrderOptions {
  std::string gold;
  std::string predicted;
  std::string output = "-";
};

struct EvalMtOptions {
  std::string candidates;
  std::string references;
  std::string output = "-";
  int max_n = 4;
  std::string smoothing = "exp";
  CharTableOption char_table;
};

struct SplitOptions {
  std::string input;
  std::string out_dir;
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
};

struct StatsOptions {
  std::string input;
};

struct CorrelateOptions {
  std::string auto_scores;
  std::string human_scores;
  std::string output = "-";
};

struct PipelineOptions {
  std::string input;
  std::string model;
  std::string translator;
  std::string output = "-";
  std::string format = "tsv";
  CharTableOption char_table;
  bool no_reorder = false;
  unsigned jobs = 1;
};

int run_extract(const ExtractOptions& o);
int run_render_kaeriten(const RenderOptions& o);
int run_parse_kaeriten(const ParseMarksOptions& o);
int run_train(const TrainOptions& o);
int run_reorder(const ReorderOptions& o);
int run_eval_order(const EvalOrderOptions& o);
int run_eval_mt(const EvalMtOptions& o);
int run_split(const SplitOptions& o);
int run_stats(const StatsOptions& o);
int run_correlate(const CorrelateOptions& o);
int run_pipeline(const PipelineOptions& o);

}  // namespace kanbun::cli
