#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kanbun/core.hpp"

namespace kanbun {

inline constexpr std::string_view kSep = "[SEP]";

/// One training target: `{character}{index}[SEP]{sentence}` and the
/// character's reading rank divided by the sentence length.
struct RankExample {
  std::string input_text;
  double gold_rank = 0.0;

  friend bool operator==(const RankExample&, const RankExample&) = default;
};

std::string make_input_text(const SourceSentence& src, Position p);

/// Components of an input text.
struct RankInput {
  char32_t character = 0;
  Position index = 0;
  std::u32string sentence;
};

/// Throws Error(ParseError) when the text is not in the input form.
RankInput parse_input_text(std::string_view input_text);

/// Per-position gold ranks. Unpronounced characters are slotted midway
/// between their pronounced neighbours' readings before re-ranking.
std::vector<double> gold_ranks(const ReadingOrder& order);

std::vector<RankExample> make_examples(const SourceSentence& src, const ReadingOrder& order);

/// Positions by ascending score, ties by position. Throws Error(EmptyScores)
/// or Error(InvalidOrder) for non-finite scores.
ReadingOrder decode_order(std::span<const double> scores);

/// Restricts a full permutation to the pronounced positions of `flags`.
ReadingOrder project_order(const ReadingOrder& predicted, const std::vector<ReadingFlag>& flags);

class RankPredictor {
 public:
  virtual ~RankPredictor() = default;
  virtual double score(std::string_view input_text) const = 0;
};

/// Scores every character and decodes. The result reads all positions.
ReadingOrder reorder_sentence(const SourceSentence& src, const RankPredictor& predictor);

struct Stat {
  double sum = 0.0;
  double count = 0.0;

  double mean() const { return sum / count; }
  friend bool operator==(const Stat&, const Stat&) = default;
};

/// Linear blend of relative position, per-character mean gold rank and
/// per-bigram mean deviation from relative position.
class BaselinePredictor final : public RankPredictor {
 public:
  enum class Side : char { Left = 'L', Right = 'R' };
  using BigramKey = std::pair<std::u32string, Side>;
  static constexpr std::string_view kMagic = "kanbun-rank-baseline";
  static constexpr int kVersion = 1;

  /// Examples must come in whole sentences. Throws Error(EmptyCorpus).
  static BaselinePredictor fit(std::span<const RankExample> examples);

  double score(std::string_view input_text) const override;
  std::array<double, 4> features(const RankInput& input) const;

  const std::array<double, 4>& weights() const { return weights_; }

  std::string serialize() const;
  /// Throws Error(BadModel).
  static BaselinePredictor deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BaselinePredictor load(const std::filesystem::path& path);

  friend bool operator==(const BaselinePredictor& a, const BaselinePredictor& b) {
    return a.weights_ == b.weights_ && a.chars_ == b.chars_ && a.bigrams_ == b.bigrams_;
  }

 private:
  std::array<double, 4> weights_{};
  std::map<char32_t, Stat> chars_;
  std::map<BigramKey, Stat> bigrams_;
};

BaselinePredictor baseline_fit(std::span<const std::pair<SourceSentence, ReadingOrder>> corpus);

}  // namespace kanbun
