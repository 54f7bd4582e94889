#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kanbun {

/// 1-based position in a source sentence.
using Position = int;

bool is_cjk_ideograph(char32_t c);
bool is_hiragana(char32_t c);
bool is_katakana(char32_t c);
inline bool is_kana(char32_t c) { return is_hiragana(c) || is_katakana(c); }

/// A line of Classical Chinese, one ideograph per slot.
struct SourceSentence {
  std::u32string chars;
  std::string id{};
  std::string poem_id{};

  std::size_t size() const { return chars.size(); }
  char32_t at(Position p) const { return chars.at(static_cast<std::size_t>(p - 1)); }
  std::string text() const;

  friend bool operator==(const SourceSentence&, const SourceSentence&) = default;
};

/// Splits raw text into one element per scalar value. Rejects empty input and
/// anything outside the CJK ideograph blocks.
SourceSentence segment_chars(std::string_view raw, std::string id = {},
                             std::string poem_id = {});

enum class ReadingFlag : char { Normal = 'n', Reread = 'r', Unpronounced = 'u' };

/// Japanese reading order over a source sentence. `order` lists each
/// pronounced position once; unpronounced positions are absent.
struct ReadingOrder {
  std::vector<Position> order;
  std::vector<ReadingFlag> flags;

  std::size_t length() const { return flags.size(); }
  bool is_identity() const;

  /// Throws Error(InvalidOrder) when the invariants do not hold.
  void validate() const;

  static ReadingOrder identity(std::size_t n);
  /// All positions normal; `order` must be a permutation of 1..n.
  static ReadingOrder from_permutation(std::vector<Position> order);

  friend bool operator==(const ReadingOrder&, const ReadingOrder&) = default;
};

std::string flags_string(const std::vector<ReadingFlag>& flags);
std::vector<ReadingFlag> parse_flags(std::string_view text);

/// Kanbun text with the source position each kanji realizes.
struct KanbunSentence {
  std::u32string text;
  std::vector<Position> alignment;

  friend bool operator==(const KanbunSentence&, const KanbunSentence&) = default;
};

}  // namespace kanbun
