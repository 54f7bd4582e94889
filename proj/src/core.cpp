#include "kanbun/core.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonCjkCharacter: return "NonCjkCharacter";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::BadCharTable: return "BadCharTable";
    case ErrorCode::UnalignableKanji: return "UnalignableKanji";
    case ErrorCode::AmbiguousAlignment: return "AmbiguousAlignment";
    case ErrorCode::UncoveredSource: return "UncoveredSource";
    case ErrorCode::LeadingKana: return "LeadingKana";
    case ErrorCode::NonKanbunCharacter: return "NonKanbunCharacter";
    case ErrorCode::BadEscape: return "BadEscape";
    case ErrorCode::UnrepresentableOrder: return "UnrepresentableOrder";
    case ErrorCode::MalformedMarks: return "MalformedMarks";
    case ErrorCode::LengthTooLarge: return "LengthTooLarge";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UnequalRaterCounts: return "UnequalRaterCounts";
    case ErrorCode::DegenerateAgreement: return "DegenerateAgreement";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::BadSplitSpec: return "BadSplitSpec";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_cjk_ideograph(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF)      // unified
         || (c >= 0x3400 && c <= 0x4DBF)   // extension A
         || (c >= 0x20000 && c <= 0x2A6DF) // extension B
         || (c >= 0x2A700 && c <= 0x2EBEF) // extensions C-F, I
         || (c >= 0x30000 && c <= 0x323AF);// extensions G-H
}

bool is_hiragana(char32_t c) { return c >= 0x3041 && c <= 0x309F; }
bool is_katakana(char32_t c) { return c >= 0x30A0 && c <= 0x30FF; }

std::string SourceSentence::text() const { return utf8::encode(chars); }

SourceSentence segment_chars(std::string_view raw, std::string id, std::string poem_id) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "empty sentence");
  SourceSentence s{utf8::decode(raw), std::move(id), std::move(poem_id)};
  for (std::size_t i = 0; i < s.chars.size(); ++i) {
    if (!is_cjk_ideograph(s.chars[i])) {
      throw Error(ErrorCode::NonCjkCharacter,
                  fmt::format("non-CJK character U+{:04X} at offset {}",
                              static_cast<std::uint32_t>(s.chars[i]), i));
    }
  }
  return s;
}

bool ReadingOrder::is_identity() const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != static_cast<Position>(i + 1)) return false;
  }
  return order.size() == flags.size();
}

void ReadingOrder::validate() const {
  const auto n = static_cast<Position>(flags.size());
  std::vector<bool> seen(flags.size() + 1, false);
  for (Position p : order) {
    if (p < 1 || p > n) {
      throw Error(ErrorCode::InvalidOrder, fmt::format("position {} out of range 1..{}", p, n));
    }
    if (seen[p]) throw Error(ErrorCode::InvalidOrder, fmt::format("position {} repeated", p));
    if (flags[p - 1] == ReadingFlag::Unpronounced) {
      throw Error(ErrorCode::InvalidOrder, fmt::format("unpronounced position {} is read", p));
    }
    seen[p] = true;
  }
  for (Position p = 1; p <= n; ++p) {
    if (!seen[p] && flags[p - 1] != ReadingFlag::Unpronounced) {
      throw Error(ErrorCode::InvalidOrder, fmt::format("position {} is never read", p));
    }
  }
}

ReadingOrder ReadingOrder::identity(std::size_t n) {
  ReadingOrder o;
  o.order.resize(n);
  std::iota(o.order.begin(), o.order.end(), 1);
  o.flags.assign(n, ReadingFlag::Normal);
  return o;
}

ReadingOrder ReadingOrder::from_permutation(std::vector<Position> order) {
  ReadingOrder o;
  o.flags.assign(order.size(), ReadingFlag::Normal);
  o.order = std::move(order);
  o.validate();
  return o;
}

std::string flags_string(const std::vector<ReadingFlag>& flags) {
  std::string s;
  s.reserve(flags.size());
  for (ReadingFlag f : flags) s.push_back(static_cast<char>(f));
  return s;
}

std::vector<ReadingFlag> parse_flags(std::string_view text) {
  std::vector<ReadingFlag> flags;
  flags.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case 'n': flags.push_back(ReadingFlag::Normal); break;
      case 'r': flags.push_back(ReadingFlag::Reread); break;
      case 'u': flags.push_back(ReadingFlag::Unpronounced); break;
      default:
        throw Error(ErrorCode::InvalidOrder, fmt::format("unknown reading flag '{}'", c));
    }
  }
  return flags;
}

}  // namespace kanbun
