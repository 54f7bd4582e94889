#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbun/core.hpp"

namespace kanbun {

enum class EscapeKind { Skip, Reread, ForceAlign, Yomigana };

std::string_view escape_kind_name(EscapeKind kind);

/// Manual annotation for characters the greedy aligner cannot resolve.
///   skip        the character is unpronounced (okiji)
///   reread      the character is read twice; `kana` is its second reading
///   force-align the next Kanbun occurrence of this character aligns here
///   yomigana    the character is written as `kana` instead of the kanji
struct AnnotationEscape {
  EscapeKind kind;
  Position source_position;
  std::u32string kana;

  friend bool operator==(const AnnotationEscape&, const AnnotationEscape&) = default;
};

/// Escapes keyed by sentence id, in file order.
using AnnotationMap = std::map<std::string, std::vector<AnnotationEscape>>;

/// Parses the sidecar format `<sentence-id>\t<kind>\t<position>[\t<kana>]`.
/// Throws LocatedError(BadEscape) naming `origin` and the offending line.
AnnotationMap parse_annotations(std::string_view text, const std::string& origin = "<annotations>");
std::string format_annotations(const AnnotationMap& escapes);

struct ParsedKanbun {
  ReadingOrder order;
  std::map<Position, std::u32string> okurigana;
  std::map<Position, std::u32string> yomigana;
  std::map<Position, std::u32string> reread_tail;
  /// Position after whose okurigana each reread tail is written.
  std::map<Position, Position> reread_anchor;

  friend bool operator==(const ParsedKanbun&, const ParsedKanbun&) = default;
};

/// Aligns every kanji of `kanbun` to a distinct source position, left to
/// right, and attaches the kana that follow it. Yomigana and reread tails are
/// matched at the earliest offset of a kana run where their declared kana
/// occurs.
ParsedKanbun extract_order(const SourceSentence& src, std::u32string_view kanbun,
                           std::span<const AnnotationEscape> escapes = {});

/// Writes the kanbun back out from a parse. Inverse of extract_order.
std::u32string render_kanbun(const SourceSentence& src, const ParsedKanbun& parsed);

/// Digits for sentences of up to nine characters ("12543"), comma-separated
/// positions otherwise.
std::string order_string(const ReadingOrder& order);
inline std::string order_string(const ParsedKanbun& parsed) { return order_string(parsed.order); }

/// Inverse of order_string. Accepts either form; throws Error(InvalidOrder).
ReadingOrder parse_order_string(std::string_view text, std::vector<ReadingFlag> flags);

}  // namespace kanbun
