#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kanbun/core.hpp"

namespace kanbun {

/// Return-mark series, innermost first.
enum class MarkSeries : std::uint8_t { Re, Ichini, Jouge, Kouotsu };

/// Highest index a series can express in print: 一..九, 上中下, 甲..癸.
int series_capacity(MarkSeries series);

struct KaeritenMark {
  MarkSeries series = MarkSeries::Re;
  int index = 1;

  friend bool operator==(const KaeritenMark&, const KaeritenMark&) = default;
};

/// A source sentence with return marks. `marks[i]` belongs to position i+1
/// and lists レ before any numbered mark.
struct MarkedSentence {
  SourceSentence chars;
  std::vector<std::vector<KaeritenMark>> marks;
  std::vector<ReadingFlag> flags;

  std::size_t mark_count() const;

  friend bool operator==(const MarkedSentence&, const MarkedSentence&) = default;
};

/// Chooses return marks that make a reader produce `order`. Adjacent
/// back-jumps get レ; longer ones open 一二 regions, escalating to 上下 and
/// 甲乙 as regions nest. Throws Error(UnrepresentableOrder) naming the jump
/// that could not be marked, or Error(InvalidOrder).
MarkedSentence render_marks(const SourceSentence& src, const ReadingOrder& order);

/// Reads a marked sentence the classical way: left to right, deferring
/// marked characters until their mark is discharged. Throws
/// Error(MalformedMarks).
ReadingOrder parse_marks(const MarkedSentence& marked);

/// Every permutation of 1..n some well-formed mark assignment produces.
/// Exhaustive over assignments, independent of render_marks. n <= 8.
std::set<std::vector<Position>> enumerate_representable(int n);

/// `春眠不[レ]覚[レ]暁`. Unpronounced characters carry `[置]`, reread ones `[再]`.
std::string format_marked(const MarkedSentence& marked);
MarkedSentence parse_marked_text(std::string_view text);

}  // namespace kanbun
