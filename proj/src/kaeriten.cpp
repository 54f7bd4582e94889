#include "kanbun/kaeriten.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <optional>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

namespace {

constexpr std::array<MarkSeries, 3> kNumbered = {MarkSeries::Ichini, MarkSeries::Jouge,
                                                 MarkSeries::Kouotsu};
constexpr std::u32string_view kIchiniGlyphs = U"一二三四五六七八九";
constexpr std::u32string_view kKouotsuGlyphs = U"甲乙丙丁戊己庚辛壬癸";

/// Marks on one pronounced character. `index == 0` means no numbered mark.
struct CharMarks {
  bool re = false;
  MarkSeries series = MarkSeries::Re;
  int index = 0;
};

int level(MarkSeries s) { return static_cast<int>(s); }

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::MalformedMarks, why);
}

/// Checks region structure and reads the marks. Returns the reading order over
/// 0-based indices of pronounced characters.
std::vector<int> simulate(const std::vector<CharMarks>& cm) {
  const int m = static_cast<int>(cm.size());
  for (int i = 0; i < m; ++i) {
    const auto& c = cm[i];
    if (c.re && i == m - 1) malformed("レ on the final character");
    if (c.index > 0) {
      if (c.series == MarkSeries::Re) malformed("numbered レ");
      if (c.index > series_capacity(c.series)) {
        malformed(fmt::format("numeral {} exceeds its series at character {}", c.index, i + 1));
      }
      if (c.re && c.index != 1) malformed(fmt::format("レ combined with a non-anchor numeral at character {}", i + 1));
    }
  }

  struct Open {
    int expected;
    int last;
  };
  std::array<std::optional<Open>, 4> open;
  std::vector<int> successor(cm.size(), -1);
  auto lower_open = [&](MarkSeries s) {
    for (MarkSeries t : kNumbered) {
      if (level(t) < level(s) && open[level(t)]) return true;
    }
    return false;
  };
  for (int i = 0; i < m; ++i) {
    if (cm[i].index == 0) continue;
    const MarkSeries s = cm[i].series;
    auto& region = open[level(s)];
    if (lower_open(s)) malformed(fmt::format("series order violation at character {}", i + 1));
    if (region) {
      if (cm[i].index != region->expected) {
        malformed(fmt::format("numeral {} at character {} where {} was expected", cm[i].index, i + 1,
                              region->expected));
      }
      successor[i] = region->last;
      region->last = i;
      region->expected = cm[i].index - 1;
      if (cm[i].index == 1) region.reset();
    } else {
      if (cm[i].index == 1) malformed(fmt::format("anchor at character {} has no partner", i + 1));
      region = Open{cm[i].index - 1, i};
    }
  }
  for (const auto& region : open) {
    if (region) malformed(fmt::format("dangling numeral at character {}", region->last + 1));
  }

  std::vector<bool> read(cm.size(), false);
  std::vector<int> out;
  out.reserve(cm.size());
  auto read_char = [&](auto&& self, int c) -> void {
    read[c] = true;
    out.push_back(c);
    if (c > 0 && cm[c - 1].re && !read[c - 1]) self(self, c - 1);
    if (successor[c] >= 0) {
      if (read[successor[c]]) malformed("numeral discharged twice");
      self(self, successor[c]);
    }
  };
  for (int i = 0; i < m; ++i) {
    if (cm[i].re || cm[i].index >= 2) continue;
    read_char(read_char, i);
  }
  if (static_cast<int>(out.size()) != m) malformed("some characters are never read");
  return out;
}

std::vector<KaeritenMark> to_marks(const CharMarks& c) {
  std::vector<KaeritenMark> marks;
  if (c.re) marks.push_back({MarkSeries::Re, 1});
  if (c.index > 0) marks.push_back({c.series, c.index});
  return marks;
}

/// Pronounced positions of a marked sentence and their marks.
struct Compressed {
  std::vector<Position> positions;
  std::vector<CharMarks> marks;
};

Compressed compress(const MarkedSentence& marked) {
  const std::size_t n = marked.chars.size();
  if (marked.marks.size() != n) malformed("mark list length differs from the sentence");
  if (!marked.flags.empty() && marked.flags.size() != n) malformed("flag list length differs from the sentence");
  Compressed out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool silent = !marked.flags.empty() && marked.flags[i] == ReadingFlag::Unpronounced;
    if (silent) {
      if (!marked.marks[i].empty()) malformed(fmt::format("marks on unpronounced character {}", i + 1));
      continue;
    }
    CharMarks cm;
    for (const auto& mark : marked.marks[i]) {
      if (mark.series == MarkSeries::Re) {
        if (cm.re || mark.index != 1) malformed(fmt::format("bad レ at character {}", i + 1));
        cm.re = true;
      } else {
        if (cm.index != 0) malformed(fmt::format("two numerals on character {}", i + 1));
        if (mark.index < 1) malformed(fmt::format("numeral below 1 at character {}", i + 1));
        cm.series = mark.series;
        cm.index = mark.index;
      }
    }
    out.positions.push_back(static_cast<Position>(i + 1));
    out.marks.push_back(cm);
  }
  return out;
}

/// Search over cascade trees: each deferred character is fired either by
/// レ from its right neighbour (read just before it) or as the next numeral
/// of some ancestor on the current cascade path.
class TreeSearch {
 public:
  explicit TreeSearch(std::vector<int> q) : q_(std::move(q)), m_(static_cast<int>(q_.size())) {
    rank_.resize(q_.size());
    for (int t = 0; t < m_; ++t) rank_[q_[t]] = t;
    deferred_.assign(q_.size(), false);
    int suffix_min = m_;
    for (int c = m_ - 1; c >= 0; --c) {
      deferred_[c] = suffix_min < rank_[c];
      suffix_min = std::min(suffix_min, rank_[c]);
    }
    edge_.assign(q_.size(), Edge::Root);
    num_child_.assign(q_.size(), -1);
  }

  std::optional<std::vector<CharMarks>> run() {
    std::vector<int> path;
    if (dfs(0, path)) return result_;
    return std::nullopt;
  }

  std::string failure(const std::vector<Position>& positions) const {
    if (budget_ < 0) return "search limit exceeded";
    if (fail_t_ > 0) {
      return fmt::format("cannot mark the step from {} to {}", positions[q_[fail_t_ - 1]],
                         positions[q_[fail_t_]]);
    }
    if (build_anchor_ >= 0) return fmt::format("{} at position {}", build_failure_, positions[build_anchor_]);
    return "no mark assignment realizes the order";
  }

 private:
  enum class Edge { Root, Re, Num };

  bool dfs(int t, std::vector<int>& path) {
    if (--budget_ < 0) return false;
    if (t == m_) return finish();
    const int b = q_[t];
    if (!deferred_[b]) {
      std::vector<int> root{b};
      edge_[b] = Edge::Root;
      return dfs(t + 1, root);
    }
    if (t > 0 && q_[t - 1] == b + 1) {
      edge_[b] = Edge::Re;
      path.push_back(b);
      if (dfs(t + 1, path)) return true;
      path.pop_back();
    }
    for (int d = static_cast<int>(path.size()) - 1; d >= 0; --d) {
      const int x = path[d];
      if (x <= b || num_child_[x] != -1) continue;
      num_child_[x] = b;
      edge_[b] = Edge::Num;
      std::vector<int> next(path.begin(), path.begin() + d + 1);
      next.push_back(b);
      if (dfs(t + 1, next)) return true;
      num_child_[x] = -1;
      if (budget_ < 0) return false;
    }
    fail_t_ = std::max(fail_t_, t);
    return false;
  }

  bool finish() {
    struct Region {
      std::vector<int> chain;    // anchor first; positions decrease
      std::vector<int> members;  // ascending
      int lo, hi;
      int series_level = 0;
    };
    std::vector<Region> regions;
    for (int c = 0; c < m_; ++c) {
      if (num_child_[c] == -1 || edge_[c] == Edge::Num) continue;
      Region r;
      for (int x = c; x != -1; x = num_child_[x]) r.chain.push_back(x);
      r.members.assign(r.chain.rbegin(), r.chain.rend());
      r.lo = r.members.front();
      r.hi = r.members.back();
      regions.push_back(std::move(r));
    }
    auto inside_gap = [](const Region& outer, const Region& inner) {
      for (std::size_t g = 0; g + 1 < outer.members.size(); ++g) {
        if (outer.members[g] < inner.lo && inner.hi < outer.members[g + 1]) return true;
      }
      return false;
    };
    const std::size_t k = regions.size();
    std::vector<std::vector<std::size_t>> nested(k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const auto& ra = regions[a];
        const auto& rb = regions[b];
        if (ra.hi < rb.lo || rb.hi < ra.lo) continue;
        if (inside_gap(ra, rb)) {
          nested[a].push_back(b);
        } else if (inside_gap(rb, ra)) {
          nested[b].push_back(a);
        } else {
          note_build_failure("return regions cross", ra.chain[0]);
          return false;
        }
      }
    }
    std::vector<std::size_t> by_span(k);
    for (std::size_t i = 0; i < k; ++i) by_span[i] = i;
    std::sort(by_span.begin(), by_span.end(), [&](std::size_t a, std::size_t b) {
      return regions[a].hi - regions[a].lo < regions[b].hi - regions[b].lo;
    });
    for (std::size_t a : by_span) {
      int floor = level(MarkSeries::Ichini);
      for (std::size_t b : nested[a]) floor = std::max(floor, regions[b].series_level + 1);
      int chosen = 0;
      for (int s = floor; s <= level(MarkSeries::Kouotsu); ++s) {
        if (static_cast<int>(regions[a].chain.size()) <= series_capacity(static_cast<MarkSeries>(s))) {
          chosen = s;
          break;
        }
      }
      if (chosen == 0) {
        note_build_failure("return regions nest deeper than 甲乙", regions[a].chain[0]);
        return false;
      }
      regions[a].series_level = chosen;
    }

    std::vector<CharMarks> cm(q_.size());
    for (int c = 0; c < m_; ++c) cm[c].re = edge_[c] == Edge::Re;
    for (const auto& r : regions) {
      for (std::size_t j = 0; j < r.chain.size(); ++j) {
        cm[r.chain[j]].series = static_cast<MarkSeries>(r.series_level);
        cm[r.chain[j]].index = static_cast<int>(j) + 1;
      }
    }
    try {
      if (simulate(cm) != q_) return false;
    } catch (const Error&) {
      return false;
    }
    result_ = std::move(cm);
    return true;
  }

  void note_build_failure(const char* why, int anchor) {
    if (build_anchor_ < 0) {
      build_failure_ = why;
      build_anchor_ = anchor;
    }
  }

  std::vector<int> q_;
  int m_;
  std::vector<int> rank_;
  std::vector<bool> deferred_;
  std::vector<Edge> edge_;
  std::vector<int> num_child_;
  std::vector<CharMarks> result_;
  long budget_ = 2'000'000;
  int fail_t_ = -1;
  std::string build_failure_;
  int build_anchor_ = -1;
};

void enumerate_assignments(int idx, int n, std::vector<CharMarks>& cm, std::array<int, 4>& open,
                           std::set<std::vector<Position>>& out) {
  if (idx == n) {
    for (MarkSeries s : kNumbered) {
      if (open[level(s)] > 0) return;
    }
    try {
      const auto order = simulate(cm);
      std::vector<Position> perm;
      perm.reserve(order.size());
      for (int c : order) perm.push_back(c + 1);
      out.insert(std::move(perm));
    } catch (const Error&) {
    }
    return;
  }
  const int remaining = n - idx;
  int needed = 0;
  int lowest_open = 4;
  for (MarkSeries s : kNumbered) {
    needed += open[level(s)];
    if (open[level(s)] > 0) lowest_open = std::min(lowest_open, level(s));
  }
  if (needed > remaining) return;

  cm[idx] = CharMarks{};
  enumerate_assignments(idx + 1, n, cm, open, out);
  if (idx < n - 1) {
    cm[idx] = CharMarks{true, MarkSeries::Re, 0};
    enumerate_assignments(idx + 1, n, cm, open, out);
  }
  for (MarkSeries s : kNumbered) {
    const int l = level(s);
    if (lowest_open < l) continue;
    if (open[l] > 0) {
      const int e = open[l];
      open[l] = e - 1;
      cm[idx] = CharMarks{false, s, e};
      enumerate_assignments(idx + 1, n, cm, open, out);
      if (e == 1 && idx < n - 1) {
        cm[idx].re = true;
        enumerate_assignments(idx + 1, n, cm, open, out);
      }
      open[l] = e;
    } else {
      for (int k = 2; k <= series_capacity(s) && needed + k - 1 <= remaining - 1; ++k) {
        open[l] = k - 1;
        cm[idx] = CharMarks{false, s, k};
        enumerate_assignments(idx + 1, n, cm, open, out);
        open[l] = 0;
      }
    }
  }
  cm[idx] = CharMarks{};
}

char32_t jouge_glyph(int index, int top) {
  if (index == 1) return U'上';
  if (index == top) return U'下';
  return U'中';
}

}  // namespace

int series_capacity(MarkSeries series) {
  switch (series) {
    case MarkSeries::Re: return 1;
    case MarkSeries::Ichini: return static_cast<int>(kIchiniGlyphs.size());
    case MarkSeries::Jouge: return 3;
    case MarkSeries::Kouotsu: return static_cast<int>(kKouotsuGlyphs.size());
  }
  return 0;
}

std::size_t MarkedSentence::mark_count() const {
  std::size_t total = 0;
  for (const auto& m : marks) total += m.size();
  return total;
}

MarkedSentence render_marks(const SourceSentence& src, const ReadingOrder& order) {
  if (order.length() != src.size()) {
    throw Error(ErrorCode::InvalidOrder,
                fmt::format("order covers {} positions, sentence has {}", order.length(), src.size()));
  }
  order.validate();

  std::vector<int> compressed_index(src.size() + 1, -1);
  std::vector<Position> pronounced;
  for (Position p = 1; p <= static_cast<Position>(src.size()); ++p) {
    if (order.flags[p - 1] != ReadingFlag::Unpronounced) {
      compressed_index[p] = static_cast<int>(pronounced.size());
      pronounced.push_back(p);
    }
  }
  std::vector<int> q;
  q.reserve(order.order.size());
  for (Position p : order.order) q.push_back(compressed_index[p]);

  TreeSearch search(q);
  auto marks = search.run();
  if (!marks) {
    const std::string why = search.failure(pronounced);
    throw Error(ErrorCode::UnrepresentableOrder,
                fmt::format("order {} cannot be written with return marks: {}",
                            fmt::join(order.order, ","), why));
  }

  MarkedSentence out;
  out.chars = src;
  out.flags = order.flags;
  out.marks.resize(src.size());
  for (std::size_t c = 0; c < pronounced.size(); ++c) {
    out.marks[pronounced[c] - 1] = to_marks((*marks)[c]);
  }
  return out;
}

ReadingOrder parse_marks(const MarkedSentence& marked) {
  const auto compressed = compress(marked);
  const auto reading = simulate(compressed.marks);
  ReadingOrder order;
  order.flags = marked.flags.empty()
                    ? std::vector<ReadingFlag>(marked.chars.size(), ReadingFlag::Normal)
                    : marked.flags;
  for (int c : reading) order.order.push_back(compressed.positions[c]);
  order.validate();
  return order;
}

std::set<std::vector<Position>> enumerate_representable(int n) {
  if (n < 1) throw Error(ErrorCode::EmptyInput, "sentence length must be at least 1");
  if (n > 8) throw Error(ErrorCode::LengthTooLarge, fmt::format("length {} exceeds 8", n));
  std::set<std::vector<Position>> out;
  std::vector<CharMarks> cm(static_cast<std::size_t>(n));
  std::array<int, 4> open{};
  enumerate_assignments(0, n, cm, open, out);
  return out;
}

std::string format_marked(const MarkedSentence& marked) {
  const std::size_t n = marked.chars.size();
  if (marked.marks.size() != n) malformed("mark list length differs from the sentence");
  std::u32string out;
  int jouge_top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out += marked.chars.chars[i];
    std::u32string tag;
    bool re = false;
    for (const auto& mark : marked.marks[i]) {
      switch (mark.series) {
        case MarkSeries::Re:
          re = true;
          break;
        case MarkSeries::Ichini:
          if (mark.index < 1 || mark.index > series_capacity(mark.series)) malformed("numeral out of range");
          tag += kIchiniGlyphs[mark.index - 1];
          break;
        case MarkSeries::Jouge:
          if (mark.index < 1 || mark.index > 3) malformed("上中下 numeral out of range");
          if (jouge_top == 0) jouge_top = mark.index;
          tag += jouge_glyph(mark.index, jouge_top);
          if (mark.index == 1) jouge_top = 0;
          break;
        case MarkSeries::Kouotsu:
          if (mark.index < 1 || mark.index > series_capacity(mark.series)) malformed("numeral out of range");
          tag += kKouotsuGlyphs[mark.index - 1];
          break;
      }
    }
    if (re) tag += U'レ';
    if (!marked.flags.empty()) {
      if (marked.flags[i] == ReadingFlag::Unpronounced) tag += U'置';
      if (marked.flags[i] == ReadingFlag::Reread) tag += U'再';
    }
    if (!tag.empty()) out += U"[" + tag + U"]";
  }
  return utf8::encode(out);
}

MarkedSentence parse_marked_text(std::string_view text) {
  const std::u32string chars = utf8::decode(text);
  MarkedSentence out;
  std::vector<std::u32string> tags;
  std::size_t i = 0;
  while (i < chars.size()) {
    const char32_t c = chars[i];
    if (!is_cjk_ideograph(c)) {
      malformed(fmt::format("expected a kanji at offset {}, found U+{:04X}", i, static_cast<std::uint32_t>(c)));
    }
    out.chars.chars.push_back(c);
    tags.emplace_back();
    ++i;
    while (i < chars.size() && chars[i] == U'[') {
      auto close = chars.find(U']', i);
      if (close == std::u32string::npos) malformed(fmt::format("unclosed mark bracket at offset {}", i));
      if (close == i + 1) malformed(fmt::format("empty mark bracket at offset {}", i));
      tags.back() += chars.substr(i + 1, close - i - 1);
      i = close + 1;
    }
  }
  if (out.chars.chars.empty()) throw Error(ErrorCode::EmptyInput, "empty marked sentence");

  const std::size_t n = out.chars.size();
  out.marks.resize(n);
  out.flags.assign(n, ReadingFlag::Normal);
  int jouge_open_top = 0;
  for (std::size_t p = 0; p < n; ++p) {
    std::optional<KaeritenMark> numbered;
    bool re = false;
    auto set_numbered = [&](MarkSeries s, int index) {
      if (numbered) malformed(fmt::format("two numerals on character {}", p + 1));
      numbered = KaeritenMark{s, index};
    };
    for (char32_t g : tags[p]) {
      if (g == U'レ') {
        if (re) malformed(fmt::format("レ repeated on character {}", p + 1));
        re = true;
      } else if (g == U'置') {
        out.flags[p] = ReadingFlag::Unpronounced;
      } else if (g == U'再') {
        out.flags[p] = ReadingFlag::Reread;
      } else if (auto k = kIchiniGlyphs.find(g); k != std::u32string_view::npos) {
        set_numbered(MarkSeries::Ichini, static_cast<int>(k) + 1);
      } else if (auto k2 = kKouotsuGlyphs.find(g); k2 != std::u32string_view::npos) {
        set_numbered(MarkSeries::Kouotsu, static_cast<int>(k2) + 1);
      } else if (g == U'下') {
        if (jouge_open_top != 0) malformed(fmt::format("下 inside an open 上下 region at character {}", p + 1));
        int top = 2;
        for (std::size_t r = p + 1; r < n; ++r) {
          if (tags[r].find_first_of(U"上中下") != std::u32string::npos) {
            if (tags[r].find(U'中') != std::u32string::npos) top = 3;
            break;
          }
        }
        jouge_open_top = top;
        set_numbered(MarkSeries::Jouge, top);
      } else if (g == U'中') {
        set_numbered(MarkSeries::Jouge, 2);
      } else if (g == U'上') {
        jouge_open_top = 0;
        set_numbered(MarkSeries::Jouge, 1);
      } else {
        malformed(fmt::format("unknown mark '{}' on character {}", utf8::encode(g), p + 1));
      }
    }
    if (re) out.marks[p].push_back({MarkSeries::Re, 1});
    if (numbered) out.marks[p].push_back(*numbered);
  }
  return out;
}

}  // namespace kanbun
