#include "kanbun/kanbun_parse.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <deque>
#include <optional>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string describe(char32_t c) {
  return fmt::format("{} (U+{:04X})", utf8::encode(c), static_cast<std::uint32_t>(c));
}

}  // namespace

std::string_view escape_kind_name(EscapeKind kind) {
  switch (kind) {
    case EscapeKind::Skip: return "skip";
    case EscapeKind::Reread: return "reread";
    case EscapeKind::ForceAlign: return "force-align";
    case EscapeKind::Yomigana: return "yomigana";
  }
  return "?";
}

AnnotationMap parse_annotations(std::string_view text, const std::string& origin) {
  AnnotationMap escapes;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](std::string_view why) {
      throw LocatedError(ErrorCode::BadEscape, origin, line_no, std::string(why));
    };
    const auto fields = split_tabs(line);
    if (fields.size() < 3 || fields.size() > 4) fail("expected 3 or 4 tab-separated fields");
    if (fields[0].empty()) fail("empty sentence id");

    AnnotationEscape esc{};
    if (fields[1] == "skip") {
      esc.kind = EscapeKind::Skip;
    } else if (fields[1] == "reread") {
      esc.kind = EscapeKind::Reread;
    } else if (fields[1] == "force-align") {
      esc.kind = EscapeKind::ForceAlign;
    } else if (fields[1] == "yomigana") {
      esc.kind = EscapeKind::Yomigana;
    } else {
      fail(fmt::format("unknown escape kind '{}'", fields[1]));
    }
    auto pos = parse_int(fields[2]);
    if (!pos || *pos < 1) fail(fmt::format("bad source position '{}'", fields[2]));
    esc.source_position = *pos;

    const bool needs_kana = esc.kind == EscapeKind::Reread || esc.kind == EscapeKind::Yomigana;
    if (needs_kana != (fields.size() == 4)) {
      fail(needs_kana ? "escape requires a kana field" : "escape takes no kana field");
    }
    if (needs_kana) {
      try {
        esc.kana = utf8::decode(fields[3]);
      } catch (const Error& e) {
        fail(e.what());
      }
      if (esc.kana.empty() || !std::all_of(esc.kana.begin(), esc.kana.end(), is_kana)) {
        fail("kana field must be non-empty kana");
      }
    }
    escapes[std::string(fields[0])].push_back(std::move(esc));
  }
  return escapes;
}

std::string format_annotations(const AnnotationMap& escapes) {
  std::string out;
  for (const auto& [id, list] : escapes) {
    for (const auto& esc : list) {
      out += fmt::format("{}\t{}\t{}", id, escape_kind_name(esc.kind), esc.source_position);
      if (!esc.kana.empty()) out += "\t" + utf8::encode(esc.kana);
      out += '\n';
    }
  }
  return out;
}

ParsedKanbun extract_order(const SourceSentence& src, std::u32string_view kanbun,
                           std::span<const AnnotationEscape> escapes) {
  const auto n = static_cast<Position>(src.size());
  if (n == 0) throw Error(ErrorCode::EmptyInput, "empty source sentence");
  if (kanbun.empty()) throw Error(ErrorCode::EmptyInput, "empty kanbun text");

  ParsedKanbun result;
  result.order.flags.assign(src.size(), ReadingFlag::Normal);
  auto& flags = result.order.flags;

  std::vector<bool> yomigana_pos(src.size() + 1, false);
  std::map<char32_t, std::deque<Position>> forced;
  for (const auto& esc : escapes) {
    const Position p = esc.source_position;
    if (p < 1 || p > n) {
      throw Error(ErrorCode::BadEscape,
                  fmt::format("{} escape position {} outside 1..{}", escape_kind_name(esc.kind), p, n));
    }
    auto conflict = [&]() {
      throw Error(ErrorCode::BadEscape, fmt::format("conflicting escapes at position {}", p));
    };
    switch (esc.kind) {
      case EscapeKind::Skip:
        if (flags[p - 1] != ReadingFlag::Normal || yomigana_pos[p]) conflict();
        flags[p - 1] = ReadingFlag::Unpronounced;
        break;
      case EscapeKind::Reread:
        if (flags[p - 1] != ReadingFlag::Normal || yomigana_pos[p]) conflict();
        flags[p - 1] = ReadingFlag::Reread;
        break;
      case EscapeKind::Yomigana:
        if (flags[p - 1] != ReadingFlag::Normal || yomigana_pos[p]) conflict();
        yomigana_pos[p] = true;
        result.yomigana[p] = esc.kana;
        break;
      case EscapeKind::ForceAlign:
        forced[src.at(p)].push_back(p);
        break;
    }
  }
  std::map<Position, std::u32string> pending_tails;
  for (const auto& esc : escapes) {
    if (esc.kind == EscapeKind::Reread) pending_tails[esc.source_position] = esc.kana;
  }

  std::vector<bool> used(src.size() + 1, false);
  std::optional<Position> owner;  // last placed slot
  std::u32string* sink = nullptr; // where trailing kana currently go

  auto place = [&](Position p) {
    used[p] = true;
    result.order.order.push_back(p);
    owner = p;
    sink = nullptr;
  };
  auto append_kana = [&](std::u32string_view kana, std::size_t offset) {
    if (kana.empty()) return;
    if (sink == nullptr) {
      if (!owner) {
        throw Error(ErrorCode::LeadingKana,
                    fmt::format("kana before any kanji at offset {}", offset));
      }
      sink = &result.okurigana[*owner];
    }
    *sink += kana;
  };

  std::size_t i = 0;
  while (i < kanbun.size()) {
    const char32_t c = kanbun[i];
    if (is_cjk_ideograph(c)) {
      std::vector<Position> candidates;
      for (Position p = 1; p <= n; ++p) {
        if (src.at(p) == c && !used[p] && flags[p - 1] != ReadingFlag::Unpronounced &&
            !yomigana_pos[p]) {
          candidates.push_back(p);
        }
      }
      if (candidates.empty()) {
        throw Error(ErrorCode::UnalignableKanji,
                    fmt::format("kanji {} at offset {} has no unused source position",
                                describe(c), i));
      }
      Position chosen = candidates.front();
      auto fit = forced.find(c);
      if (fit != forced.end() && !fit->second.empty()) {
        chosen = fit->second.front();
        fit->second.pop_front();
        if (std::find(candidates.begin(), candidates.end(), chosen) == candidates.end()) {
          throw Error(ErrorCode::BadEscape,
                      fmt::format("force-align to position {} is not available for {} at offset {}",
                                  chosen, describe(c), i));
        }
      } else {
        // Identical characters in one contiguous run are interchangeable.
        const bool contiguous =
            candidates.back() - candidates.front() + 1 == static_cast<Position>(candidates.size());
        if (!contiguous) {
          throw Error(ErrorCode::AmbiguousAlignment,
                      fmt::format("kanji {} at offset {} matches source positions {}",
                                  describe(c), i, fmt::join(candidates, ",")));
        }
      }
      place(chosen);
      ++i;
      continue;
    }

    if (!is_kana(c)) {
      throw Error(ErrorCode::NonKanbunCharacter,
                  fmt::format("character {} at offset {} is neither kanji nor kana", describe(c), i));
    }
    std::size_t j = i;
    while (j < kanbun.size() && is_kana(kanbun[j])) ++j;
    const std::u32string_view run = kanbun.substr(i, j - i);

    std::size_t consumed = 0;
    std::size_t k = 0;
    while (k < run.size()) {
      const std::u32string_view rest = run.substr(k);
      bool matched = false;
      for (const auto& [p, kana] : result.yomigana) {
        if (!used[p] && rest.substr(0, kana.size()) == kana) {
          append_kana(run.substr(consumed, k - consumed), i + consumed);
          place(p);
          k += kana.size();
          consumed = k;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      for (auto it = pending_tails.begin(); it != pending_tails.end(); ++it) {
        const Position q = it->first;
        const auto& kana = it->second;
        if (used[q] && owner && *owner != q && rest.substr(0, kana.size()) == kana) {
          append_kana(run.substr(consumed, k - consumed), i + consumed);
          result.reread_tail[q] = kana;
          result.reread_anchor[q] = *owner;
          sink = &result.reread_tail[q];
          k += kana.size();
          consumed = k;
          pending_tails.erase(it);
          matched = true;
          break;
        }
      }
      if (!matched) ++k;
    }
    append_kana(run.substr(consumed), i + consumed);
    i = j;
  }

  for (Position p = 1; p <= n; ++p) {
    if (!used[p] && flags[p - 1] != ReadingFlag::Unpronounced) {
      throw Error(ErrorCode::UncoveredSource,
                  fmt::format("source character {} at position {} does not appear in the kanbun",
                              describe(src.at(p)), p));
    }
  }
  if (!pending_tails.empty()) {
    const auto& [q, kana] = *pending_tails.begin();
    throw Error(ErrorCode::UncoveredSource,
                fmt::format("second reading '{}' of position {} not found", utf8::encode(kana), q));
  }
  for (const auto& [c, rest] : forced) {
    if (!rest.empty()) {
      throw Error(ErrorCode::BadEscape,
                  fmt::format("unused force-align escape for position {}", rest.front()));
    }
  }
  std::erase_if(result.okurigana, [](const auto& kv) { return kv.second.empty(); });
  return result;
}

std::u32string render_kanbun(const SourceSentence& src, const ParsedKanbun& parsed) {
  std::map<Position, std::vector<Position>> tails_after;
  for (const auto& [q, anchor] : parsed.reread_anchor) tails_after[anchor].push_back(q);

  std::u32string out;
  for (Position p : parsed.order.order) {
    if (auto y = parsed.yomigana.find(p); y != parsed.yomigana.end()) {
      out += y->second;
    } else {
      out += src.at(p);
    }
    if (auto o = parsed.okurigana.find(p); o != parsed.okurigana.end()) out += o->second;
    if (auto t = tails_after.find(p); t != tails_after.end()) {
      for (Position q : t->second) out += parsed.reread_tail.at(q);
    }
  }
  return out;
}

std::string order_string(const ReadingOrder& order) {
  if (order.length() <= 9) {
    std::string s;
    for (Position p : order.order) s.push_back(static_cast<char>('0' + p));
    return s;
  }
  return fmt::format("{}", fmt::join(order.order, ","));
}

ReadingOrder parse_order_string(std::string_view text, std::vector<ReadingFlag> flags) {
  ReadingOrder order;
  order.flags = std::move(flags);
  if (text.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      auto value = parse_int(text.substr(start, comma - start));
      if (!value) {
        throw Error(ErrorCode::InvalidOrder, fmt::format("bad order field '{}'", text));
      }
      order.order.push_back(*value);
      start = comma + 1;
    }
  } else {
    if (order.flags.size() > 9 && !text.empty()) {
      throw Error(ErrorCode::InvalidOrder,
                  fmt::format("order '{}' for a sentence longer than 9 must be comma-separated", text));
    }
    for (char c : text) {
      if (c < '1' || c > '9') {
        throw Error(ErrorCode::InvalidOrder, fmt::format("bad order field '{}'", text));
      }
      order.order.push_back(c - '0');
    }
  }
  order.validate();
  return order;
}

}  // namespace kanbun
