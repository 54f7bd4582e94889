#include "kanbun/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

namespace {

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t start = 0, number = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    out.push_back({number, line});
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

/// Runs `body` and rethrows library errors as ParseError at `line`.
template <typename F>
auto at_line(const std::string& origin, std::size_t line, F&& body) {
  try {
    return body();
  } catch (const LocatedError&) {
    throw;
  } catch (const Error& e) {
    throw LocatedError(ErrorCode::ParseError, origin, line,
                       fmt::format("{}: {}", error_code_name(e.code()), e.what()));
  }
}

std::vector<ReadingFlag> flags_field(std::string_view field, std::size_t n) {
  if (field.empty()) return std::vector<ReadingFlag>(n, ReadingFlag::Normal);
  auto flags = parse_flags(field);
  if (flags.size() != n) {
    throw Error(ErrorCode::InvalidOrder, fmt::format("{} flags for {} characters", flags.size(), n));
  }
  return flags;
}

std::string flags_field(const std::vector<ReadingFlag>& flags) {
  const bool plain = std::all_of(flags.begin(), flags.end(), [](ReadingFlag f) { return f == ReadingFlag::Normal; });
  return plain ? std::string() : flags_string(flags);
}

}  // namespace

std::vector<Position> align_kanbun(const SourceSentence& source, const ReadingOrder& order,
                                   std::u32string_view kanbun) {
  std::vector<Position> alignment;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < kanbun.size(); ++i) {
    const char32_t c = kanbun[i];
    if (!is_cjk_ideograph(c)) continue;
    while (slot < order.order.size() && source.at(order.order[slot]) != c) ++slot;
    if (slot == order.order.size()) {
      throw Error(ErrorCode::InvalidOrder,
                  fmt::format("kanbun kanji {} at offset {} does not follow the reading order", utf8::encode(c), i));
    }
    alignment.push_back(order.order[slot++]);
  }
  return alignment;
}

CorpusRecord make_record(std::string id, std::string poem_id, std::string_view source, const ReadingOrder& order,
                         std::string_view kanbun) {
  if (id.empty()) throw Error(ErrorCode::ParseError, "empty id");
  if (poem_id.empty()) throw Error(ErrorCode::ParseError, "empty poem id");
  CorpusRecord r;
  r.source = segment_chars(source, id, poem_id);
  r.id = std::move(id);
  r.poem_id = std::move(poem_id);
  if (order.length() != r.source.size()) {
    throw Error(ErrorCode::InvalidOrder,
                fmt::format("order covers {} positions, source has {}", order.length(), r.source.size()));
  }
  order.validate();
  r.order = order;
  r.kanbun.text = utf8::decode(kanbun);
  if (r.kanbun.text.empty()) throw Error(ErrorCode::EmptyInput, "empty kanbun text");
  r.kanbun.alignment = align_kanbun(r.source, r.order, r.kanbun.text);
  return r;
}

std::vector<CorpusRecord> parse_corpus(std::string_view text, const std::string& origin,
                                       std::vector<std::size_t>* lines) {
  std::vector<CorpusRecord> records;
  std::unordered_set<std::string> ids;
  for (const auto& line : lines_of(text)) {
    auto f = split_tabs(line.text);
    if (f.size() != 6) {
      throw LocatedError(ErrorCode::ParseError, origin, line.number,
                         fmt::format("expected 6 tab-separated fields, found {}", f.size()));
    }
    auto record = at_line(origin, line.number, [&] {
      const auto n = utf8::decode(f[2]).size();
      const auto order = parse_order_string(f[3], flags_field(f[5], n));
      return make_record(std::string(f[0]), std::string(f[1]), f[2], order, f[4]);
    });
    if (!ids.insert(record.id).second) {
      throw LocatedError(ErrorCode::DuplicateId, origin, line.number, fmt::format("duplicate id '{}'", record.id));
    }
    records.push_back(std::move(record));
    if (lines) lines->push_back(line.number);
  }
  return records;
}

std::string format_record(const CorpusRecord& r) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", r.id, r.poem_id, r.source.text(), order_string(r.order),
                     utf8::encode(r.kanbun.text), flags_field(r.order.flags));
}

std::string format_corpus(std::span<const CorpusRecord> records) {
  std::string out;
  for (const auto& r : records) out += format_record(r);
  return out;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, std::vector<std::size_t>* lines) {
  return parse_corpus(read_file(path), path.string(), lines);
}

void save_corpus(std::span<const CorpusRecord> records, const std::filesystem::path& path) {
  write_file(path, format_corpus(records));
}

std::vector<RawRecord> parse_raw(std::string_view text, const std::string& origin) {
  std::vector<RawRecord> out;
  std::unordered_set<std::string> ids;
  for (const auto& line : lines_of(text)) {
    auto f = split_tabs(line.text);
    if (f.size() != 4) {
      throw LocatedError(ErrorCode::ParseError, origin, line.number,
                         fmt::format("expected 4 tab-separated fields, found {}", f.size()));
    }
    if (f[0].empty() || f[1].empty()) {
      throw LocatedError(ErrorCode::ParseError, origin, line.number, "empty id or poem id");
    }
    if (!ids.insert(std::string(f[0])).second) {
      throw LocatedError(ErrorCode::DuplicateId, origin, line.number, fmt::format("duplicate id '{}'", f[0]));
    }
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3]), line.number});
  }
  return out;
}

CorpusRecord extract_record(const RawRecord& raw, std::span<const AnnotationEscape> escapes,
                            const CharFormTable* table) {
  SourceSentence src = segment_chars(raw.source, raw.id, raw.poem_id);
  std::u32string kanbun = utf8::decode(raw.kanbun);
  if (table) {
    src.chars = normalize_forms(src.chars, *table);
    kanbun = normalize_forms(kanbun, *table);
  }
  const auto parsed = extract_order(src, kanbun, escapes);
  return make_record(raw.id, raw.poem_id, src.text(), parsed.order, utf8::encode(kanbun));
}

std::vector<OrderEntry> parse_orders(std::string_view text, const std::string& origin,
                                     std::vector<std::size_t>* lines) {
  std::vector<OrderEntry> out;
  std::unordered_set<std::string> ids;
  for (const auto& line : lines_of(text)) {
    auto f = split_tabs(line.text);
    if (f.size() != 3) {
      throw LocatedError(ErrorCode::ParseError, origin, line.number,
                         fmt::format("expected 3 tab-separated fields, found {}", f.size()));
    }
    if (f[0].empty()) throw LocatedError(ErrorCode::ParseError, origin, line.number, "empty id");
    auto order = at_line(origin, line.number, [&] {
      std::vector<ReadingFlag> flags;
      if (f[2].empty()) {
        // Without flags the length is the number of positions read.
        std::size_t n = f[1].find(',') == std::string_view::npos
                            ? f[1].size()
                            : static_cast<std::size_t>(std::count(f[1].begin(), f[1].end(), ',')) + 1;
        flags.assign(n, ReadingFlag::Normal);
      } else {
        flags = parse_flags(f[2]);
      }
      return parse_order_string(f[1], std::move(flags));
    });
    if (!ids.insert(std::string(f[0])).second) {
      throw LocatedError(ErrorCode::DuplicateId, origin, line.number, fmt::format("duplicate id '{}'", f[0]));
    }
    out.push_back({std::string(f[0]), std::move(order)});
    if (lines) lines->push_back(line.number);
  }
  return out;
}

std::string format_orders(std::span<const OrderEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    out += fmt::format("{}\t{}\t{}\n", e.id, order_string(e.order), flags_field(e.order.flags));
  }
  return out;
}

void SplitSpec::validate() const {
  for (double r : {train, validation, test}) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::BadSplitSpec, fmt::format("ratio {} outside (0, 1)", r));
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadSplitSpec,
                fmt::format("ratios sum to {}, not 1", train + validation + test));
  }
}

std::array<std::size_t, 3> split_counts(std::size_t poems, const SplitSpec& spec) {
  spec.validate();
  if (poems < 3) throw Error(ErrorCode::TooFewGroups, fmt::format("{} poems cannot fill three splits", poems));
  const std::array<double, 3> ratios{spec.train, spec.validation, spec.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> fraction{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double quota = ratios[k] * static_cast<double>(poems);
    counts[k] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    fraction[k] = quota - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  // Largest remainder; ties favour the later split.
  std::array<std::size_t, 3> by_fraction{2, 1, 0};
  std::stable_sort(by_fraction.begin(), by_fraction.end(),
                   [&](std::size_t a, std::size_t b) { return fraction[a] > fraction[b] + 1e-9; });
  for (std::size_t k = 0; assigned < poems; k = (k + 1) % 3, ++assigned) ++counts[by_fraction[k]];
  for (std::size_t k = 0; k < 3; ++k) {
    if (counts[k] > 0) continue;
    auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    --counts[donor];
    ++counts[k];
  }
  return counts;
}

std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64& rng) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

CorpusSplit group_split(std::span<const CorpusRecord> records, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::string> poems;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.poem_id).second) poems.push_back(r.poem_id);
  }
  const auto counts = split_counts(poems.size(), spec);

  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = poems.size(); i-- > 1;) {
    std::swap(poems[i], poems[static_cast<std::size_t>(uniform_below(i + 1, rng))]);
  }
  std::unordered_map<std::string, int> bucket;
  for (std::size_t i = 0; i < poems.size(); ++i) {
    bucket[poems[i]] = i < counts[0] ? 0 : i < counts[0] + counts[1] ? 1 : 2;
  }
  CorpusSplit out;
  for (const auto& r : records) {
    switch (bucket.at(r.poem_id)) {
      case 0: out.train.push_back(r); break;
      case 1: out.validation.push_back(r); break;
      default: out.test.push_back(r); break;
    }
  }
  return out;
}

CorpusStats corpus_stats(std::span<const CorpusRecord> records) {
  CorpusStats s;
  std::unordered_set<std::string> poems;
  for (const auto& r : records) {
    poems.insert(r.poem_id);
    s.characters += r.source.size();
  }
  s.poems = poems.size();
  s.sentences = records.size();
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LocatedError(ErrorCode::Io, path.string(), 0, "cannot open file for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LocatedError(ErrorCode::Io, path.string(), 0, "cannot open file for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw LocatedError(ErrorCode::Io, path.string(), 0, "write failed");
}

}  // namespace kanbun
