#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbun/char_forms.hpp"
#include "kanbun/core.hpp"
#include "kanbun/kanbun_parse.hpp"

namespace kanbun {

struct CorpusRecord {
  std::string id;
  std::string poem_id;
  SourceSentence source;
  ReadingOrder order;
  KanbunSentence kanbun;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

/// Source positions of the kanji in `kanbun`, found by walking them against
/// the reading order. Throws Error(InvalidOrder) when they do not follow it.
std::vector<Position> align_kanbun(const SourceSentence& source, const ReadingOrder& order,
                                   std::u32string_view kanbun);

/// Builds and validates a record from its text fields.
CorpusRecord make_record(std::string id, std::string poem_id, std::string_view source, const ReadingOrder& order,
                         std::string_view kanbun);

/// Line format `id\tpoem_id\tsource\torder\tkanbun\tflags`; an empty flags
/// field means every position is read normally. Blank lines are ignored.
/// Throws LocatedError(ParseError | DuplicateId) naming `origin` and the line.
/// `lines`, when given, receives the line number of each record.
std::vector<CorpusRecord> parse_corpus(std::string_view text, const std::string& origin = "<corpus>",
                                       std::vector<std::size_t>* lines = nullptr);
std::string format_corpus(std::span<const CorpusRecord> records);
std::string format_record(const CorpusRecord& record);
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path, std::vector<std::size_t>* lines = nullptr);
void save_corpus(std::span<const CorpusRecord> records, const std::filesystem::path& path);

/// Unaligned parallel line: `id\tpoem_id\tsource\tkanbun`.
struct RawRecord {
  std::string id;
  std::string poem_id;
  std::string source;
  std::string kanbun;
  std::size_t line = 0;
};

std::vector<RawRecord> parse_raw(std::string_view text, const std::string& origin = "<raw>");

/// Extracts the reading order of a raw line. `table` normalizes both sides
/// when given.
CorpusRecord extract_record(const RawRecord& raw, std::span<const AnnotationEscape> escapes,
                            const CharFormTable* table);

/// Predicted or gold orders without text: `id\torder\tflags`.
struct OrderEntry {
  std::string id;
  ReadingOrder order;

  friend bool operator==(const OrderEntry&, const OrderEntry&) = default;
};

std::vector<OrderEntry> parse_orders(std::string_view text, const std::string& origin = "<orders>",
                                     std::vector<std::size_t>* lines = nullptr);
std::string format_orders(std::span<const OrderEntry> entries);

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;

  /// Throws Error(BadSplitSpec).
  void validate() const;
};

struct CorpusSplit {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> validation;
  std::vector<CorpusRecord> test;
};

/// Poem counts per split by largest remainder; each split gets at least one.
std::array<std::size_t, 3> split_counts(std::size_t poems, const SplitSpec& spec);

/// Uniform integer in [0, bound) from a 64-bit Mersenne Twister, identical
/// on every platform.
std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64& rng);

/// Shuffles poems with the seed and deals whole poems to train, validation
/// and test. Records keep their input order. Throws Error(TooFewGroups).
CorpusSplit group_split(std::span<const CorpusRecord> records, const SplitSpec& spec);

struct CorpusStats {
  std::size_t poems = 0;
  std::size_t sentences = 0;
  std::size_t characters = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats corpus_stats(std::span<const CorpusRecord> records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kanbun
