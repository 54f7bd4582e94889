#include <fmt/format.h>

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kanbun/error.hpp"
#include "kanbun/reorder.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

namespace {

using Side = BaselinePredictor::Side;
using BigramKey = BaselinePredictor::BigramKey;

BigramKey left_key(const std::u32string& s, std::size_t i) { return {s.substr(i - 1, 2), Side::Left}; }
BigramKey right_key(const std::u32string& s, std::size_t i) { return {s.substr(i, 2), Side::Right}; }

/// Feature vector given stat lookups. Lookups return an empty Stat when the
/// key is unseen.
template <typename CharLookup, typename BigramLookup>
std::array<double, 4> compute_features(const RankInput& in, CharLookup&& char_stat, BigramLookup&& bigram_stat) {
  const std::size_t n = in.sentence.size();
  const std::size_t i = static_cast<std::size_t>(in.index - 1);
  const double relpos = static_cast<double>(in.index) / static_cast<double>(n);

  const Stat c = char_stat(in.character);
  const double e_char = c.count > 0 ? c.mean() : relpos;

  Stat dev;
  if (i > 0) {
    const Stat l = bigram_stat(left_key(in.sentence, i));
    dev.sum += l.sum;
    dev.count += l.count;
  }
  if (i + 1 < n) {
    const Stat r = bigram_stat(right_key(in.sentence, i));
    dev.sum += r.sum;
    dev.count += r.count;
  }
  const double e_bigram = dev.count > 0 ? relpos + dev.mean() : relpos;
  return {1.0, relpos, e_char, e_bigram};
}

struct Contribution {
  std::map<char32_t, Stat> chars;
  std::map<BigramKey, Stat> bigrams;
};

void add(Stat& s, double v) {
  s.sum += v;
  s.count += 1.0;
}

Stat minus(const Stat& total, const Stat* own) {
  if (!own) return total;
  return {total.sum - own->sum, total.count - own->count};
}

template <typename Map>
Stat lookup(const Map& m, const typename Map::key_type& k) {
  auto it = m.find(k);
  return it == m.end() ? Stat{} : it->second;
}

template <typename Map>
const Stat* find_ptr(const Map& m, const typename Map::key_type& k) {
  auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}

[[noreturn]] void bad_model(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::BadModel, fmt::format("line {}: {}", line, why));
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_model(line, fmt::format("bad number '{}'", s));
  }
  return v;
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

}  // namespace

BaselinePredictor BaselinePredictor::fit(std::span<const RankExample> examples) {
  if (examples.empty()) throw Error(ErrorCode::EmptyCorpus, "no training examples");

  struct Row {
    RankInput input;
    double gold;
    std::size_t sentence;
  };
  std::vector<Row> rows;
  rows.reserve(examples.size());
  std::vector<Contribution> contributions;
  for (const auto& ex : examples) {
    RankInput in = parse_input_text(ex.input_text);
    const bool starts = in.index == 1;
    if (starts) {
      contributions.emplace_back();
    } else if (rows.empty() || rows.back().input.index + 1 != in.index || rows.back().input.sentence != in.sentence) {
      throw Error(ErrorCode::ParseError, fmt::format("examples are not grouped by sentence at '{}'", ex.input_text));
    }
    rows.push_back({std::move(in), ex.gold_rank, contributions.size() - 1});
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const bool ends = k + 1 == rows.size() || rows[k + 1].input.index == 1;
    if (ends && rows[k].input.index != static_cast<Position>(rows[k].input.sentence.size())) {
      throw Error(ErrorCode::ParseError, "incomplete sentence in examples");
    }
  }

  BaselinePredictor model;
  for (const auto& row : rows) {
    const auto& s = row.input.sentence;
    const std::size_t i = static_cast<std::size_t>(row.input.index - 1);
    const double dev = row.gold - static_cast<double>(row.input.index) / static_cast<double>(s.size());
    auto& own = contributions[row.sentence];
    add(own.chars[row.input.character], row.gold);
    add(model.chars_[row.input.character], row.gold);
    if (i > 0) {
      add(own.bigrams[left_key(s, i)], dev);
      add(model.bigrams_[left_key(s, i)], dev);
    }
    if (i + 1 < s.size()) {
      add(own.bigrams[right_key(s, i)], dev);
      add(model.bigrams_[right_key(s, i)], dev);
    }
  }

  // Leave-one-sentence-out features.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), 4);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& own = contributions[rows[k].sentence];
    const auto f = compute_features(
        rows[k].input,
        [&](char32_t c) { return minus(lookup(model.chars_, c), find_ptr(own.chars, c)); },
        [&](const BigramKey& key) { return minus(lookup(model.bigrams_, key), find_ptr(own.bigrams, key)); });
    for (int j = 0; j < 4; ++j) x(static_cast<Eigen::Index>(k), j) = f[static_cast<std::size_t>(j)];
    y(static_cast<Eigen::Index>(k)) = rows[k].gold;
  }
  const Eigen::VectorXd w = x.completeOrthogonalDecomposition().solve(y);
  for (int j = 0; j < 4; ++j) model.weights_[static_cast<std::size_t>(j)] = w(j);
  return model;
}

std::array<double, 4> BaselinePredictor::features(const RankInput& input) const {
  return compute_features(
      input, [&](char32_t c) { return lookup(chars_, c); },
      [&](const BigramKey& key) { return lookup(bigrams_, key); });
}

double BaselinePredictor::score(std::string_view input_text) const {
  const auto f = features(parse_input_text(input_text));
  double s = 0.0;
  for (std::size_t j = 0; j < 4; ++j) s += weights_[j] * f[j];
  return s;
}

std::string BaselinePredictor::serialize() const {
  std::string out = fmt::format("{}\t{}\n", kMagic, kVersion);
  out += fmt::format("weights\t{}\t{}\t{}\t{}\n", weights_[0], weights_[1], weights_[2], weights_[3]);
  for (const auto& [c, st] : chars_) {
    out += fmt::format("char\t{}\t{}\t{}\n", utf8::encode(c), st.sum, st.count);
  }
  for (const auto& [key, st] : bigrams_) {
    out += fmt::format("bigram\t{}\t{}\t{}\t{}\n", utf8::encode(key.first), static_cast<char>(key.second), st.sum,
                       st.count);
  }
  return out;
}

BaselinePredictor BaselinePredictor::deserialize(std::string_view text) {
  BaselinePredictor model;
  std::size_t line_no = 0;
  bool have_weights = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const auto f = split_tabs(line);
    if (line_no == 1) {
      if (f.size() != 2 || f[0] != kMagic) bad_model(line_no, "not a baseline model file");
      if (f[1] != std::to_string(kVersion)) bad_model(line_no, fmt::format("unsupported version '{}'", f[1]));
      continue;
    }
    if (line.empty()) continue;
    auto count_of = [&](std::string_view s) {
      const double c = parse_double(s, line_no);
      if (c <= 0 || c != std::floor(c)) bad_model(line_no, "count must be a positive integer");
      return c;
    };
    std::u32string key;
    if (f[0] == "weights") {
      if (f.size() != 5 || have_weights) bad_model(line_no, "bad weights record");
      for (std::size_t j = 0; j < 4; ++j) model.weights_[j] = parse_double(f[j + 1], line_no);
      have_weights = true;
    } else if (f[0] == "char") {
      if (f.size() != 4) bad_model(line_no, "bad char record");
      try {
        key = utf8::decode(f[1]);
      } catch (const Error&) {
        bad_model(line_no, "bad UTF-8");
      }
      if (key.size() != 1) bad_model(line_no, "char key must be one character");
      Stat st{parse_double(f[2], line_no), count_of(f[3])};
      if (!model.chars_.emplace(key[0], st).second) bad_model(line_no, "duplicate char record");
    } else if (f[0] == "bigram") {
      if (f.size() != 5 || f[2].size() != 1 || (f[2][0] != 'L' && f[2][0] != 'R')) {
        bad_model(line_no, "bad bigram record");
      }
      try {
        key = utf8::decode(f[1]);
      } catch (const Error&) {
        bad_model(line_no, "bad UTF-8");
      }
      if (key.size() != 2) bad_model(line_no, "bigram key must be two characters");
      Stat st{parse_double(f[3], line_no), count_of(f[4])};
      if (!model.bigrams_.emplace(BigramKey{key, static_cast<Side>(f[2][0])}, st).second) {
        bad_model(line_no, "duplicate bigram record");
      }
    } else {
      bad_model(line_no, fmt::format("unknown record '{}'", f[0]));
    }
  }
  if (line_no == 0) throw Error(ErrorCode::BadModel, "empty model file");
  if (!have_weights) throw Error(ErrorCode::BadModel, "model has no weights record");
  return model;
}

void BaselinePredictor::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  out << serialize();
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
}

BaselinePredictor BaselinePredictor::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

BaselinePredictor baseline_fit(std::span<const std::pair<SourceSentence, ReadingOrder>> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "empty training corpus");
  std::vector<RankExample> examples;
  for (const auto& [src, order] : corpus) {
    auto ex = make_examples(src, order);
    examples.insert(examples.end(), ex.begin(), ex.end());
  }
  return BaselinePredictor::fit(examples);
}

}  // namespace kanbun
