#include "kanbun/reorder.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

std::string make_input_text(const SourceSentence& src, Position p) {
  return fmt::format("{}{}{}{}", utf8::encode(src.at(p)), p, kSep, src.text());
}

RankInput parse_input_text(std::string_view input_text) {
  const auto sep = input_text.find(kSep);
  auto bad = [&] {
    return Error(ErrorCode::ParseError, fmt::format("malformed rank input '{}'", input_text));
  };
  if (sep == std::string_view::npos) throw bad();
  const std::u32string head = utf8::decode(input_text.substr(0, sep));
  if (head.size() < 2) throw bad();
  RankInput in;
  in.character = head[0];
  for (std::size_t i = 1; i < head.size(); ++i) {
    if (head[i] < U'0' || head[i] > U'9' || in.index > 1'000'000) throw bad();
    in.index = in.index * 10 + static_cast<int>(head[i] - U'0');
  }
  in.sentence = utf8::decode(input_text.substr(sep + kSep.size()));
  if (in.index < 1 || in.index > static_cast<Position>(in.sentence.size()) ||
      in.sentence[in.index - 1] != in.character) {
    throw bad();
  }
  return in;
}

std::vector<double> gold_ranks(const ReadingOrder& order) {
  order.validate();
  const std::size_t n = order.length();
  std::vector<double> slot(n, -1.0);
  for (std::size_t r = 0; r < order.order.size(); ++r) slot[order.order[r] - 1] = static_cast<double>(r + 1);
  std::vector<double> filled = slot;
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] >= 0) continue;
    double left = -1.0, right = -1.0;
    for (std::size_t j = i; j-- > 0;) {
      if (slot[j] >= 0) {
        left = slot[j];
        break;
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (slot[j] >= 0) {
        right = slot[j];
        break;
      }
    }
    if (left >= 0 && right >= 0) {
      filled[i] = (left + right) / 2.0;
    } else if (left >= 0) {
      filled[i] = left + 0.5;
    } else if (right >= 0) {
      filled[i] = right - 0.5;
    } else {
      filled[i] = static_cast<double>(i + 1);
    }
  }
  std::vector<std::size_t> by_slot(n);
  std::iota(by_slot.begin(), by_slot.end(), 0);
  std::stable_sort(by_slot.begin(), by_slot.end(),
                   [&](std::size_t a, std::size_t b) { return filled[a] < filled[b]; });
  std::vector<double> ranks(n);
  for (std::size_t r = 0; r < n; ++r) ranks[by_slot[r]] = static_cast<double>(r + 1) / static_cast<double>(n);
  return ranks;
}

std::vector<RankExample> make_examples(const SourceSentence& src, const ReadingOrder& order) {
  if (order.length() != src.size()) {
    throw Error(ErrorCode::InvalidOrder,
                fmt::format("order covers {} positions, sentence has {}", order.length(), src.size()));
  }
  const auto ranks = gold_ranks(order);
  std::vector<RankExample> out;
  out.reserve(src.size());
  for (Position p = 1; p <= static_cast<Position>(src.size()); ++p) {
    out.push_back({make_input_text(src, p), ranks[p - 1]});
  }
  return out;
}

ReadingOrder decode_order(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyScores, "no scores to decode");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorCode::InvalidOrder, fmt::format("score for position {} is not finite", i + 1));
    }
  }
  std::vector<Position> order(scores.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](Position a, Position b) { return scores[a - 1] < scores[b - 1]; });
  return ReadingOrder::from_permutation(std::move(order));
}

ReadingOrder project_order(const ReadingOrder& predicted, const std::vector<ReadingFlag>& flags) {
  if (predicted.length() != flags.size()) {
    throw Error(ErrorCode::InvalidOrder,
                fmt::format("prediction covers {} positions, flags cover {}", predicted.length(), flags.size()));
  }
  ReadingOrder out;
  out.flags = flags;
  for (Position p : predicted.order) {
    if (flags[p - 1] != ReadingFlag::Unpronounced) out.order.push_back(p);
  }
  out.validate();
  return out;
}

ReadingOrder reorder_sentence(const SourceSentence& src, const RankPredictor& predictor) {
  std::vector<double> scores;
  scores.reserve(src.size());
  for (Position p = 1; p <= static_cast<Position>(src.size()); ++p) {
    scores.push_back(predictor.score(make_input_text(src, p)));
  }
  return decode_order(scores);
}

}  // namespace kanbun
