#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbun/core.hpp"

namespace kanbun {

struct OrderPair {
  ReadingOrder gold;
  ReadingOrder predicted;
};

/// Pairs of positions read in opposite relative order. Throws
/// Error(LengthMismatch) when the two orders cover different positions.
std::int64_t count_inversions(const ReadingOrder& gold, const ReadingOrder& predicted);

/// 1 - 4 * inversions / (n (n - 1)); 1.0 when fewer than two characters are read.
double kendall_tau(const ReadingOrder& gold, const ReadingOrder& predicted);
inline double kendall_tau(const OrderPair& pair) { return kendall_tau(pair.gold, pair.predicted); }

/// Fraction of exact matches. Throws Error(EmptyList).
double pmr(std::span<const OrderPair> pairs);

enum class BleuSmoothing { Exponential, None };

/// Clipped character n-gram matches and totals for n = 1..max_n.
struct BleuStats {
  std::vector<std::int64_t> matches;
  std::vector<std::int64_t> totals;
  std::int64_t candidate_length = 0;
  std::int64_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats bleu_stats(std::u32string_view candidate, std::u32string_view reference, int max_n = 4);

/// Geometric mean of the first `order` precisions times the brevity penalty.
double bleu_score(const BleuStats& stats, int order, BleuSmoothing smoothing = BleuSmoothing::Exponential);

/// Corpus BLEU over characters. The n-gram order is capped at the longest
/// candidate. Throws Error(LengthMismatch) or Error(EmptyCorpus).
double bleu_char(std::span<const std::u32string> candidates, std::span<const std::u32string> references,
                 int max_n = 4, BleuSmoothing smoothing = BleuSmoothing::Exponential);
double sentence_bleu_char(std::u32string_view candidate, std::u32string_view reference, int max_n = 4,
                          BleuSmoothing smoothing = BleuSmoothing::Exponential);

/// Reference positions aligned to candidate characters, in candidate order.
std::vector<int> ribes_alignment(std::u32string_view candidate, std::u32string_view reference);

/// NKT * P^alpha * BP^beta over characters. Throws Error(EmptyText).
double ribes_char(std::u32string_view candidate, std::u32string_view reference, double alpha = 0.25,
                  double beta = 0.10);

std::size_t lcs_length(std::u32string_view a, std::u32string_view b);
/// ROUGE-L F-measure over characters. Throws Error(EmptyText).
double rouge_l_char(std::u32string_view candidate, std::u32string_view reference);

/// Throws Error(LengthMismatch) or Error(ZeroVariance).
double pearson(std::span<const double> x, std::span<const double> y);
std::vector<double> average_ranks(std::span<const double> x);
double spearman(std::span<const double> x, std::span<const double> y);

/// Rows are items, columns categories, cells rater counts. Throws
/// Error(UnequalRaterCounts) or Error(DegenerateAgreement).
double fleiss_kappa(const std::vector<std::vector<int>>& ratings);

/// Neumaier compensated sum.
double compensated_sum(std::span<const double> values);
double compensated_mean(std::span<const double> values);

}  // namespace kanbun
