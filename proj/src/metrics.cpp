#include "kanbun/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "kanbun/error.hpp"

namespace kanbun {

namespace {

std::int64_t merge_count(std::vector<int>& v, std::vector<int>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

void require_text(std::u32string_view candidate, std::u32string_view reference) {
  if (candidate.empty()) throw Error(ErrorCode::EmptyText, "empty candidate");
  if (reference.empty()) throw Error(ErrorCode::EmptyText, "empty reference");
}

std::size_t occurrences(std::u32string_view s, std::u32string_view sub) {
  std::size_t n = 0;
  for (auto at = s.find(sub); at != std::u32string_view::npos; at = s.find(sub, at + 1)) ++n;
  return n;
}

bool unique_in_both(std::u32string_view a, std::u32string_view b, std::u32string_view sub) {
  return occurrences(a, sub) == 1 && occurrences(b, sub) == 1;
}

}  // namespace

std::int64_t count_inversions(const ReadingOrder& gold, const ReadingOrder& predicted) {
  if (gold.length() != predicted.length() || gold.order.size() != predicted.order.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("gold reads {} of {} positions, prediction reads {} of {}", gold.order.size(),
                            gold.length(), predicted.order.size(), predicted.length()));
  }
  std::vector<int> rank(gold.length() + 1, -1);
  for (std::size_t r = 0; r < gold.order.size(); ++r) rank[gold.order[r]] = static_cast<int>(r);
  std::vector<int> seq;
  seq.reserve(predicted.order.size());
  for (Position p : predicted.order) {
    if (p < 1 || p > static_cast<Position>(gold.length()) || rank[p] < 0) {
      throw Error(ErrorCode::LengthMismatch, fmt::format("position {} is not read in the gold order", p));
    }
    seq.push_back(rank[p]);
  }
  std::vector<int> tmp(seq.size());
  return merge_count(seq, tmp, 0, seq.size());
}

double kendall_tau(const ReadingOrder& gold, const ReadingOrder& predicted) {
  const std::int64_t inv = count_inversions(gold, predicted);
  const auto n = static_cast<std::int64_t>(gold.order.size());
  if (n < 2) return 1.0;
  return 1.0 - static_cast<double>(4 * inv) / static_cast<double>(n * (n - 1));
}

double pmr(std::span<const OrderPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyList, "no order pairs");
  std::size_t exact = 0;
  for (const auto& p : pairs) {
    if (p.gold.order == p.predicted.order) ++exact;
  }
  return static_cast<double>(exact) / static_cast<double>(pairs.size());
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size(), 0);
    totals.resize(other.totals.size(), 0);
  }
  for (std::size_t n = 0; n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(std::u32string_view candidate, std::u32string_view reference, int max_n) {
  if (max_n < 1) throw Error(ErrorCode::EmptyList, "BLEU order must be at least 1");
  BleuStats st;
  st.matches.assign(static_cast<std::size_t>(max_n), 0);
  st.totals.assign(static_cast<std::size_t>(max_n), 0);
  st.candidate_length = static_cast<std::int64_t>(candidate.size());
  st.reference_length = static_cast<std::int64_t>(reference.size());
  for (std::size_t n = 1; n <= static_cast<std::size_t>(max_n); ++n) {
    if (candidate.size() < n) break;
    std::unordered_map<std::u32string_view, std::int64_t> ref_counts;
    for (std::size_t i = 0; i + n <= reference.size(); ++i) ++ref_counts[reference.substr(i, n)];
    std::unordered_map<std::u32string_view, std::int64_t> cand_counts;
    for (std::size_t i = 0; i + n <= candidate.size(); ++i) ++cand_counts[candidate.substr(i, n)];
    std::int64_t matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    st.matches[n - 1] = matched;
    st.totals[n - 1] = static_cast<std::int64_t>(candidate.size() - n + 1);
  }
  return st;
}

double bleu_score(const BleuStats& stats, int order, BleuSmoothing smoothing) {
  order = std::min<int>(order, static_cast<int>(stats.matches.size()));
  if (order < 1 || stats.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  int halvings = 0;
  for (int n = 0; n < order; ++n) {
    const auto total = stats.totals[static_cast<std::size_t>(n)];
    const auto match = stats.matches[static_cast<std::size_t>(n)];
    if (total == 0) return 0.0;
    double p;
    if (match == 0) {
      if (n == 0 || smoothing == BleuSmoothing::None) return 0.0;
      ++halvings;
      p = 1.0 / (std::ldexp(1.0, halvings) * static_cast<double>(total));
    } else {
      p = static_cast<double>(match) / static_cast<double>(total);
    }
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / order);
}

double bleu_char(std::span<const std::u32string> candidates, std::span<const std::u32string> references,
                 int max_n, BleuSmoothing smoothing) {
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} candidates but {} references", candidates.size(), references.size()));
  }
  if (candidates.empty()) throw Error(ErrorCode::EmptyCorpus, "no candidates");
  if (max_n < 1) throw Error(ErrorCode::EmptyList, "BLEU order must be at least 1");
  std::size_t longest = 0;
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    longest = std::max(longest, candidates[i].size());
    total += bleu_stats(candidates[i], references[i], max_n);
  }
  const int order = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_n), longest));
  return bleu_score(total, order, smoothing);
}

double sentence_bleu_char(std::u32string_view candidate, std::u32string_view reference, int max_n,
                          BleuSmoothing smoothing) {
  const std::u32string c(candidate), r(reference);
  return bleu_char(std::span<const std::u32string>(&c, 1), std::span<const std::u32string>(&r, 1), max_n, smoothing);
}

std::vector<int> ribes_alignment(std::u32string_view candidate, std::u32string_view reference) {
  std::vector<int> out;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const auto one = candidate.substr(i, 1);
    if (occurrences(reference, one) == 0) continue;
    if (unique_in_both(candidate, reference, one)) {
      out.push_back(static_cast<int>(reference.find(one)));
      continue;
    }
    for (std::size_t k = 1;; ++k) {
      bool any = false;
      if (i + k < candidate.size()) {
        any = true;
        const auto right = candidate.substr(i, k + 1);
        if (unique_in_both(candidate, reference, right)) {
          out.push_back(static_cast<int>(reference.find(right)));
          break;
        }
      }
      if (i >= k) {
        any = true;
        const auto left = candidate.substr(i - k, k + 1);
        if (unique_in_both(candidate, reference, left)) {
          out.push_back(static_cast<int>(reference.find(left) + k));
          break;
        }
      }
      if (!any) break;
    }
  }
  return out;
}

double ribes_char(std::u32string_view candidate, std::u32string_view reference, double alpha, double beta) {
  require_text(candidate, reference);
  const auto worder = ribes_alignment(candidate, reference);
  const std::size_t n = worder.size();
  if (n == 0) return 0.0;
  double nkt;
  if (n < 2) {
    nkt = reference.size() == 1 ? 1.0 : 0.0;
  } else {
    std::int64_t ascending = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (worder[i] < worder[j]) ++ascending;
      }
    }
    nkt = static_cast<double>(ascending) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  }
  const double h = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double precision = static_cast<double>(n) / h;
  const double bp = h >= r ? 1.0 : std::exp(1.0 - r / h);
  return nkt * std::pow(precision, alpha) * std::pow(bp, beta);
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_char(std::u32string_view candidate, std::u32string_view reference) {
  require_text(candidate, reference);
  const double l = static_cast<double>(lcs_length(candidate, reference));
  if (l == 0) return 0.0;
  const double recall = l / static_cast<double>(reference.size());
  const double precision = l / static_cast<double>(candidate.size());
  return 2.0 * precision * recall / (precision + recall);
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

double compensated_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyList, "mean of an empty list");
  return compensated_sum(values) / static_cast<double>(values.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, fmt::format("{} values against {}", x.size(), y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::ZeroVariance, "correlation needs at least two values");
  const double mx = compensated_mean(x);
  const double my = compensated_mean(y);
  std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  const double vx = compensated_sum(sxx), vy = compensated_sum(syy);
  if (vx == 0.0 || vy == 0.0) throw Error(ErrorCode::ZeroVariance, "a score list is constant");
  const double r = compensated_sum(sxy) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, fmt::format("{} values against {}", x.size(), y.size()));
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double fleiss_kappa(const std::vector<std::vector<int>>& ratings) {
  if (ratings.empty()) throw Error(ErrorCode::EmptyList, "no rated items");
  const std::size_t k = ratings.front().size();
  long raters = -1;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].size() != k) {
      throw Error(ErrorCode::LengthMismatch,
                  fmt::format("item {} has {} categories, expected {}", i + 1, ratings[i].size(), k));
    }
    long sum = 0;
    for (int c : ratings[i]) {
      if (c < 0) throw Error(ErrorCode::UnequalRaterCounts, fmt::format("negative count in item {}", i + 1));
      sum += c;
    }
    if (raters < 0) raters = sum;
    if (sum != raters) {
      throw Error(ErrorCode::UnequalRaterCounts,
                  fmt::format("item {} has {} ratings, expected {}", i + 1, sum, raters));
    }
  }
  if (raters < 2) throw Error(ErrorCode::UnequalRaterCounts, "at least two raters per item are required");

  const double n = static_cast<double>(raters);
  const double items = static_cast<double>(ratings.size());
  std::vector<double> agreement(ratings.size());
  std::vector<std::int64_t> column(k, 0);
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    std::int64_t sq = 0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<std::int64_t>(ratings[i][j]) * ratings[i][j];
      column[j] += ratings[i][j];
    }
    agreement[i] = static_cast<double>(sq - raters) / (n * (n - 1.0));
  }
  const double p_bar = compensated_mean(agreement);
  std::vector<double> share(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double p = static_cast<double>(column[j]) / (items * n);
    share[j] = p * p;
  }
  const double p_e = compensated_sum(share);
  if (p_e >= 1.0) throw Error(ErrorCode::DegenerateAgreement, "every rating falls in one category");
  return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace kanbun
