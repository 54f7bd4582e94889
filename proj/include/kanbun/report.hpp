#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbun/metrics.hpp"

namespace kanbun {

struct OrderRecord {
  std::string id;
  double tau = 0.0;
  bool exact = false;
};

struct OrderReport {
  std::vector<OrderRecord> sentences;
  double tau_mean = 0.0;
  double pmr = 0.0;
};

/// Throws Error(LengthMismatch) or Error(EmptyList).
OrderReport evaluate_orders(std::span<const std::string> ids, std::span<const OrderPair> pairs);

struct MtRecord {
  std::string id;
  BleuStats bleu_counts;
  double bleu = 0.0;
  double ribes = 0.0;
  double rouge_l = 0.0;
};

struct MtReport {
  std::vector<MtRecord> sentences;
  int max_n = 4;
  BleuSmoothing smoothing = BleuSmoothing::Exponential;
  double bleu = 0.0;
  double bleu_sentence_mean = 0.0;
  double ribes_mean = 0.0;
  double rouge_l_mean = 0.0;
};

MtReport evaluate_mt(std::span<const std::string> ids, std::span<const std::u32string> candidates,
                     std::span<const std::u32string> references, int max_n = 4,
                     BleuSmoothing smoothing = BleuSmoothing::Exponential);

std::string format_order_report(const OrderReport& report);
std::string format_mt_report(const MtReport& report);

/// A report file split into its header, rows and `[corpus]` block.
struct ParsedReport {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> corpus;
};

/// Throws Error(ParseError).
ParsedReport parse_report(std::string_view text);

}  // namespace kanbun
