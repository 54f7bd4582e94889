#include "kanbun/report.hpp"

#include <fmt/format.h>

#include "kanbun/error.hpp"

namespace kanbun {

namespace {

constexpr std::string_view kHeaderPrefix = "# kanbun-metric-report v1 ";

std::string num(double v) { return fmt::format("{:.6f}", v); }

void check_ids(std::size_t ids, std::size_t items) {
  if (ids != items) throw Error(ErrorCode::LengthMismatch, fmt::format("{} ids for {} items", ids, items));
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

OrderReport evaluate_orders(std::span<const std::string> ids, std::span<const OrderPair> pairs) {
  check_ids(ids.size(), pairs.size());
  OrderReport r;
  std::vector<double> taus;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double tau = kendall_tau(pairs[i]);
    taus.push_back(tau);
    r.sentences.push_back({ids[i], tau, pairs[i].gold.order == pairs[i].predicted.order});
  }
  r.pmr = pmr(pairs);
  r.tau_mean = compensated_mean(taus);
  return r;
}

MtReport evaluate_mt(std::span<const std::string> ids, std::span<const std::u32string> candidates,
                     std::span<const std::u32string> references, int max_n, BleuSmoothing smoothing) {
  check_ids(ids.size(), candidates.size());
  MtReport r;
  r.max_n = max_n;
  r.smoothing = smoothing;
  r.bleu = bleu_char(candidates, references, max_n, smoothing);
  std::vector<double> bleu, ribes, rouge;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    MtRecord rec;
    rec.id = ids[i];
    rec.bleu_counts = bleu_stats(candidates[i], references[i], max_n);
    rec.bleu = sentence_bleu_char(candidates[i], references[i], max_n, smoothing);
    rec.ribes = ribes_char(candidates[i], references[i]);
    rec.rouge_l = rouge_l_char(candidates[i], references[i]);
    bleu.push_back(rec.bleu);
    ribes.push_back(rec.ribes);
    rouge.push_back(rec.rouge_l);
    r.sentences.push_back(std::move(rec));
  }
  r.bleu_sentence_mean = compensated_mean(bleu);
  r.ribes_mean = compensated_mean(ribes);
  r.rouge_l_mean = compensated_mean(rouge);
  return r;
}

std::string format_order_report(const OrderReport& report) {
  std::string out = fmt::format("{}order\n", kHeaderPrefix);
  out += "id\ttau\texact\n";
  for (const auto& s : report.sentences) out += fmt::format("{}\t{}\t{}\n", s.id, num(s.tau), s.exact ? 1 : 0);
  out += "[corpus]\n";
  out += fmt::format("sentences\t{}\n", report.sentences.size());
  out += fmt::format("tau_mean\t{}\n", num(report.tau_mean));
  out += fmt::format("pmr\t{}\n", num(report.pmr));
  return out;
}

std::string format_mt_report(const MtReport& report) {
  std::string out = fmt::format("{}mt\n", kHeaderPrefix);
  out += "id";
  for (int n = 1; n <= report.max_n; ++n) out += fmt::format("\tbleu_m{}", n);
  for (int n = 1; n <= report.max_n; ++n) out += fmt::format("\tbleu_t{}", n);
  out += "\tcand_len\tref_len\tbleu\tribes\trouge_l\n";
  for (const auto& s : report.sentences) {
    out += s.id;
    for (auto m : s.bleu_counts.matches) out += fmt::format("\t{}", m);
    for (auto t : s.bleu_counts.totals) out += fmt::format("\t{}", t);
    out += fmt::format("\t{}\t{}\t{}\t{}\t{}\n", s.bleu_counts.candidate_length, s.bleu_counts.reference_length,
                       num(s.bleu), num(s.ribes), num(s.rouge_l));
  }
  out += "[corpus]\n";
  out += fmt::format("sentences\t{}\n", report.sentences.size());
  out += fmt::format("max_n\t{}\n", report.max_n);
  out += fmt::format("smoothing\t{}\n", report.smoothing == BleuSmoothing::Exponential ? "exp" : "none");
  out += fmt::format("bleu\t{}\n", num(report.bleu));
  out += fmt::format("bleu_sentence_mean\t{}\n", num(report.bleu_sentence_mean));
  out += fmt::format("ribes_mean\t{}\n", num(report.ribes_mean));
  out += fmt::format("rouge_l_mean\t{}\n", num(report.rouge_l_mean));
  return out;
}

ParsedReport parse_report(std::string_view text) {
  ParsedReport r;
  std::size_t start = 0, line_no = 0;
  bool in_corpus = false;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    auto bad = [&](std::string_view why) {
      return Error(ErrorCode::ParseError, fmt::format("report line {}: {}", line_no, why));
    };
    if (line_no == 1) {
      if (line.substr(0, kHeaderPrefix.size()) != kHeaderPrefix) throw bad("missing report header");
      r.kind = std::string(line.substr(kHeaderPrefix.size()));
      continue;
    }
    if (line_no == 2) {
      r.columns = split_tabs(line);
      continue;
    }
    if (line == "[corpus]") {
      in_corpus = true;
      continue;
    }
    auto fields = split_tabs(line);
    if (in_corpus) {
      if (fields.size() != 2) throw bad("corpus entries are key/value pairs");
      r.corpus[fields[0]] = fields[1];
    } else {
      if (fields.size() != r.columns.size()) throw bad("row width differs from header");
      r.rows.push_back(std::move(fields));
    }
  }
  if (line_no < 2) throw Error(ErrorCode::ParseError, "truncated report");
  if (!in_corpus) throw Error(ErrorCode::ParseError, "report has no [corpus] block");
  return r;
}

}  // namespace kanbun
