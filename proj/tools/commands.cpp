#include "commands.hpp"

#include <fmt/format.h>
#include <stdio.h>
#include <stdlib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>

#include "kanbun/char_forms.hpp"
#include "kanbun/corpus.hpp"
#include "kanbun/error.hpp"
#include "kanbun/kaeriten.hpp"
#include "kanbun/kanbun_parse.hpp"
#include "kanbun/metrics.hpp"
#include "kanbun/reorder.hpp"
#include "kanbun/report.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun::cli {

namespace {

namespace fs = std::filesystem;

struct TextLine {
  std::size_t number;
  std::string text;
};

/// Lines without terminators. A final newline does not start a new line.
std::vector<TextLine> text_lines(std::string_view text, bool skip_blank) {
  std::vector<TextLine> out;
  std::size_t start = 0, number = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (skip_blank && line.empty()) continue;
    out.push_back({number, std::string(line)});
  }
  return out;
}

void emit(const std::string& path, std::string_view content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
  } else {
    write_file(path, content);
  }
}

template <typename F>
auto located(const std::string& file, std::size_t line, F&& body) {
  try {
    return body();
  } catch (const LocatedError&) {
    throw;
  } catch (const Error& e) {
    throw LocatedError(e.code(), file, line, e.what());
  }
}

void report_skip(const LocatedError& e) {
  std::cerr << fmt::format("skip\t{}\t{}:{}\t{}\n", error_code_name(e.code()), e.file(), e.line(), e.what());
}

void report_skipped(std::size_t skipped) {
  if (skipped > 0) std::cerr << fmt::format("skipped\t{}\n", skipped);
}

struct TableHolder {
  CharFormTable loaded;
  const CharFormTable* table = nullptr;
};

TableHolder load_table(const CharTableOption& o) {
  TableHolder h;
  if (o.disabled) return h;
  if (o.path.empty()) {
    h.table = &CharFormTable::builtin();
  } else {
    h.loaded = CharFormTable::load(o.path);
    h.table = &h.loaded;
  }
  return h;
}

/// Applies `f` to indices 0..n-1 on up to `jobs` threads. Results keep index
/// order; the lowest-index failure is rethrown.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](unsigned worker, unsigned stride) {
    for (std::size_t i = worker; i < n; i += stride) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct LoadedCorpus {
  std::vector<CorpusRecord> records;
  std::vector<std::size_t> lines;
};

LoadedCorpus load_corpus_lines(const std::string& path) {
  LoadedCorpus c;
  c.records = load_corpus(path, &c.lines);
  return c;
}

struct LoadedOrders {
  std::vector<OrderEntry> entries;
  std::vector<std::size_t> lines;
};

/// Accepts a corpus file or an orders file.
LoadedOrders load_orders_any(const std::string& path) {
  const std::string text = read_file(path);
  LoadedOrders out;
  std::size_t fields = 0;
  for (const auto& line : text_lines(text, true)) {
    fields = static_cast<std::size_t>(std::count(line.text.begin(), line.text.end(), '\t')) + 1;
    break;
  }
  if (fields == 6) {
    for (auto& r : parse_corpus(text, path, &out.lines)) out.entries.push_back({r.id, r.order});
  } else {
    out.entries = parse_orders(text, path, &out.lines);
  }
  return out;
}

BaselinePredictor load_model(const std::string& path) {
  return located(path, 0, [&] { return BaselinePredictor::load(path); });
}

std::string reordered_text(const SourceSentence& src, const ReadingOrder& order) {
  std::u32string out;
  for (Position p : order.order) out += src.at(p);
  return utf8::encode(out);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

/// Feeds one line per input to `command` on stdin and reads one line per
/// input back.
std::vector<std::string> run_translator(const std::string& command, const std::vector<std::string>& inputs) {
  std::string tmpl = (fs::temp_directory_path() / "kanbun-pipeline-XXXXXX").string();
  const int fd = mkstemp(tmpl.data());
  if (fd < 0) throw Error(ErrorCode::Io, "cannot create a temporary file for the translator");
  close(fd);
  struct Cleanup {
    std::string path;
    ~Cleanup() { std::error_code ec; fs::remove(path, ec); }
  } cleanup{tmpl};
  std::string payload;
  for (const auto& s : inputs) payload += s + "\n";
  write_file(tmpl, payload);

  const std::string full = command + " < " + shell_quote(tmpl);
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) throw Error(ErrorCode::Io, fmt::format("cannot start translator '{}'", command));
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  const int status = pclose(pipe);
  if (status != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : status;
    throw Error(ErrorCode::Io, fmt::format("translator '{}' exited with status {}", command, code));
  }
  std::vector<std::string> lines;
  for (auto& l : text_lines(output, false)) lines.push_back(std::move(l.text));
  if (lines.size() != inputs.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("translator returned {} lines for {} inputs", lines.size(), inputs.size()));
  }
  return lines;
}

}  // namespace

int run_extract(const ExtractOptions& o) {
  const auto table = load_table(o.char_table);
  const auto raw = parse_raw(read_file(o.input), o.input);
  AnnotationMap escapes;
  if (!o.annotations.empty()) escapes = parse_annotations(read_file(o.annotations), o.annotations);
  std::set<std::string> ids;
  for (const auto& r : raw) ids.insert(r.id);
  for (const auto& [id, list] : escapes) {
    if (!ids.count(id)) {
      throw LocatedError(ErrorCode::BadEscape, o.annotations, 0, fmt::format("escape for unknown id '{}'", id));
    }
  }

  std::vector<CorpusRecord> records;
  std::size_t skipped = 0;
  for (const auto& r : raw) {
    try {
      located(o.input, r.line, [&] {
        auto it = escapes.find(r.id);
        const std::span<const AnnotationEscape> esc =
            it == escapes.end() ? std::span<const AnnotationEscape>() : std::span<const AnnotationEscape>(it->second);
        records.push_back(extract_record(r, esc, table.table));
        return 0;
      });
    } catch (const LocatedError& e) {
      if (!o.keep_going) throw;
      report_skip(e);
      ++skipped;
    }
  }
  emit(o.output, format_corpus(records));
  report_skipped(skipped);
  return 0;
}

int run_render_kaeriten(const RenderOptions& o) {
  const auto corpus = load_corpus_lines(o.input);
  std::string out;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    try {
      out += located(o.input, corpus.lines[i], [&] {
        return fmt::format("{}\t{}\n", r.id, format_marked(render_marks(r.source, r.order)));
      });
    } catch (const LocatedError& e) {
      if (!o.keep_going) throw;
      report_skip(e);
      ++skipped;
    }
  }
  emit(o.output, out);
  report_skipped(skipped);
  return 0;
}

int run_parse_kaeriten(const ParseMarksOptions& o) {
  std::vector<OrderEntry> entries;
  std::set<std::string> ids;
  std::size_t skipped = 0;
  for (const auto& line : text_lines(read_file(o.input), true)) {
    try {
      located(o.input, line.number, [&] {
        const auto tab = line.text.find('\t');
        if (tab == std::string::npos || tab == 0 || line.text.find('\t', tab + 1) != std::string::npos) {
          throw Error(ErrorCode::ParseError, "expected 'id<TAB>marked text'");
        }
        std::string id = line.text.substr(0, tab);
        if (!ids.insert(id).second) throw Error(ErrorCode::DuplicateId, fmt::format("duplicate id '{}'", id));
        entries.push_back({std::move(id), parse_marks(parse_marked_text(std::string_view(line.text).substr(tab + 1)))});
        return 0;
      });
    } catch (const LocatedError& e) {
      if (!o.keep_going || e.code() == ErrorCode::DuplicateId) throw;
      report_skip(e);
      ++skipped;
    }
  }
  emit(o.output, format_orders(entries));
  report_skipped(skipped);
  return 0;
}

int run_train(const TrainOptions& o) {
  const auto corpus = load_corpus_lines(o.input);
  std::vector<std::pair<SourceSentence, ReadingOrder>> pairs;
  for (const auto& r : corpus.records) pairs.emplace_back(r.source, r.order);
  const auto model = located(o.input, 0, [&] { return baseline_fit(pairs); });
  if (o.model == "-") {
    emit("-", model.serialize());
  } else {
    model.save(o.model);
  }
  return 0;
}

int run_reorder(const ReorderOptions& o) {
  const auto model = load_model(o.model);
  const auto corpus = load_corpus_lines(o.input);
  auto entries = parallel_map<OrderEntry>(corpus.records.size(), o.jobs, [&](std::size_t i) {
    const auto& r = corpus.records[i];
    return located(o.input, corpus.lines[i], [&] {
      return OrderEntry{r.id, project_order(reorder_sentence(r.source, model), r.order.flags)};
    });
  });
  emit(o.output, format_orders(entries));
  return 0;
}

int run_eval_order(const EvalOrderOptions& o) {
  const auto gold = load_orders_any(o.gold);
  const auto pred = load_orders_any(o.predicted);
  std::unordered_map<std::string, std::size_t> pred_index;
  for (std::size_t i = 0; i < pred.entries.size(); ++i) pred_index.emplace(pred.entries[i].id, i);
  std::unordered_map<std::string, bool> gold_ids;
  for (const auto& g : gold.entries) gold_ids.emplace(g.id, true);
  for (std::size_t i = 0; i < pred.entries.size(); ++i) {
    if (!gold_ids.count(pred.entries[i].id)) {
      throw LocatedError(ErrorCode::LengthMismatch, o.predicted, pred.lines[i],
                         fmt::format("id '{}' has no gold order", pred.entries[i].id));
    }
  }
  std::vector<std::string> ids;
  std::vector<OrderPair> pairs;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    const auto& g = gold.entries[i];
    auto it = pred_index.find(g.id);
    if (it == pred_index.end()) {
      throw LocatedError(ErrorCode::LengthMismatch, o.gold, gold.lines[i], fmt::format("id '{}' has no prediction", g.id));
    }
    const auto& p = pred.entries[it->second];
    located(o.predicted, pred.lines[it->second], [&] { return count_inversions(g.order, p.order); });
    ids.push_back(g.id);
    pairs.push_back({g.order, p.order});
  }
  const auto report = located(o.gold, 0, [&] { return evaluate_orders(ids, pairs); });
  emit(o.output, format_order_report(report));
  return 0;
}

namespace {

struct TextEntry {
  std::string id;
  std::u32string text;
  std::size_t line;
  bool explicit_id;
};

std::vector<TextEntry> load_texts(const std::string& path, const CharFormTable* table) {
  std::vector<TextEntry> out;
  for (const auto& line : text_lines(read_file(path), false)) {
    located(path, line.number, [&] {
      TextEntry e;
      e.line = line.number;
      const auto tab = line.text.find('\t');
      std::string_view body = line.text;
      if (tab != std::string::npos) {
        e.id = line.text.substr(0, tab);
        body = std::string_view(line.text).substr(tab + 1);
        e.explicit_id = true;
      } else {
        e.id = std::to_string(line.number);
        e.explicit_id = false;
      }
      e.text = utf8::decode(body);
      if (table) e.text = normalize_forms(e.text, *table);
      out.push_back(std::move(e));
      return 0;
    });
  }
  return out;
}

}  // namespace

int run_eval_mt(const EvalMtOptions& o) {
  const auto table = load_table(o.char_table);
  const auto cands = load_texts(o.candidates, table.table);
  const auto refs = load_texts(o.references, table.table);
  if (cands.size() != refs.size()) {
    throw LocatedError(ErrorCode::LengthMismatch, o.candidates, 0,
                       fmt::format("{} candidates but {} references", cands.size(), refs.size()));
  }
  std::vector<std::string> ids;
  std::vector<std::u32string> c, r;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].explicit_id && refs[i].explicit_id && cands[i].id != refs[i].id) {
      throw LocatedError(ErrorCode::LengthMismatch, o.candidates, cands[i].line,
                         fmt::format("candidate id '{}' faces reference id '{}'", cands[i].id, refs[i].id));
    }
    if (cands[i].text.empty()) throw LocatedError(ErrorCode::EmptyText, o.candidates, cands[i].line, "empty candidate");
    if (refs[i].text.empty()) throw LocatedError(ErrorCode::EmptyText, o.references, refs[i].line, "empty reference");
    ids.push_back(cands[i].explicit_id ? cands[i].id : refs[i].id);
    c.push_back(cands[i].text);
    r.push_back(refs[i].text);
  }
  const auto smoothing = o.smoothing == "none" ? BleuSmoothing::None : BleuSmoothing::Exponential;
  const auto report = located(o.candidates, 0, [&] { return evaluate_mt(ids, c, r, o.max_n, smoothing); });
  emit(o.output, format_mt_report(report));
  return 0;
}

int run_split(const SplitOptions& o) {
  SplitSpec spec{o.ratios[0], o.ratios[1], o.ratios[2], o.seed};
  spec.validate();
  const auto records = load_corpus(o.input);
  const auto split = located(o.input, 0, [&] { return group_split(records, spec); });
  fs::create_directories(o.out_dir);
  const std::array<std::pair<const char*, const std::vector<CorpusRecord>*>, 3> parts{
      {{"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}}};
  std::string summary = "split\tpoems\tsentences\tcharacters\n";
  for (const auto& [name, recs] : parts) {
    save_corpus(*recs, fs::path(o.out_dir) / fmt::format("{}.tsv", name));
    const auto s = corpus_stats(*recs);
    summary += fmt::format("{}\t{}\t{}\t{}\n", name, s.poems, s.sentences, s.characters);
  }
  emit("-", summary);
  return 0;
}

int run_stats(const StatsOptions& o) {
  const auto s = corpus_stats(load_corpus(o.input));
  emit("-", fmt::format("poems\t{}\nsentences\t{}\ncharacters\t{}\n", s.poems, s.sentences, s.characters));
  return 0;
}

namespace {

struct ScoreTable {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;  // per row
  std::vector<std::size_t> lines;
};

ScoreTable load_scores(const std::string& path) {
  ScoreTable t;
  const auto lines = text_lines(read_file(path), true);
  if (lines.empty()) throw LocatedError(ErrorCode::ParseError, path, 0, "empty score file");
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      auto tab = s.find('\t', start);
      f.push_back(s.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return f;
  };
  auto header = split(lines[0].text);
  if (header.size() < 2 || header[0] != "id") {
    throw LocatedError(ErrorCode::ParseError, path, lines[0].number, "header must be 'id' followed by score columns");
  }
  t.columns.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto f = split(lines[k].text);
    if (f.size() != header.size()) {
      throw LocatedError(ErrorCode::ParseError, path, lines[k].number,
                         fmt::format("expected {} fields, found {}", header.size(), f.size()));
    }
    if (!seen.insert(f[0]).second) {
      throw LocatedError(ErrorCode::DuplicateId, path, lines[k].number, fmt::format("duplicate id '{}'", f[0]));
    }
    std::vector<double> row;
    for (std::size_t j = 1; j < f.size(); ++j) {
      char* end = nullptr;
      const double v = std::strtod(f[j].c_str(), &end);
      if (f[j].empty() || end != f[j].c_str() + f[j].size() || !std::isfinite(v)) {
        throw LocatedError(ErrorCode::ParseError, path, lines[k].number, fmt::format("bad score '{}'", f[j]));
      }
      row.push_back(v);
    }
    t.ids.push_back(f[0]);
    t.values.push_back(std::move(row));
    t.lines.push_back(lines[k].number);
  }
  return t;
}

std::string maybe(auto&& f) {
  try {
    return fmt::format("{:.6f}", f());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance || e.code() == ErrorCode::DegenerateAgreement) return "NA";
    throw;
  }
}

}  // namespace

int run_correlate(const CorrelateOptions& o) {
  const auto autos = load_scores(o.auto_scores);
  const auto human = load_scores(o.human_scores);

  // Human columns are `<criterion>/<rater>`.
  std::vector<std::string> criteria;
  std::map<std::string, std::vector<std::size_t>> columns_of;
  for (std::size_t j = 0; j < human.columns.size(); ++j) {
    const auto& name = human.columns[j];
    const auto slash = name.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == name.size()) {
      throw LocatedError(ErrorCode::ParseError, o.human_scores, 1,
                         fmt::format("human column '{}' is not <criterion>/<rater>", name));
    }
    const std::string criterion = name.substr(0, slash);
    if (!columns_of.count(criterion)) criteria.push_back(criterion);
    columns_of[criterion].push_back(j);
  }

  std::unordered_map<std::string, std::size_t> human_row;
  for (std::size_t i = 0; i < human.ids.size(); ++i) human_row.emplace(human.ids[i], i);
  std::vector<std::size_t> joined;  // human row per auto row
  for (std::size_t i = 0; i < autos.ids.size(); ++i) {
    auto it = human_row.find(autos.ids[i]);
    if (it == human_row.end()) {
      throw LocatedError(ErrorCode::LengthMismatch, o.auto_scores, autos.lines[i],
                         fmt::format("id '{}' has no human scores", autos.ids[i]));
    }
    joined.push_back(it->second);
  }
  if (joined.size() != human.ids.size()) {
    throw LocatedError(ErrorCode::LengthMismatch, o.human_scores, 0,
                       fmt::format("{} human rows but {} automatic rows", human.ids.size(), joined.size()));
  }

  std::string out = "# kanbun-correlation-report v1\n";
  out += "metric\tcriterion\titems\tpearson\tspearman\n";
  for (std::size_t m = 0; m < autos.columns.size(); ++m) {
    std::vector<double> x;
    for (std::size_t i = 0; i < autos.ids.size(); ++i) x.push_back(autos.values[i][m]);
    for (const auto& criterion : criteria) {
      std::vector<double> y;
      for (std::size_t i = 0; i < autos.ids.size(); ++i) {
        std::vector<double> cells;
        for (std::size_t j : columns_of[criterion]) cells.push_back(human.values[joined[i]][j]);
        y.push_back(compensated_mean(cells));
      }
      out += fmt::format("{}\t{}\t{}\t{}\t{}\n", autos.columns[m], criterion, x.size(),
                         maybe([&] { return pearson(x, y); }), maybe([&] { return spearman(x, y); }));
    }
  }
  out += "[agreement]\n";
  out += "criterion\traters\tcategories\tfleiss_kappa\n";
  for (const auto& criterion : criteria) {
    const auto& cols = columns_of[criterion];
    std::set<double> categories;
    for (std::size_t i = 0; i < human.ids.size(); ++i) {
      for (std::size_t j : cols) categories.insert(human.values[i][j]);
    }
    const std::vector<double> cats(categories.begin(), categories.end());
    std::vector<std::vector<int>> table;
    for (std::size_t i = 0; i < human.ids.size(); ++i) {
      std::vector<int> row(cats.size(), 0);
      for (std::size_t j : cols) {
        ++row[static_cast<std::size_t>(std::lower_bound(cats.begin(), cats.end(), human.values[i][j]) - cats.begin())];
      }
      table.push_back(std::move(row));
    }
    const std::string kappa = cols.size() < 2 ? "NA" : maybe([&] { return fleiss_kappa(table); });
    out += fmt::format("{}\t{}\t{}\t{}\n", criterion, cols.size(), cats.size(), kappa);
  }
  emit(o.output, out);
  return 0;
}

int run_pipeline(const PipelineOptions& o) {
  const auto table = load_table(o.char_table);
  const auto corpus = load_corpus_lines(o.input);
  std::optional<BaselinePredictor> model;
  if (!o.no_reorder) model = load_model(o.model);

  auto orders = parallel_map<ReadingOrder>(corpus.records.size(), o.jobs, [&](std::size_t i) {
    const auto& r = corpus.records[i];
    return located(o.input, corpus.lines[i], [&] {
      const ReadingOrder full = model ? reorder_sentence(r.source, *model) : ReadingOrder::identity(r.source.size());
      return project_order(full, r.order.flags);
    });
  });
  std::vector<std::string> inputs;
  for (std::size_t i = 0; i < orders.size(); ++i) inputs.push_back(reordered_text(corpus.records[i].source, orders[i]));

  std::vector<std::string> outputs;
  if (!o.translator.empty()) {
    outputs = located(o.translator, 0, [&] { return run_translator(o.translator, inputs); });
  }

  std::string out;
  if (o.format == "tsv") {
    out = "id\tinput\tcandidate\n";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      out += fmt::format("{}\t{}\t{}\n", corpus.records[i].id, inputs[i], outputs.empty() ? "" : outputs[i]);
    }
  } else if (outputs.empty()) {
    std::vector<std::string> ids;
    std::vector<OrderPair> pairs;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      ids.push_back(corpus.records[i].id);
      pairs.push_back({corpus.records[i].order, orders[i]});
    }
    out = format_order_report(located(o.input, 0, [&] { return evaluate_orders(ids, pairs); }));
  } else {
    std::vector<std::string> ids;
    std::vector<std::u32string> cands, refs;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      std::u32string cand = located(o.translator, i + 1, [&] { return utf8::decode(outputs[i]); });
      if (table.table) cand = normalize_forms(cand, *table.table);
      if (cand.empty()) {
        throw LocatedError(ErrorCode::EmptyText, o.translator, i + 1,
                           fmt::format("translator returned an empty line for '{}'", corpus.records[i].id));
      }
      ids.push_back(corpus.records[i].id);
      cands.push_back(std::move(cand));
      refs.push_back(corpus.records[i].kanbun.text);
    }
    out = format_mt_report(located(o.input, 0, [&] { return evaluate_mt(ids, cands, refs); }));
  }
  emit(o.output, out);
  return 0;
}

}  // namespace kanbun::cli
