// Acceptance checks. One line per criterion; exit status is nonzero if any fails.
#include <fmt/format.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "kanbun/char_forms.hpp"
#include "kanbun/corpus.hpp"
#include "kanbun/error.hpp"
#include "kanbun/kaeriten.hpp"
#include "kanbun/kanbun_parse.hpp"
#include "kanbun/metrics.hpp"
#include "kanbun/reorder.hpp"
#include "kanbun/report.hpp"
#include "kanbun/utf8.hpp"

using namespace kanbun;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& args, std::string* out = nullptr) {
  const std::string cmd = std::string("'") + KANBUN_CLI_PATH + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
  const int raw = pclose(p);
  if (out) *out = text;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kanbun_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string sample(const std::string& name) { return std::string(KANBUN_DATA_DIR) + "/sample/" + name; }

// Criterion 1 ------------------------------------------------------------

bool has_re(const std::vector<KaeritenMark>& marks) {
  return std::any_of(marks.begin(), marks.end(), [](const KaeritenMark& m) { return m.series == MarkSeries::Re; });
}

int numeral(const std::vector<KaeritenMark>& marks, MarkSeries* series) {
  for (const auto& m : marks) {
    if (m.series != MarkSeries::Re) {
      *series = m.series;
      return m.index;
    }
  }
  return 0;
}

std::vector<Position> reference_read(const MarkedSentence& m) {
  const int n = static_cast<int>(m.chars.size());
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  std::vector<Position> out;
  std::vector<int> stack;
  auto read = [&](int i) {
    done[i] = true;
    out.push_back(i + 1);
    stack.push_back(i);
  };
  for (int i = 0; i < n; ++i) {
    MarkSeries s{};
    if (has_re(m.marks[i]) || numeral(m.marks[i], &s) >= 2) continue;
    read(i);
    while (!stack.empty()) {
      const int top = stack.back();
      if (top > 0 && !done[top - 1] && has_re(m.marks[top - 1])) {
        read(top - 1);
        continue;
      }
      stack.pop_back();
      const int k = numeral(m.marks[top], &s);
      if (k == 0) continue;
      for (int j = top - 1; j >= 0; --j) {
        MarkSeries t{};
        if (!done[j] && numeral(m.marks[j], &t) == k + 1 && t == s) {
          read(j);
          break;
        }
      }
    }
  }
  return out;
}

Outcome criterion_1() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t checked = 0;
  for (int n = 2; n <= 7; ++n) {
    const auto representable = enumerate_representable(n);
    const SourceSentence src{std::u32string(static_cast<std::size_t>(n), U'字')};
    std::vector<Position> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 1);
    std::size_t rendered = 0;
    do {
      const auto order = ReadingOrder::from_permutation(p);
      MarkedSentence marked;
      try {
        marked = render_marks(src, order);
      } catch (const Error&) {
        if (representable.count(p)) {
          o.pass = false;
          o.detail = fmt::format("render failed on representable {}", order_string(order));
          return o;
        }
        continue;
      }
      ++rendered;
      const bool ok = representable.count(p) && parse_marks(marked) == order && reference_read(marked) == p &&
                      parse_marks(parse_marked_text(format_marked(marked))) == order;
      if (!ok) {
        o.pass = false;
        o.detail = fmt::format("round trip failed on {}", order_string(order));
        return o;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    if (rendered != representable.size()) {
      o.pass = false;
      o.detail = fmt::format("n={}: {} rendered, {} representable", n, rendered, representable.size());
      return o;
    }
    checked += rendered;
  }
  const double elapsed = seconds_since(start);

  const auto shungyo = render_marks(segment_chars("春眠不覚暁"), ReadingOrder::from_permutation({1, 2, 5, 4, 3}));
  const auto text = format_marked(shungyo);
  std::size_t re_marks = 0;
  for (const auto& m : shungyo.marks) re_marks += has_re(m);
  const auto back = order_string(parse_marks(parse_marked_text(text)));
  o.pass = elapsed < 60.0 && re_marks == 2 && shungyo.mark_count() == 2 && back == "12543";
  o.detail = fmt::format("{} orders round-tripped in {:.2f}s; {} -> {}", checked, elapsed, text, back);
  return o;
}

// Criterion 2 ------------------------------------------------------------

Outcome criterion_2() {
  std::mt19937 rng(2024);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 11);
    std::vector<Position> g(static_cast<std::size_t>(n)), p;
    std::iota(g.begin(), g.end(), 1);
    std::shuffle(g.begin(), g.end(), rng);
    p = g;
    std::shuffle(p.begin(), p.end(), rng);
    std::map<Position, int> at;
    for (int i = 0; i < n; ++i) at[p[i]] = i;
    long inv = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inv += at[g[i]] > at[g[j]];
    }
    const double expected = 1.0 - 4.0 * static_cast<double>(inv) / (static_cast<double>(n) * (n - 1));
    const auto a = ReadingOrder::from_permutation(g), b = ReadingOrder::from_permutation(p);
    if (kendall_tau(a, b) != expected || count_inversions(a, b) != inv) ++mismatches;
  }
  const double fig = kendall_tau(ReadingOrder::from_permutation({1, 2, 5, 4, 3}), ReadingOrder::identity(5));
  return {mismatches == 0 && fig == 0.4, fmt::format("{} mismatches in 1000 pairs; tau(12543, 12345) = {}", mismatches, fig)};
}

// Criterion 3 ------------------------------------------------------------

std::map<std::u32string, long> ngrams(const std::u32string& s, std::size_t n) {
  std::map<std::u32string, long> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[s.substr(i, n)];
  return out;
}

double bleu_oracle(const std::vector<std::u32string>& c, const std::vector<std::u32string>& r) {
  std::size_t longest = 0;
  double cl = 0, rl = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    longest = std::max(longest, c[k].size());
    cl += static_cast<double>(c[k].size());
    rl += static_cast<double>(r[k].size());
  }
  const int order = std::min(4, static_cast<int>(longest));
  double log_p = 0;
  int halvings = 0;
  for (int n = 1; n <= order; ++n) {
    long m = 0, t = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto cg = ngrams(c[k], static_cast<std::size_t>(n)), rg = ngrams(r[k], static_cast<std::size_t>(n));
      for (const auto& [g, cnt] : cg) {
        t += cnt;
        if (auto it = rg.find(g); it != rg.end()) m += std::min(cnt, it->second);
      }
    }
    if (m == 0 && n == 1) return 0.0;
    log_p += m == 0 ? -std::log(std::pow(2.0, ++halvings) * static_cast<double>(t))
                    : std::log(static_cast<double>(m) / static_cast<double>(t));
  }
  return (cl >= rl ? 1.0 : std::exp(1 - rl / cl)) * std::exp(log_p / order);
}

std::size_t lcs_oracle(const std::u32string& a, const std::u32string& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    std::u32string sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask >> i & 1u) sub += a[i];
    }
    std::size_t j = 0;
    for (char32_t ch : b) {
      if (j < sub.size() && sub[j] == ch) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

double rouge_oracle(const std::u32string& c, const std::u32string& r) {
  const double l = static_cast<double>(lcs_oracle(c, r));
  if (l == 0) return 0;
  const double p = l / static_cast<double>(c.size()), q = l / static_cast<double>(r.size());
  return 2 * p * q / (p + q);
}

double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::vector<double> ranks_oracle(const std::vector<double>& x) {
  std::vector<double> r;
  for (double v : x) {
    double below = 0, tied = 0;
    for (double w : x) {
      below += w < v;
      tied += w == v;
    }
    r.push_back(below + (tied + 1) / 2);
  }
  return r;
}

double fleiss_oracle(const std::vector<std::vector<int>>& m) {
  const double items = static_cast<double>(m.size());
  const double raters = std::accumulate(m[0].begin(), m[0].end(), 0.0);
  double p_bar = 0, pe = 0;
  for (std::size_t j = 0; j < m[0].size(); ++j) {
    double col = 0;
    for (const auto& row : m) col += row[j];
    pe += std::pow(col / (items * raters), 2);
  }
  for (const auto& row : m) {
    double s = 0;
    for (int v : row) s += static_cast<double>(v) * v;
    p_bar += (s - raters) / (raters * (raters - 1));
  }
  p_bar /= items;
  return (p_bar - pe) / (1 - pe);
}

Outcome criterion_3() {
  std::mt19937 rng(33);
  const std::u32string pool = U"春眠不覚暁処";
  auto text = [&](std::size_t lo, std::size_t hi) {
    std::u32string s;
    for (std::size_t i = 0, n = lo + rng() % (hi - lo + 1); i < n; ++i) s += pool[rng() % pool.size()];
    return s;
  };
  double worst = 0;
  auto track = [&](double a, double b) { worst = std::max(worst, std::fabs(a - b)); };
  for (int t = 0; t < 200; ++t) {
    std::vector<std::u32string> c, r;
    for (std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k) {
      c.push_back(text(1, 8));
      r.push_back(text(1, 8));
    }
    track(bleu_char(c, r), bleu_oracle(c, r));
    track(rouge_l_char(c[0], r[0]), rouge_oracle(c[0], r[0]));

    std::vector<double> x, y;
    for (std::size_t i = 0, n = 3 + rng() % 15; i < n; ++i) {
      x.push_back(static_cast<double>(rng() % 5));
      y.push_back(static_cast<double>(rng() % 997) / 31.0);
    }
    x[0] = 0;
    x[1] = 4;
    track(pearson(x, y), pearson_oracle(x, y));
    track(spearman(x, y), pearson_oracle(ranks_oracle(x), ranks_oracle(y)));

    const int raters = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<int>> table(2 + rng() % 8, std::vector<int>(2 + rng() % 3, 0));
    for (auto& row : table) {
      for (int k = 0; k < raters; ++k) ++row[rng() % row.size()];
    }
    table[0].assign(table[0].size(), 0);
    table[0][0] = raters;
    table[1].assign(table[1].size(), 0);
    table[1][1] = raters;
    track(fleiss_kappa(table), fleiss_oracle(table));
  }

  const std::vector<std::vector<int>> fleiss_example = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0}, {2, 2, 8, 1, 1},
      {7, 7, 0, 0, 0},  {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2}, {6, 5, 2, 1, 0}, {0, 2, 2, 3, 7}};
  const std::vector<double> a = {1, 2, 3, 4}, b = {1, 3, 2, 4};
  const bool examples = std::fabs(fleiss_kappa(fleiss_example) - 0.20993070442195522) < 1e-12 &&
                        std::fabs(pearson(a, b) - 0.8) < 1e-12 && std::fabs(spearman(a, b) - 0.8) < 1e-12 &&
                        sentence_bleu_char(U"春眠不覚暁", U"春眠不覚暁") == 1.0 &&
                        rouge_l_char(U"春眠不覚暁", U"春眠不覚暁") == 1.0 &&
                        std::fabs(rouge_l_char(U"春眠覚暁", U"春眠不覚暁") - 8.0 / 9.0) < 1e-12;
  return {worst <= 1e-9 && examples,
          fmt::format("max deviation {:.3g} over 200 inputs per metric; worked examples {}", worst,
                      examples ? "reproduce" : "DIFFER")};
}

// Criterion 4 ------------------------------------------------------------

Outcome criterion_4() {
  std::mt19937 rng(44);
  const std::u32string pool = U"山水花鳥月風雨雪春秋不之";
  int lossless = 0, invariant = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 12;
    std::u32string s;
    ReadingOrder o;
    for (std::size_t i = 0; i < n; ++i) {
      s += pool[rng() % pool.size()];
      const auto roll = rng() % 12;
      o.flags.push_back(roll == 0 && n > 1 ? ReadingFlag::Unpronounced
                        : roll == 1        ? ReadingFlag::Reread
                                           : ReadingFlag::Normal);
    }
    if (std::all_of(o.flags.begin(), o.flags.end(), [](ReadingFlag f) { return f == ReadingFlag::Unpronounced; })) {
      o.flags[0] = ReadingFlag::Normal;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (o.flags[i] != ReadingFlag::Unpronounced) o.order.push_back(static_cast<Position>(i + 1));
    }
    std::shuffle(o.order.begin(), o.order.end(), rng);
    const auto examples = make_examples(SourceSentence{s}, o);
    std::vector<double> scores;
    for (const auto& e : examples) scores.push_back(e.gold_rank);
    const auto decoded = decode_order(scores);
    lossless += project_order(decoded, o.flags) == o;
    std::vector<double> warped;
    for (double v : scores) warped.push_back(std::atan(5 * v) * 100 - 3);
    invariant += decode_order(warped) == decoded;
  }
  return {lossless == 1000 && invariant == 1000,
          fmt::format("lossless {}/1000, monotone-invariant {}/1000", lossless, invariant)};
}

// Criterion 5 ------------------------------------------------------------

double corpus_tau(const std::vector<CorpusRecord>& test, const std::function<ReadingOrder(const CorpusRecord&)>& predict) {
  std::vector<double> taus;
  for (const auto& r : test) taus.push_back(kendall_tau(r.order, project_order(predict(r), r.order.flags)));
  return compensated_mean(taus);
}

double random_tau(const std::vector<CorpusRecord>& test, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> draws;
  for (int d = 0; d < 500; ++d) {
    draws.push_back(corpus_tau(test, [&](const CorpusRecord& r) {
      std::vector<Position> p(r.source.size());
      std::iota(p.begin(), p.end(), 1);
      for (std::size_t i = p.size(); i-- > 1;) std::swap(p[i], p[uniform_below(i + 1, rng)]);
      return ReadingOrder::from_permutation(p);
    }));
  }
  return compensated_mean(draws);
}

std::vector<CorpusRecord> identity_heavy(std::mt19937& rng, std::size_t sentences, const std::string& prefix) {
  const std::u32string nouns = U"山水花鳥月風雨雪春秋江舟";
  const std::u32string verbs = U"見聞知登望";
  std::vector<CorpusRecord> out;
  for (std::size_t k = 0; k < sentences; ++k) {
    std::u32string s;
    for (int i = 0; i < 5; ++i) s += nouns[rng() % nouns.size()];
    ReadingOrder o = ReadingOrder::identity(5);
    if (rng() % 4 == 0) {
      // verb-object: the verb at 3 is read after the two nouns that follow it
      s[2] = verbs[rng() % verbs.size()];
      o.order = {1, 2, 4, 5, 3};
    }
    CorpusRecord r;
    r.id = fmt::format("{}-{}", prefix, k);
    r.poem_id = fmt::format("{}{}", prefix, k / 4);
    r.source = SourceSentence{s};
    r.order = o;
    out.push_back(r);
  }
  return out;
}

Outcome criterion_5() {
  const auto records = load_corpus(sample("corpus.tsv"));
  const auto split = group_split(records, SplitSpec{});
  std::vector<std::pair<SourceSentence, ReadingOrder>> train;
  for (const auto& r : split.train) train.emplace_back(r.source, r.order);
  const auto model = baseline_fit(train);
  const double tau = corpus_tau(split.test, [&](const CorpusRecord& r) { return reorder_sentence(r.source, model); });
  const double chance = random_tau(split.test, 5);

  std::mt19937 rng(55);
  const auto heavy_train = identity_heavy(rng, 400, "t");
  const auto heavy_test = identity_heavy(rng, 100, "e");
  std::vector<std::pair<SourceSentence, ReadingOrder>> ht;
  for (const auto& r : heavy_train) ht.emplace_back(r.source, r.order);
  const auto heavy_model = baseline_fit(ht);
  const double heavy_tau =
      corpus_tau(heavy_test, [&](const CorpusRecord& r) { return reorder_sentence(r.source, heavy_model); });
  return {tau > chance && heavy_tau >= 0.55,
          fmt::format("sample test split tau {:.4f} vs random {:.4f} ({} test sentences); identity-heavy tau {:.4f}",
                      tau, chance, split.test.size(), heavy_tau)};
}

// Criterion 6 ------------------------------------------------------------

Outcome criterion_6() {
  const auto raw = parse_raw(read_file(sample("raw.tsv")), sample("raw.tsv"));
  const auto escapes = parse_annotations(read_file(sample("annotations.tsv")), sample("annotations.tsv"));
  const std::map<std::string, std::string> expected = {
      {"shungyo-1", "12543"}, {"shungyo-2", "12453"}, {"shungyo-3", "12345"}, {"shungyo-4", "12345"}};
  const auto& table = CharFormTable::builtin();
  std::string got;
  bool pass = true;
  for (const auto& [id, want] : expected) {
    const auto it = std::find_if(raw.begin(), raw.end(), [&](const RawRecord& r) { return r.id == id; });
    if (it == raw.end()) return {false, id + " missing from sample"};
    auto src = segment_chars(it->source, id);
    src.chars = normalize_forms(src.chars, table);
    const auto kanbun = normalize_forms(utf8::decode(it->kanbun), table);
    std::vector<AnnotationEscape> esc;
    if (auto e = escapes.find(id); e != escapes.end()) esc = e->second;
    const auto order = order_string(extract_order(src, kanbun, esc));
    pass = pass && order == want;
    got += fmt::format(" {}={}", id, order);
  }
  return {pass, "extracted" + got};
}

// Criterion 7 ------------------------------------------------------------

Outcome criterion_7() {
  const auto dir = scratch("split");
  int status = shell(fmt::format("split '{}' -o '{}' --seed 11", sample("corpus.tsv"), (dir / "a").string()));
  status |= shell(fmt::format("split '{}' -o '{}' --seed 11", sample("corpus.tsv"), (dir / "b").string()));
  bool identical = status == 0;
  std::map<std::string, std::string> poem_home;
  std::set<std::string> ids;
  bool partitioned = true;
  std::size_t total = 0;
  for (const char* f : {"train.tsv", "validation.tsv", "test.tsv"}) {
    identical = identical && slurp(dir / "a" / f) == slurp(dir / "b" / f);
    for (const auto& r : load_corpus(dir / "a" / f)) {
      auto [it, fresh] = poem_home.emplace(r.poem_id, f);
      partitioned = partitioned && it->second == f && ids.insert(r.id).second;
      ++total;
    }
  }
  partitioned = partitioned && total == load_corpus(sample("corpus.tsv")).size();

  std::vector<CorpusRecord> synth;
  const std::u32string pool = U"山水花鳥月";
  for (int p = 0; p < 465; ++p) {
    for (int s = 0; s < 4; ++s) {
      CorpusRecord r;
      r.id = fmt::format("p{}-{}", p, s + 1);
      r.poem_id = fmt::format("p{}", p);
      r.source = SourceSentence{pool};
      r.order = ReadingOrder::identity(pool.size());
      r.kanbun.text = pool;
      r.kanbun.alignment = r.order.order;
      synth.push_back(r);
    }
  }
  save_corpus(synth, dir / "synthetic.tsv");
  std::array<std::size_t, 3> poems{};
  const bool ran = shell(fmt::format("split '{}' -o '{}' --ratios 0.8,0.1,0.1 --seed 1", (dir / "synthetic.tsv").string(),
                                     (dir / "s").string())) == 0;
  int k = 0;
  for (const char* f : {"train.tsv", "validation.tsv", "test.tsv"}) {
    if (ran) poems[k] = corpus_stats(load_corpus(dir / "s" / f)).poems;
    ++k;
  }
  const std::array<long, 3> target{372, 46, 47};
  bool close = ran;
  for (int i = 0; i < 3; ++i) close = close && std::labs(static_cast<long>(poems[i]) - target[i]) <= 3;
  fs::remove_all(dir);
  return {identical && partitioned && close,
          fmt::format("rerun {}, partition {}, 465 poems -> {}/{}/{}", identical ? "byte-identical" : "DIFFERS",
                      partitioned ? "clean" : "BROKEN", poems[0], poems[1], poems[2])};
}

// Criterion 8 ------------------------------------------------------------

Outcome criterion_8() {
  const auto dir = scratch("e2e");
  auto run_once = [&](const std::string& tag, std::string* report) {
    const auto d = dir / tag;
    fs::create_directories(d);
    const auto corpus = (d / "corpus.tsv").string(), model = (d / "model.txt").string(),
               pred = (d / "pred.tsv").string();
    if (shell(fmt::format("extract '{}' -a '{}' -o '{}'", sample("raw.tsv"), sample("annotations.tsv"), corpus))) return false;
    if (shell(fmt::format("train '{}' -m '{}'", corpus, model))) return false;
    if (shell(fmt::format("reorder '{}' -m '{}' -o '{}'", corpus, model, pred))) return false;
    return shell(fmt::format("eval-order '{}' '{}'", corpus, pred), report) == 0;
  };
  const auto start = Clock::now();
  std::string first, second;
  const bool ok = run_once("a", &first);
  const double elapsed = seconds_since(start);
  const bool ok2 = run_once("b", &second);
  bool well_formed = false;
  std::string tau = "?";
  if (ok) {
    try {
      const auto parsed = parse_report(first);
      well_formed = parsed.kind == "order" && parsed.rows.size() == 20 && parsed.corpus.count("tau_mean") &&
                    parsed.corpus.count("pmr") && parsed.corpus.at("sentences") == "20";
      tau = parsed.corpus.count("tau_mean") ? parsed.corpus.at("tau_mean") : "?";
    } catch (const Error&) {
    }
  }
  const bool identical = ok2 && first == second &&
                         slurp(dir / "a" / "model.txt") == slurp(dir / "b" / "model.txt") &&
                         slurp(dir / "a" / "pred.tsv") == slurp(dir / "b" / "pred.tsv");
  fs::remove_all(dir);
  return {ok && elapsed < 10.0 && well_formed && identical,
          fmt::format("{:.2f}s, report {}, tau_mean {}, rerun {}", elapsed, well_formed ? "well-formed" : "MALFORMED",
                      tau, identical ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, Outcome (*)()>> criteria = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
      {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8}};
  int failures = 0;
  for (const auto& [n, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("criterion {}: {} - {}\n", n, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
